//! End-to-end tests of the `qstream` binary: config validation surfaces,
//! file outputs, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qstream"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qstream-cli-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn dispersion_happy_path() {
    let dir = tmp_dir("disp");
    let cfg = write_config(
        &dir,
        "d.toml",
        "command = \"dispersion\"\n[params]\nsetup = \"two-stream\"\nk_bar = 0.5\nh = 0.0\nalpha = 0.0\n",
    );
    let out = bin()
        .args(["dispersion", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("minus_pos"), "{stdout}");
    let csv = fs::read_to_string(dir.join("dispersion.csv")).unwrap();
    assert!(csv.contains("branch,analytic_re"));
    // The marginal point K̄ = 0.5... is unstable; growth appears as +Im.
    assert!(csv.lines().count() >= 10);
}

#[test]
fn negative_k_bar_is_named() {
    let dir = tmp_dir("negk");
    let cfg = write_config(
        &dir,
        "d.toml",
        "command = \"dispersion\"\n[params]\nsetup = \"one-stream\"\nk_bar = -1.0\n",
    );
    let out = bin()
        .args(["dispersion", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("k_bar"), "{}", stderr_of(&out));
}

#[test]
fn unknown_key_is_fatal() {
    let dir = tmp_dir("unk");
    let cfg = write_config(
        &dir,
        "d.toml",
        "command = \"bands\"\n[params]\nh = 0.6\nfrobnicator = 3\n",
    );
    let out = bin().args(["bands", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(
        stderr_of(&out).contains("frobnicator"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn command_mismatch_is_fatal() {
    let dir = tmp_dir("mismatch");
    let cfg = write_config(
        &dir,
        "d.toml",
        "command = \"bands\"\n[params]\nh = 0.6\n",
    );
    let out = bin().args(["map", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = stderr_of(&out);
    assert!(err.contains("bands") && err.contains("map"), "{err}");
}

#[test]
fn missing_config_is_reported() {
    let out = bin()
        .args(["map", "--config", "/nonexistent/qstream.toml"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("nonexistent"));
}

#[test]
fn bands_match_closed_form_edges() {
    let dir = tmp_dir("bands");
    let cfg = write_config(
        &dir,
        "b.toml",
        "command = \"bands\"\n[params]\nh = 0.6\nk_max = 4.0\n",
    );
    let out = bin()
        .args(["bands", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.join("bands.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("band_index"))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    // Inner edges of the split instability at H = 0.6:
    // K̄² = (2/H²)(1 ∓ √(1 − H²)), outer edge 2/H.
    let disc = (1.0f64 - 0.36).sqrt();
    let low = (2.0 / 0.36 * (1.0 - disc)).sqrt();
    let high = (2.0 / 0.36 * (1.0 + disc)).sqrt();
    assert!((rows[0][2] - low).abs() < 1e-6);
    assert!((rows[1][1] - high).abs() < 1e-6);
    assert!((rows[1][2] - 2.0 / 0.6).abs() < 1e-6);
}

#[test]
fn map_output_is_byte_identical_across_runs() {
    let dir = tmp_dir("det");
    let cfg = write_config(
        &dir,
        "m.toml",
        "command = \"map\"\n[params]\nalpha = 0.1\nn_k = 40\nn_h = 40\n",
    );
    for sub in ["a", "b"] {
        let out = bin()
            .args(["map", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(sub))
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    for file in ["map_cells.csv", "map_boundary.csv"] {
        let a = fs::read(dir.join("a").join(file)).unwrap();
        let b = fs::read(dir.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn json_lines_format() {
    let dir = tmp_dir("jsonl");
    let cfg = write_config(
        &dir,
        "b.toml",
        "command = \"bands\"\n[params]\nh = 2.0\n",
    );
    let out = bin()
        .args(["bands", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .args(["--format", "json-lines"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let body = fs::read_to_string(dir.join("bands.jsonl")).unwrap();
    for line in body.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.is_object());
    }
    assert!(body.lines().count() >= 2);
}

#[test]
fn sweep_crosses_threshold_monotonically() {
    let dir = tmp_dir("sweep");
    let cfg = write_config(
        &dir,
        "s.toml",
        "command = \"sweep\"\n[params]\nsetup = \"two-stream\"\nstart = [0.5, 0.0, 0.0]\nstop = [0.5, 0.0, 1.0]\nsteps = 30\n",
    );
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let ims: Vec<f64> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("index"))
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ims.len(), 30);
    for pair in ims.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "Im Ω̄ must fall along the α sweep");
    }
    assert!(ims[0] > 0.0 && *ims.last().unwrap() < 0.0);
}
