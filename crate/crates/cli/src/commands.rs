//! Command implementations: each turns a validated [`RunSpec`] into result
//! files plus a short stdout summary, and `verify` runs the self-check
//! matrix end to end.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

use qstream_core::analytic;
use qstream_core::dielectric::{self, DielectricMethod};
use qstream_core::params::Background;
use qstream_core::sim::{self, SimConfig, Simulator};
use qstream_core::stability::{self, Classification};

use crate::config::{
    BandsParams, DispersionParams, MapParams, RunSpec, Setup, SimulateParams, SweepParams,
};
use crate::output::{fmt_float, OutputFormat, Table};

pub fn run_command(spec: &RunSpec, out_dir: &Path, format: OutputFormat) -> Result<()> {
    match spec {
        RunSpec::Dispersion(p) => run_dispersion(p, out_dir, format),
        RunSpec::Map(p) => run_map(p, out_dir, format),
        RunSpec::Bands(p) => run_bands(p, out_dir, format),
        RunSpec::Simulate(p) => run_simulate(p, out_dir, format),
        RunSpec::Sweep(p) => run_sweep(p, out_dir, format),
        RunSpec::Verify(_) => run_verify(),
    }
}

fn background_for(setup: Setup, alpha: f64) -> Result<Background> {
    Ok(match (setup, alpha > 0.0) {
        (Setup::OneStream, false) => Background::one_stream_cold(),
        (Setup::OneStream, true) => Background::one_stream_lorentzian(alpha)?,
        (Setup::TwoStream, false) => Background::two_stream_cold(),
        (Setup::TwoStream, true) => Background::two_stream_lorentzian(alpha)?,
    })
}

fn setup_name(setup: Setup) -> &'static str {
    match setup {
        Setup::OneStream => "one-stream",
        Setup::TwoStream => "two-stream",
    }
}

// ---------------------------------------------------------------------------
// dispersion
// ---------------------------------------------------------------------------

fn analytic_branches(p: &DispersionParams) -> Result<Vec<(&'static str, Complex64)>> {
    let shift = Complex64::new(0.0, -p.alpha * p.k_bar);
    Ok(match p.setup {
        Setup::OneStream => {
            let (plus, minus) = analytic::one_stream_cold(p.k_bar, p.h)?;
            vec![
                ("plus", Complex64::new(plus, 0.0) + shift),
                ("minus", Complex64::new(minus, 0.0) + shift),
            ]
        }
        Setup::TwoStream => {
            let (plus_sq, minus_sq) = analytic::two_stream_cold_quartic(p.k_bar, p.h)?;
            let plus_root = Complex64::new(plus_sq, 0.0).sqrt();
            let minus_root = Complex64::new(minus_sq, 0.0).sqrt();
            vec![
                ("plus_pos", plus_root + shift),
                ("plus_neg", -plus_root + shift),
                ("minus_pos", minus_root + shift),
                ("minus_neg", -minus_root + shift),
            ]
        }
    })
}

fn run_dispersion(p: &DispersionParams, out_dir: &Path, format: OutputFormat) -> Result<()> {
    let bg = background_for(p.setup, p.alpha)?;
    let branches = analytic_branches(p)?;
    let nudge = Complex64::new(2e-3, 1.5e-3);

    let mut table = Table::new(
        "dispersion",
        vec![
            "branch",
            "analytic_re",
            "analytic_im",
            "numeric_re",
            "numeric_im",
            "abs_diff",
        ],
    );
    table.param("command", "dispersion");
    table.param("setup", setup_name(p.setup));
    table.param("k_bar", fmt_float(p.k_bar));
    table.param("h", fmt_float(p.h));
    table.param("alpha", fmt_float(p.alpha));

    let mut worst: f64 = 0.0;
    for (name, target) in &branches {
        let root = dielectric::find_root(&bg, p.k_bar, p.h, target + nudge)
            .with_context(|| format!("numeric cross-check of branch {name}"))?;
        let diff = (root.omega - target).norm();
        worst = worst.max(diff);
        table.row(vec![
            (*name).to_string(),
            fmt_float(target.re),
            fmt_float(target.im),
            fmt_float(root.omega.re),
            fmt_float(root.omega.im),
            fmt_float(diff),
        ]);
        println!(
            "{name:>10}: Ω̄ = {} + {}i   (numeric agrees to {diff:.2e})",
            fmt_float(target.re),
            fmt_float(target.im)
        );
    }
    let path = table.write(out_dir, format)?;
    println!(
        "dispersion: {} branches at K̄ = {}, H = {}, α = {}; worst analytic/numeric gap {worst:.3e}; wrote {}",
        branches.len(),
        p.k_bar,
        p.h,
        p.alpha,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// map
// ---------------------------------------------------------------------------

fn run_map(p: &MapParams, out_dir: &Path, format: OutputFormat) -> Result<()> {
    let (k_axis, h_axis) = stability::uniform_axes(p.k_max, p.h_max, p.n_k, p.n_h);
    let map = stability::build_map(&k_axis, &h_axis, p.alpha)?;

    let mut cells = Table::new(
        "map_cells",
        vec!["k_bar", "h", "alpha", "class", "growth"],
    );
    cells.param("command", "map");
    cells.param("alpha", fmt_float(p.alpha));
    cells.param("k_max", fmt_float(p.k_max));
    cells.param("h_max", fmt_float(p.h_max));
    cells.param("n_k", p.n_k);
    cells.param("n_h", p.n_h);
    for (ih, &h) in map.h_axis.iter().enumerate() {
        for (ik, &k) in map.k_axis.iter().enumerate() {
            let (class, growth) = map.cell(ik, ih);
            cells.row(vec![
                fmt_float(k),
                fmt_float(h),
                fmt_float(p.alpha),
                match class {
                    Classification::Stable => "stable".into(),
                    Classification::Unstable => "unstable".into(),
                },
                fmt_float(growth),
            ]);
        }
    }
    let cells_path = cells.write(out_dir, format)?;

    let mut boundary = Table::new("map_boundary", vec!["curve_id", "k_bar", "h"]);
    boundary.param("command", "map");
    boundary.param("alpha", fmt_float(p.alpha));
    for (id, curve) in map.boundaries.iter().enumerate() {
        for &(k, h) in &curve.points {
            boundary.row(vec![id.to_string(), fmt_float(k), fmt_float(h)]);
        }
    }
    let boundary_path = boundary.write(out_dir, format)?;

    let unstable = map
        .class
        .iter()
        .filter(|c| **c == Classification::Unstable)
        .count();
    println!(
        "map: {}×{} grid at α = {}: {unstable} unstable cells, {} boundary curves; wrote {} and {}",
        p.n_k,
        p.n_h,
        p.alpha,
        map.boundaries.len(),
        cells_path.display(),
        boundary_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// bands
// ---------------------------------------------------------------------------

fn run_bands(p: &BandsParams, out_dir: &Path, format: OutputFormat) -> Result<()> {
    let bands = stability::band_report(p.h, p.alpha, p.k_min, p.k_max, p.n_scan)?;
    let mut table = Table::new("bands", vec!["band_index", "k_lo", "k_hi"]);
    table.param("command", "bands");
    table.param("h", fmt_float(p.h));
    table.param("alpha", fmt_float(p.alpha));
    table.param("k_min", fmt_float(p.k_min));
    table.param("k_max", fmt_float(p.k_max));
    table.param("n_scan", p.n_scan);
    for (i, (lo, hi)) in bands.iter().enumerate() {
        table.row(vec![i.to_string(), fmt_float(*lo), fmt_float(*hi)]);
        println!("band {i}: K̄ ∈ [{lo:.8}, {hi:.8}]");
    }
    if bands.is_empty() {
        println!("no unstable bands in K̄ ∈ [{}, {}]", p.k_min, p.k_max);
    }
    let path = table.write(out_dir, format)?;
    println!(
        "bands: H = {}, α = {}: {} band(s); wrote {}",
        p.h,
        p.alpha,
        bands.len(),
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn resolve_sim_config(p: &SimulateParams) -> Result<SimConfig> {
    let bg = background_for(p.setup, p.alpha)?;
    let mut cfg = SimConfig::for_k_bar(p.k_bar, p.h, bg);
    if let Some(v) = p.n_x {
        cfg.n_x = v;
    }
    if let Some(v) = p.n_p {
        cfg.n_p = v;
    }
    if let Some(v) = p.u_max {
        cfg.u_max = v;
    } else if p.n_p.is_some() {
        cfg.u_max = sim::suggested_u_max(
            &cfg.background,
            p.h,
            p.k_bar,
            cfg.n_p,
            2.0 * sim::MIN_DELTA_WIDTH_CELLS,
        );
    }
    if let Some(v) = p.dt {
        cfg.dt = v;
    } else {
        cfg.dt = 0.5 * cfg.domain_length / (cfg.n_x as f64 * cfg.u_max);
    }
    if let Some(v) = p.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = p.mode {
        cfg.mode = v;
        cfg.domain_length = 2.0 * std::f64::consts::PI * v as f64 / p.k_bar;
    }
    if let Some(v) = p.amplitude {
        cfg.amplitude = v;
    }
    if let Some(v) = p.delta_width_cells {
        cfg.delta_width_cells = v;
    }
    if let Some(v) = p.mask_fraction {
        cfg.mask_fraction = v;
    }
    if let Some(v) = p.sample_every {
        cfg.sample_every = v;
    }
    cfg.fit_amp_cap = p.fit_amp_cap;
    cfg.validate().map_err(anyhow::Error::from)?;
    Ok(cfg)
}

fn run_simulate(p: &SimulateParams, out_dir: &Path, format: OutputFormat) -> Result<()> {
    let cfg = resolve_sim_config(p)?;
    let started = Instant::now();

    let extrapolate = p.extrapolate_widening && cfg.background.has_delta();
    let (diag, fit_result, widening) = if extrapolate {
        match sim::measure_growth(&cfg) {
            Ok(m) => (m.primary.clone(), Ok(m.primary.fit), m.widening),
            Err(e) => fall_back_series(&cfg, e)?,
        }
    } else {
        match sim::run(&cfg) {
            Ok(d) => {
                let fit = d.fit;
                (d, Ok(fit), None)
            }
            Err(e) => fall_back_series(&cfg, e)?,
        }
    };

    let mut series = Table::new(
        "sim_series",
        vec![
            "t",
            "field_energy",
            "mode_amp",
            "harmonic2",
            "harmonic3",
            "total_number",
            "total_momentum",
        ],
    );
    series.param("command", "simulate");
    series.param("setup", setup_name(p.setup));
    series.param("k_bar", fmt_float(cfg.k_bar()));
    series.param("h", fmt_float(cfg.h));
    series.param("alpha", fmt_float(p.alpha));
    series.param("n_x", cfg.n_x);
    series.param("n_p", cfg.n_p);
    series.param("u_max", fmt_float(cfg.u_max));
    series.param("dt", fmt_float(cfg.dt));
    series.param("t_end", fmt_float(cfg.t_end));
    series.param("mode", cfg.mode);
    series.param("amplitude", fmt_float(cfg.amplitude));
    for i in 0..diag.times.len() {
        series.row(vec![
            fmt_float(diag.times[i]),
            fmt_float(diag.field_energy[i]),
            fmt_float(diag.mode_amp[i]),
            fmt_float(diag.harmonic2[i]),
            fmt_float(diag.harmonic3[i]),
            fmt_float(diag.total_number[i]),
            fmt_float(diag.total_momentum[i]),
        ]);
    }
    let series_path = series.write(out_dir, format)?;

    // Run-metadata record: full resolved configuration, widening, fit, and
    // the wall-clock timestamp (kept out of the data files).
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "command": "simulate",
        "timestamp_unix": timestamp,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "config": {
            "setup": setup_name(p.setup),
            "k_bar": cfg.k_bar(),
            "h": cfg.h,
            "alpha": p.alpha,
            "domain_length": cfg.domain_length,
            "n_x": cfg.n_x,
            "n_p": cfg.n_p,
            "u_max": cfg.u_max,
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "mode": cfg.mode,
            "amplitude": cfg.amplitude,
            "delta_width_cells": cfg.delta_width_cells,
            "mask_fraction": cfg.mask_fraction,
            "sample_every": cfg.sample_every,
            "fit_amp_cap": cfg.fit_amp_cap,
        },
        "widened_delta_width": diag.widened_delta_width,
        "widening_extrapolation": widening.map(|w| serde_json::json!({
            "widths": w.widths,
            "rates": w.rates,
            "extrapolated": w.extrapolated,
        })),
        "fit": match &fit_result {
            Ok(f) => serde_json::json!({
                "gamma": f.gamma,
                "window": [f.window.0, f.window.1],
                "n_points": f.n_points,
                "residual_rms": f.residual_rms,
                "from_peaks": f.from_peaks,
            }),
            Err(msg) => serde_json::json!({ "error": msg }),
        },
    });
    let meta_path = out_dir.join("sim_meta.json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("writing {}", meta_path.display()))?;

    println!(
        "simulate: {} samples; wrote {} and {}",
        diag.times.len(),
        series_path.display(),
        meta_path.display()
    );
    match &fit_result {
        Ok(f) => {
            if let Some(w) = widening {
                println!(
                    "rates: width {} → {}, width {} → {}, extrapolated γ = {}",
                    fmt_float(w.widths[0]),
                    fmt_float(w.rates[0]),
                    fmt_float(w.widths[1]),
                    fmt_float(w.rates[1]),
                    fmt_float(w.extrapolated)
                );
            } else {
                println!("fitted rate γ = {}", fmt_float(f.gamma));
            }
            Ok(())
        }
        Err(msg) => bail!("rate fit failed: {msg} (series and metadata were written)"),
    }
}

/// On a fit failure, salvage the raw series so the output files still carry
/// the data, and surface the error in the metadata.
fn fall_back_series(
    cfg: &SimConfig,
    err: qstream_core::Error,
) -> Result<(
    sim::Diagnostics,
    std::result::Result<sim::RateFit, String>,
    Option<sim::WideningExtrapolation>,
)> {
    match err {
        qstream_core::Error::NoExponentialRegime { .. } => {
            let diag = Simulator::new(cfg.clone())?.run_series()?;
            Ok((diag, Err(format!("{err}")), None))
        }
        other => Err(other.into()),
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn run_sweep(p: &SweepParams, out_dir: &Path, format: OutputFormat) -> Result<()> {
    let path: Vec<(f64, f64, f64)> = (0..p.steps)
        .map(|i| {
            let s = i as f64 / (p.steps - 1) as f64;
            (
                p.start[0] + s * (p.stop[0] - p.start[0]),
                p.start[1] + s * (p.stop[1] - p.start[1]),
                p.start[2] + s * (p.stop[2] - p.start[2]),
            )
        })
        .collect();

    let template = background_for(p.setup, p.start[2])?;
    let seed = match (p.init_re, p.init_im) {
        (Some(re), Some(im)) => Complex64::new(re, im),
        _ => {
            let (k, h, alpha) = path[0];
            match p.setup {
                Setup::OneStream => analytic::one_stream_lorentzian(k, h, alpha)?,
                Setup::TwoStream => analytic::two_stream_lorentzian(k, h, alpha)?,
            }
        }
    };
    let track = dielectric::track_roots(&template, &path, seed)?;

    let mut table = Table::new(
        "sweep",
        vec![
            "index", "k_bar", "h", "alpha", "omega_re", "omega_im", "residual", "converged",
            "jumped",
        ],
    );
    table.param("command", "sweep");
    table.param("setup", setup_name(p.setup));
    table.param("steps", p.steps);
    table.param("seed_re", fmt_float(seed.re));
    table.param("seed_im", fmt_float(seed.im));
    for (i, point) in track.points.iter().enumerate() {
        table.row(vec![
            i.to_string(),
            fmt_float(point.k_bar),
            fmt_float(point.h),
            fmt_float(point.alpha),
            fmt_float(point.omega.re),
            fmt_float(point.omega.im),
            fmt_float(point.residual),
            point.converged.to_string(),
            point.jumped.to_string(),
        ]);
    }
    let path_out = table.write(out_dir, format)?;
    println!(
        "sweep: {} points, all converged: {}, any branch jumps: {}; wrote {}",
        track.points.len(),
        track.all_converged(),
        track.any_jumped(),
        path_out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Verifier {
    failures: usize,
    checks: usize,
}

impl Verifier {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.checks += 1;
        if ok {
            println!("[PASS] {name}: {detail}");
        } else {
            self.failures += 1;
            println!("[FAIL] {name}: {detail}");
        }
    }
}

/// The acceptance matrix made user-runnable: analytic vs numeric vs
/// simulator on a fixed, fast set of checks.
fn run_verify() -> Result<()> {
    let started = Instant::now();
    let mut v = Verifier {
        failures: 0,
        checks: 0,
    };

    // 1. Classical band edges.
    let bands = stability::band_report(0.0, 0.0, 0.0, 2.0, 2000)?;
    let ok = bands.len() == 1
        && bands[0].0.abs() < 1e-8
        && (bands[0].1 - 1.0).abs() < 1e-8;
    v.check(
        "classical band",
        ok,
        format!("H = 0, α = 0 unstable band = {bands:?} (want one band, edges 0 and 1 to 1e-8)"),
    );

    // 2. Map boundaries against the closed curves.
    let (k_axis, h_axis) = stability::uniform_axes(4.0, 4.0, 120, 120);
    let map = stability::build_map(&k_axis, &h_axis, 0.0)?;
    let mut worst = 0.0f64;
    let mut points = 0;
    for curve in &map.boundaries {
        for &(k, h) in &curve.points {
            let h_plus = 2.0 / k;
            let (h_minus_sq, _) = analytic::stability_boundaries(k)?;
            let d_h = (h - h_plus).abs().min(if h_minus_sq >= 0.0 {
                (h - h_minus_sq.sqrt()).abs()
            } else {
                f64::INFINITY
            });
            let d_k = (k - 2.0 / h.max(1e-300)).abs().min(
                band_k_distance(h, k).unwrap_or(f64::INFINITY),
            );
            worst = worst.max(d_h.min(d_k));
            points += 1;
        }
    }
    v.check(
        "map boundaries",
        points > 100 && worst < 1e-6,
        format!("{points} traced points, worst curve distance {worst:.2e} (want < 1e-6)"),
    );

    // 3. Damped cutoff.
    let mut ok = true;
    let mut detail = String::new();
    for alpha in [0.1, 0.2, 0.5, 0.9] {
        let bands = stability::band_report(0.0, alpha, 0.0, 1.5, 4000)?;
        let kc = analytic::classical_cutoff(alpha)?;
        let edge = bands.last().map(|b| b.1).unwrap_or(f64::NAN);
        let good = (edge - kc).abs() < 1e-6;
        ok &= good;
        detail.push_str(&format!("α={alpha}: edge {edge:.7} vs K_c {kc:.7}; "));
    }
    let quenched = stability::band_report(0.0, 1.0, 0.0, 1.5, 4000)?.is_empty();
    ok &= quenched;
    detail.push_str(&format!("α=1 quenched: {quenched}"));
    v.check("damped cutoff", ok, detail);

    // 4. Oracle equivalence (coarse grid) and evaluation-route agreement.
    let mut worst_root = 0.0f64;
    let nudge = Complex64::new(3e-3, 2e-3);
    for i in 1..=6 {
        for j in 1..=6 {
            let k = 0.45 * i as f64;
            let h = 0.3 * j as f64;
            for alpha in [0.0, 0.2, 0.6] {
                let targets: Vec<(Background, Complex64)> = vec![
                    (
                        background_for(Setup::OneStream, alpha)?,
                        analytic::one_stream_lorentzian(k, h, alpha)?,
                    ),
                    (
                        background_for(Setup::TwoStream, alpha)?,
                        analytic::two_stream_lorentzian(k, h, alpha)?,
                    ),
                ];
                for (bg, target) in targets {
                    let root = dielectric::find_root(&bg, k, h, target + nudge)?;
                    worst_root = worst_root.max((root.omega - target).norm());
                }
            }
        }
    }
    v.check(
        "oracle roots",
        worst_root < 1e-8,
        format!("worst closed-form/numeric root gap {worst_root:.2e} over 6×6×3 grid (want < 1e-8)"),
    );

    let bg = Background::two_stream_lorentzian(0.3)?;
    let mut worst_eps = 0.0f64;
    for (k, h, w) in [
        (0.5, 0.0, Complex64::new(0.2, 0.35)),
        (1.2, 0.8, Complex64::new(0.9, 0.1)),
        (0.8, 0.4, Complex64::new(0.4, -0.05)),
        (1.5, 1.2, Complex64::new(-0.3, 0.2)),
    ] {
        let pole = dielectric::evaluate_dielectric(&bg, k, h, w, DielectricMethod::ClosedFormPole)?;
        let quad =
            dielectric::evaluate_dielectric(&bg, k, h, w, DielectricMethod::QuadraturePlemelj)?;
        worst_eps = worst_eps.max((pole - quad).norm());
    }
    v.check(
        "dielectric routes",
        worst_eps < 1e-8,
        format!("worst pole/quadrature gap {worst_eps:.2e} (want < 1e-8)"),
    );

    let (k, h) = (0.7, 0.5);
    let (_, minus_sq) = analytic::two_stream_cold_quartic(k, h)?;
    let cold_root = Complex64::new(minus_sq, 0.0).sqrt();
    let mut errs = Vec::new();
    for alpha in [1e-3, 1e-4, 1e-5] {
        let bg = Background::two_stream_lorentzian(alpha)?;
        let root = dielectric::find_root(&bg, k, h, cold_root + nudge)?;
        errs.push((root.omega - cold_root).norm());
    }
    let linear = errs
        .windows(2)
        .all(|p| (0.05..0.2).contains(&(p[1] / p[0])));
    v.check(
        "narrow-Lorentzian limit",
        linear,
        format!("root errors vs delta background {errs:?} (want ~10× per decade of α)"),
    );

    // 5. Kinetic spot check: cold two-stream growth with extrapolation.
    let cfg =
        SimConfig::for_k_bar(0.5, 0.0, Background::two_stream_cold()).with_growth_fit_cap();
    let measured = sim::measure_growth(&cfg)?;
    let target = analytic::two_stream_lorentzian(0.5, 0.0, 0.0)?.im;
    let rel = ((measured.rate - target) / target).abs();
    v.check(
        "kinetic growth",
        rel < 0.10,
        format!(
            "simulator γ = {:.5} vs closed form {target:.5} ({:.2}% off, want < 10%)",
            measured.rate,
            100.0 * rel
        ),
    );
    let n0 = measured.primary.total_number[0];
    let drift = measured
        .primary
        .total_number
        .iter()
        .map(|n| ((n - n0) / n0).abs())
        .fold(0.0f64, f64::max);
    v.check(
        "number conservation",
        drift < 1e-8,
        format!("relative drift {drift:.2e} (want < 1e-8)"),
    );

    let simulator = Simulator::new(cfg.clone())?;
    let initial = simulator.init_state()?;
    let mut state = initial.clone();
    for _ in 0..200 {
        simulator.step(&mut state);
    }
    for _ in 0..200 {
        simulator.step_with_dt(&mut state, -cfg.dt);
    }
    let peak = initial.w.iter().cloned().fold(0.0f64, |m, x| m.max(x.abs()));
    let defect = state
        .w
        .iter()
        .zip(&initial.w)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / peak;
    v.check(
        "reversibility",
        defect < 1e-6,
        format!("forward/backward defect {defect:.2e} (want < 1e-6)"),
    );

    // 6. Asymptotics.
    let mut ok = true;
    for alpha in [0.0, 0.3, 0.6] {
        for i in 1..=5 {
            let k = 0.01 * i as f64;
            let exact = analytic::two_stream_growth(k, 0.0, alpha)?;
            ok &= ((1.0 - alpha) * k - exact).abs() / exact < 0.05;
        }
    }
    v.check(
        "small-K̄ asymptote",
        ok,
        "(1 − α)K̄ within 5% of the exact branch for K̄ ≤ 0.05".into(),
    );

    println!(
        "verify: {}/{} checks passed in {:?}",
        v.checks - v.failures,
        v.checks,
        started.elapsed()
    );
    if v.failures > 0 {
        bail!("{} verification check(s) failed", v.failures);
    }
    Ok(())
}

/// Distance from `k` to the nearest inner band edge at this H, if any.
fn band_k_distance(h: f64, k: f64) -> Option<f64> {
    let edges = analytic::band_edges(h).ok()?;
    let (low, high) = edges.inner?;
    Some((k - low).abs().min((k - high).abs()))
}
