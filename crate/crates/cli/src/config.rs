//! Strict TOML configuration parsing: a top-level `command` key plus a
//! nested `[params]` table whose schema depends on the command. Unknown keys
//! are fatal — a silent typo in a physics parameter produces
//! plausible-but-wrong science.

use anyhow::{bail, Context, Result};
use serde::Deserialize;

/// Which analytic setup a command refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setup {
    OneStream,
    TwoStream,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionParams {
    pub setup: Setup,
    pub k_bar: f64,
    #[serde(default)]
    pub h: f64,
    #[serde(default)]
    pub alpha: f64,
}

fn default_axis_max() -> f64 {
    4.0
}
fn default_grid_n() -> usize {
    400
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapParams {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_axis_max")]
    pub k_max: f64,
    #[serde(default = "default_axis_max")]
    pub h_max: f64,
    #[serde(default = "default_grid_n")]
    pub n_k: usize,
    #[serde(default = "default_grid_n")]
    pub n_h: usize,
}

fn default_scan_n() -> usize {
    4000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsParams {
    pub h: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub k_min: f64,
    #[serde(default = "default_axis_max")]
    pub k_max: f64,
    #[serde(default = "default_scan_n")]
    pub n_scan: usize,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    pub setup: Setup,
    pub k_bar: f64,
    #[serde(default)]
    pub h: f64,
    /// Background broadening; 0 means cold (delta) beams.
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub n_x: Option<usize>,
    #[serde(default)]
    pub n_p: Option<usize>,
    #[serde(default)]
    pub u_max: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub mode: Option<usize>,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub delta_width_cells: Option<f64>,
    #[serde(default)]
    pub mask_fraction: Option<f64>,
    #[serde(default)]
    pub sample_every: Option<usize>,
    #[serde(default)]
    pub fit_amp_cap: Option<f64>,
    /// Run a second widened-delta width and extrapolate (delta backgrounds).
    #[serde(default = "default_true")]
    pub extrapolate_widening: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub setup: Setup,
    /// Path start and stop as (k_bar, h, alpha) triples.
    pub start: [f64; 3],
    pub stop: [f64; 3],
    pub steps: usize,
    /// Optional explicit seed; defaults to the analytic branch at `start`.
    #[serde(default)]
    pub init_re: Option<f64>,
    #[serde(default)]
    pub init_im: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {}

/// Parsed and validated run request.
#[derive(Debug, Clone)]
pub enum RunSpec {
    Dispersion(DispersionParams),
    Map(MapParams),
    Bands(BandsParams),
    Simulate(SimulateParams),
    Sweep(SweepParams),
    Verify(VerifyParams),
}

impl RunSpec {
    pub fn command_name(&self) -> &'static str {
        match self {
            RunSpec::Dispersion(_) => "dispersion",
            RunSpec::Map(_) => "map",
            RunSpec::Bands(_) => "bands",
            RunSpec::Simulate(_) => "simulate",
            RunSpec::Sweep(_) => "sweep",
            RunSpec::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: String,
    #[serde(default)]
    params: Option<toml::Value>,
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0) {
        bail!("parameter `{name}` = {value} must be positive");
    }
    Ok(())
}

fn require_nonnegative(name: &str, value: f64) -> Result<()> {
    if !(value >= 0.0) {
        bail!("parameter `{name}` = {value} must be non-negative");
    }
    Ok(())
}

/// Parse and validate a config document into a [`RunSpec`].
pub fn parse_config(text: &str) -> Result<RunSpec> {
    let raw: RawConfig = toml::from_str(text).context("config syntax error")?;
    let params = raw.params.unwrap_or(toml::Value::Table(Default::default()));
    let take = params.clone();
    let spec = match raw.command.as_str() {
        "dispersion" => {
            let p: DispersionParams = take.try_into().context("in [params]")?;
            require_positive("k_bar", p.k_bar)?;
            require_nonnegative("h", p.h)?;
            require_nonnegative("alpha", p.alpha)?;
            RunSpec::Dispersion(p)
        }
        "map" => {
            let p: MapParams = take.try_into().context("in [params]")?;
            require_nonnegative("alpha", p.alpha)?;
            require_positive("k_max", p.k_max)?;
            require_positive("h_max", p.h_max)?;
            if p.n_k < 2 || p.n_h < 2 {
                bail!("parameters `n_k`, `n_h` must be at least 2");
            }
            RunSpec::Map(p)
        }
        "bands" => {
            let p: BandsParams = take.try_into().context("in [params]")?;
            require_nonnegative("h", p.h)?;
            require_nonnegative("alpha", p.alpha)?;
            require_nonnegative("k_min", p.k_min)?;
            if !(p.k_max > p.k_min) {
                bail!("parameter `k_max` = {} must exceed k_min = {}", p.k_max, p.k_min);
            }
            if p.n_scan < 8 {
                bail!("parameter `n_scan` = {} must be at least 8", p.n_scan);
            }
            RunSpec::Bands(p)
        }
        "simulate" => {
            let p: SimulateParams = take.try_into().context("in [params]")?;
            require_positive("k_bar", p.k_bar)?;
            require_nonnegative("h", p.h)?;
            require_nonnegative("alpha", p.alpha)?;
            // Grid/time details are validated by the simulator config once
            // resolved; catch plain sign errors here.
            for (name, v) in [
                ("u_max", p.u_max),
                ("dt", p.dt),
                ("t_end", p.t_end),
                ("amplitude", p.amplitude),
            ] {
                if let Some(v) = v {
                    require_positive(name, v)?;
                }
            }
            RunSpec::Simulate(p)
        }
        "sweep" => {
            let p: SweepParams = take.try_into().context("in [params]")?;
            for (name, v) in [
                ("start.k_bar", p.start[0]),
                ("stop.k_bar", p.stop[0]),
            ] {
                require_positive(name, v)?;
            }
            for (name, v) in [
                ("start.h", p.start[1]),
                ("start.alpha", p.start[2]),
                ("stop.h", p.stop[1]),
                ("stop.alpha", p.stop[2]),
            ] {
                require_nonnegative(name, v)?;
            }
            if p.steps < 2 {
                bail!("parameter `steps` = {} must be at least 2", p.steps);
            }
            RunSpec::Sweep(p)
        }
        "verify" => {
            let p: VerifyParams = take.try_into().context("in [params]")?;
            RunSpec::Verify(p)
        }
        other => bail!("unknown command `{other}` (expected dispersion, map, bands, simulate, sweep, or verify)"),
    };
    Ok(spec)
}
