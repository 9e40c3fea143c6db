//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A numeric input violated a precondition.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A zero-width (delta) stream was used where only smooth spectra are valid.
    #[error("delta stream not allowed here: {0}")]
    DeltaStream(&'static str),

    /// Stream densities do not add up to the background density.
    #[error("quasineutrality violated: stream densities sum to {sum} but total density is {total}")]
    Quasineutrality { sum: f64, total: f64 },

    /// A momentum grid is too coarse to resolve the requested spectral width.
    #[error("momentum grid too coarse: {points_per_width:.2} points across the width, need at least {required}")]
    GridTooCoarse {
        points_per_width: f64,
        required: usize,
    },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failed to converge: estimated error {error:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureNonConvergent { error: f64, tolerance: f64 },

    /// Complex root search ran out of iterations.
    #[error("root search did not converge after {iterations} iterations: last iterate {last}, residual {residual:.3e}")]
    RootNonConvergent {
        iterations: usize,
        last: Complex64,
        residual: f64,
    },

    /// Simulation configuration failed validation.
    #[error("simulation config invalid: {0}")]
    SimConfig(String),

    /// Rate extraction found no exponential window in the diagnostic series.
    ///
    /// Carries the raw `(t, log-amplitude)` series so the caller can inspect it.
    #[error("no exponential regime found (best residual {residual:.3e}); raw series attached ({} samples)", series.len())]
    NoExponentialRegime {
        residual: f64,
        series: Vec<(f64, f64)>,
    },
}

impl Error {
    pub(crate) fn bad_param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
