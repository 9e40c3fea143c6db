//! Linear stability of one- and two-stream quantum plasmas.
//!
//! The toolkit covers four layers, all working in the dimensionless variables
//! `(K̄, H, α)` — normalized wavenumber, quantum parameter, and relative
//! spectral broadening:
//!
//! * [`params`] — parameter types, momentum spectra (delta and Lorentzian
//!   streams), SI ↔ dimensionless conversions.
//! * [`analytic`] — closed-form dispersion branches, instability conditions,
//!   stability boundaries, band edges, and asymptotic growth formulas.
//! * [`dielectric`] — the general multistream dielectric function evaluated
//!   two independent ways (exact pole form and adaptive quadrature with the
//!   Landau continuation), with complex root finding and parameter
//!   continuation.
//! * [`stability`] — (K̄, H) stability maps with traced zero-growth
//!   boundaries and unstable-band reports.
//! * [`sim`] — a pseudo-spectral initial-value solver for the kinetic
//!   phase-space equation on a periodic domain, used to measure growth and
//!   damping rates of seeded perturbations and close the loop on the linear
//!   theory.

pub mod analytic;
pub mod dielectric;
pub mod error;
pub mod params;
pub mod quadrature;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
