//! Closed-form dispersion branches for one- and two-stream backgrounds,
//! instability conditions, stability-boundary curves, and asymptotic growth
//! formulas.
//!
//! Everything here is dimensionless (see [`crate::params`]). Perturbations go
//! as `exp[i(K̄x̄ − Ω̄t̄)]`, so `Im Ω̄ > 0` means growth and `Im Ω̄ < 0` damping.
//!
//! # Branch conventions
//!
//! Square roots of negative or complex quantities use the principal branch.
//! For the two-stream minus branch this automatically gives the root with
//! `Im Ω̄ ≥ −αK̄` (the "unstable" branch); the conjugate root is implied. For
//! purely real branches both signs are returned explicitly.
//!
//! # Two-stream closed forms (symmetric case)
//!
//! For equal half-density counter-streaming beams the dispersion relation is
//! the quartic
//!
//! ```text
//!   Ω̄⁴ − (1 + 2K̄² + H²K̄⁴/2) Ω̄² − K̄²(1 − H²K̄²/4)(1 − K̄² + H²K̄⁴/4) = 0,
//! ```
//!
//! solved by
//!
//! ```text
//!   Ω̄² = 1/2 + K̄² + H²K̄⁴/4 ± (1/2)√(1 + 8K̄² + 4H²K̄⁶).
//! ```
//!
//! The minus branch dips below zero — instability — exactly when
//! `1 − 1/K̄² < H²K̄²/4 < 1`. Equal Lorentzian broadening α on both beams
//! shifts every root rigidly by `−iαK̄`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex mode frequency Ω̄; `Im > 0` ⇒ growth, `Im < 0` ⇒ damping.
pub type ComplexFrequency = Complex64;

/// Unstable wavenumber band edges at fixed quantum parameter H.
///
/// `k_plus` is the outermost edge (always 2/H). For H < 1 the instability
/// splits into two bands `[0, K₋_low] ∪ [K₋_high, K₊]`; `inner` holds the pair
/// `(K₋_low, K₋_high)` bounding the stable gap, and is `None` for H ≥ 1 where
/// the single band `[0, K₊]` remains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdges {
    pub k_plus: f64,
    pub inner: Option<(f64, f64)>,
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) {
        return Err(Error::bad_param(name, value, "must be positive"));
    }
    Ok(())
}

fn require_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if !(value >= 0.0) {
        return Err(Error::bad_param(name, value, "must be non-negative"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// One-stream branches
// ---------------------------------------------------------------------------

/// Both real branches of the cold single-beam relation,
/// `Ω̄ = K̄ ± √(1 + H²K̄⁴/4)`.
///
/// Quantum effects enter as pure wave dispersion: no damping, ever.
/// Normalization: the stream's own drift p₀ and the full-density plasma
/// frequency.
pub fn one_stream_cold(k_bar: f64, h: f64) -> Result<(f64, f64)> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("h", h)?;
    let hk2 = h * k_bar * k_bar;
    let disp = (1.0 + 0.25 * hk2 * hk2).sqrt();
    Ok((k_bar + disp, k_bar - disp))
}

/// Positive branch of the Lorentzian single beam:
/// `Ω̄ = K̄ + √(1 + H²K̄⁴/4) − iαK̄`.
///
/// The finite spectral width damps the perturbation at exactly `αK̄` — the
/// Landau-like damping of a partially incoherent beam. The negative branch is
/// the mirror image `K̄ − √(·) − iαK̄`.
pub fn one_stream_lorentzian(k_bar: f64, h: f64, alpha: f64) -> Result<ComplexFrequency> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("h", h)?;
    require_nonnegative("alpha", alpha)?;
    let (plus, _) = one_stream_cold(k_bar, h)?;
    Ok(Complex64::new(plus, -alpha * k_bar))
}

// ---------------------------------------------------------------------------
// Two-stream branches (symmetric case)
// ---------------------------------------------------------------------------

/// Both Ω̄² roots of the symmetric cold two-stream quartic, `(plus, minus)`:
/// `Ω̄² = 1/2 + K̄² + H²K̄⁴/4 ± (1/2)√(1 + 8K̄² + 4H²K̄⁶)`.
///
/// A negative minus branch means a purely growing mode. The minus branch is
/// computed as the root product over the plus branch — `base − root` cancels
/// catastrophically for small K̄ and near marginal points, while the product
/// `−K̄²(1 − H²K̄²/4)(1 − K̄² + H²K̄⁴/4)` is exact algebra.
pub fn two_stream_cold_quartic(k_bar: f64, h: f64) -> Result<(f64, f64)> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("h", h)?;
    let k2 = k_bar * k_bar;
    let q = 0.25 * h * h * k2; // H²K̄²/4
    // base = 1/2 + K̄² + H²K̄⁴/4, discriminant = 1 + 8K̄² + 4H²K̄⁶.
    let plus = 0.5 + k2 + q * k2 + 0.5 * (1.0 + 8.0 * k2 + 16.0 * q * k2 * k2).sqrt();
    let product = -k2 * (1.0 - q) * (1.0 - k2 + q * k2);
    Ok((plus, product / plus))
}

/// Cold two-stream instability test: true iff the minus branch Ω̄²₋ < 0,
/// equivalently `1 − 1/K̄² < H²K̄²/4 < 1`.
///
/// Marginal points (Ω̄²₋ = 0 exactly) count as stable.
pub fn two_stream_cold_unstable(k_bar: f64, h: f64) -> Result<bool> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("h", h)?;
    let k2 = k_bar * k_bar;
    let q = 0.25 * h * h * k2;
    Ok(1.0 - 1.0 / k2 < q && q < 1.0)
}

/// The squared boundary curves `(H₋², H₊²)` of the unstable region at fixed K̄:
/// `H₋²(K̄) = (4/K̄²)(1 − 1/K̄²) < H² < 4/K̄² = H₊²(K̄)`.
///
/// `H₋²` is negative for K̄ < 1, meaning the lower bound is vacuous there.
pub fn stability_boundaries(k_bar: f64) -> Result<(f64, f64)> {
    require_positive("k_bar", k_bar)?;
    let k2 = k_bar * k_bar;
    Ok((4.0 / k2 * (1.0 - 1.0 / k2), 4.0 / k2))
}

/// Unstable K̄ band edges at fixed H > 0.
///
/// `K₊ = 2/H` always. For H < 1 the inner gap edges are the square roots of
/// the two solutions of `H²K̄⁴/4 − K̄² + 1 = 0` in K̄²,
/// `K̄² = (2/H²)(1 ∓ √(1 − H²))`; they merge at H = 1 (both √2) and vanish for
/// H > 1.
pub fn band_edges(h: f64) -> Result<BandEdges> {
    require_positive("h", h)?;
    let k_plus = 2.0 / h;
    if h > 1.0 {
        return Ok(BandEdges {
            k_plus,
            inner: None,
        });
    }
    let disc = (1.0 - h * h).sqrt();
    let low = (2.0 / (h * h) * (1.0 - disc)).sqrt();
    let high = (2.0 / (h * h) * (1.0 + disc)).sqrt();
    Ok(BandEdges {
        k_plus,
        inner: Some((low, high)),
    })
}

/// Unstable-branch root of the symmetric Lorentzian two-stream relation
/// `(Ω̄ + iαK̄)² = RHS₋`, i.e. `Ω̄ = −iαK̄ + √(RHS₋)` with the principal root.
///
/// In the previously unstable region (RHS₋ < 0) this gives
/// `Im Ω̄ = −αK̄ + √(−RHS₋)`; elsewhere a damped oscillation `√(RHS₋) − iαK̄`.
/// Broadening enters only as the rigid imaginary shift −iαK̄.
pub fn two_stream_lorentzian(k_bar: f64, h: f64, alpha: f64) -> Result<ComplexFrequency> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("h", h)?;
    require_nonnegative("alpha", alpha)?;
    let (_, minus) = two_stream_cold_quartic(k_bar, h)?;
    Ok(Complex64::new(minus, 0.0).sqrt() + Complex64::new(0.0, -alpha * k_bar))
}

/// Signed growth rate of the two-stream unstable branch, extended to K̄ = 0
/// (where it vanishes). Convenience for scanning and boundary tracing.
pub fn two_stream_growth(k_bar: f64, h: f64, alpha: f64) -> Result<f64> {
    if k_bar == 0.0 {
        return Ok(0.0);
    }
    Ok(two_stream_lorentzian(k_bar, h, alpha)?.im)
}

/// Classical-limit (H = 0) instability cutoff under broadening:
/// `K_c = √(1 − α²)/(1 + α²)` for α < 1, and 0 for α ≥ 1, where no
/// instability survives at any wavenumber.
pub fn classical_cutoff(alpha: f64) -> Result<f64> {
    require_nonnegative("alpha", alpha)?;
    if alpha >= 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 - alpha * alpha).sqrt() / (1.0 + alpha * alpha))
}

// ---------------------------------------------------------------------------
// Asymptotic growth formulas
// ---------------------------------------------------------------------------

/// Asymptotic regimes of the two-stream growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// K̄ → 0: `Im Ω̄ ≈ (1 − α)K̄`.
    SmallK,
    /// K̄ small with H²K̄²/4 = O(1), near the upper stability boundary:
    /// `Im Ω̄ ≈ (√(1 − H²K̄²/4) − α)K̄`; threshold `H = (2/K̄)√(1 − α²)`.
    Threshold,
    /// K̄ ≫ 1 with Δh = 1 − H²K̄²/4 = O(1/K̄²):
    /// `Im Ω̄ ≈ −αK̄ + √(Δh(1/2 − K̄²Δh))`.
    LargeK,
}

/// Evaluate the chosen asymptotic growth-rate formula.
///
/// The caller is responsible for staying inside the regime of validity; out
/// of regime the square roots may produce NaN (the formula has no real
/// value there).
pub fn asymptotic_growth(k_bar: f64, h: f64, alpha: f64, regime: AsymptoticRegime) -> Result<f64> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("h", h)?;
    require_nonnegative("alpha", alpha)?;
    Ok(match regime {
        AsymptoticRegime::SmallK => (1.0 - alpha) * k_bar,
        AsymptoticRegime::Threshold => {
            let hk2 = 0.25 * h * h * k_bar * k_bar;
            ((1.0 - hk2).sqrt() - alpha) * k_bar
        }
        AsymptoticRegime::LargeK => {
            let dh = 1.0 - 0.25 * h * h * k_bar * k_bar;
            -alpha * k_bar + (dh * (0.5 - k_bar * k_bar * dh)).sqrt()
        }
    })
}

/// Stability threshold of the [`AsymptoticRegime::Threshold`] regime,
/// `H = (2/K̄)√(1 − α²)`; coincides with H₊(K̄) at α = 0.
pub fn threshold_boundary_h(k_bar: f64, alpha: f64) -> Result<f64> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("alpha", alpha)?;
    if alpha >= 1.0 {
        return Ok(0.0);
    }
    Ok(2.0 / k_bar * (1.0 - alpha * alpha).sqrt())
}

/// Large-K̄ stability thresholds in Δh = 1 − H²K̄²/4:
/// `Δh = 1/(4K̄²) ± √(1/(16K̄⁴) − α²)`, returned as `(low, high)`.
///
/// `None` when the discriminant is negative, i.e. beyond the band
/// termination wavenumber.
pub fn large_k_thresholds(k_bar: f64, alpha: f64) -> Result<Option<(f64, f64)>> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("alpha", alpha)?;
    let k2 = k_bar * k_bar;
    let disc = 1.0 / (16.0 * k2 * k2) - alpha * alpha;
    if disc < 0.0 {
        return Ok(None);
    }
    let mid = 1.0 / (4.0 * k2);
    Ok(Some((mid - disc.sqrt(), mid + disc.sqrt())))
}

/// Wavenumber at which broadening terminates the large-K̄ instability band:
/// `K̄ = 1/(2√α)`.
pub fn large_k_termination(alpha: f64) -> Result<f64> {
    require_positive("alpha", alpha)?;
    Ok(1.0 / (2.0 * alpha.sqrt()))
}

/// Maximum of the two-stream growth rate over H at fixed K̄ and α.
///
/// The interior optimum of the exact minus branch sits at
/// `H² = (16K̄⁴ − 8K̄² − 1)/(4K̄⁶)` where the growth is `1/(4K̄) − αK̄`; for
/// smaller K̄ the optimum is at H = 0. Used to locate the unstable region's
/// large-K̄ termination without a 2-D scan.
pub fn max_growth_over_h(k_bar: f64, alpha: f64) -> Result<f64> {
    require_positive("k_bar", k_bar)?;
    require_nonnegative("alpha", alpha)?;
    let k2 = k_bar * k_bar;
    let s = (16.0 * k2 * k2 - 8.0 * k2 - 1.0) / (4.0 * k2 * k2 * k2);
    if s <= 0.0 {
        return two_stream_growth(k_bar, 0.0, alpha);
    }
    let interior = two_stream_growth(k_bar, s.sqrt(), alpha)?;
    let edge = two_stream_growth(k_bar, 0.0, alpha)?;
    Ok(interior.max(edge))
}
