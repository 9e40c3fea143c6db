//! Physical and dimensionless parameter types, background momentum spectra,
//! and the unit conversions shared by every other module.
//!
//! All stability analysis downstream of this module runs in dimensionless
//! variables
//!
//! ```text
//!   Ω̄ = Ω / ω_p0,   K̄ = p₀ K / (ω_p0 m),   H = ħ ω_p0 m / p₀²,   α = p_T / p₀,
//! ```
//!
//! where `ω_p0² = n₀ e² / (m ε₀)` is the plasma frequency of the **total**
//! electron density `n₀` and `p₀` is the reference drift momentum. SI
//! quantities enter only through [`to_dimensionless`] / [`from_dimensionless`];
//! this keeps the ħ/ε₀ magnitude hazards at the boundary of the library.
//!
//! A background is a list of streams. Each stream is either a `Delta` line at
//! its drift momentum (a monoenergetic beam) or a `Lorentzian` of half-width
//! `p_T` (a beam whose wave-function phase decorrelates exponentially with
//! separation). Delta streams are handled analytically everywhere; they are
//! never sampled pointwise.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Relative tolerance for the quasineutrality check Σⱼ n₀ⱼ = n₀.
pub const QUASINEUTRALITY_TOL: f64 = 1e-9;

/// Relative tolerance of the dimensionless round-trip conversion.
pub const ROUND_TRIP_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Physical parameters
// ---------------------------------------------------------------------------

/// SI parameters of the plasma: particle constants plus the fixed neutralizing
/// ion background density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Electron mass m (kg).
    pub electron_mass: f64,
    /// Elementary charge e (C); the electron carries −e.
    pub elementary_charge: f64,
    /// Vacuum permittivity ε₀ (F/m).
    pub vacuum_permittivity: f64,
    /// Reduced Planck constant ħ (J·s).
    pub reduced_planck: f64,
    /// Ion background density n₀ (1/m³).
    pub ion_density: f64,
}

impl PhysicalParams {
    /// Validating constructor: every field must be strictly positive and the
    /// derived plasma frequency finite.
    pub fn new(
        electron_mass: f64,
        elementary_charge: f64,
        vacuum_permittivity: f64,
        reduced_planck: f64,
        ion_density: f64,
    ) -> Result<Self> {
        let fields = [
            ("electron_mass", electron_mass),
            ("elementary_charge", elementary_charge),
            ("vacuum_permittivity", vacuum_permittivity),
            ("reduced_planck", reduced_planck),
            ("ion_density", ion_density),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::bad_param(name, value, "must be strictly positive"));
            }
        }
        let params = Self {
            electron_mass,
            elementary_charge,
            vacuum_permittivity,
            reduced_planck,
            ion_density,
        };
        let wp = params.plasma_frequency();
        if !wp.is_finite() || wp <= 0.0 {
            return Err(Error::bad_param(
                "ion_density",
                ion_density,
                "derived plasma frequency is not finite and positive",
            ));
        }
        Ok(params)
    }

    /// CODATA-2018 electron constants with a caller-chosen density.
    pub fn electron(ion_density: f64) -> Result<Self> {
        Self::new(
            9.109_383_7015e-31,
            1.602_176_634e-19,
            8.854_187_8128e-12,
            1.054_571_817e-34,
            ion_density,
        )
    }

    /// Natural-unit parameters (everything 1); handy in tests.
    pub fn unit() -> Self {
        Self {
            electron_mass: 1.0,
            elementary_charge: 1.0,
            vacuum_permittivity: 1.0,
            reduced_planck: 1.0,
            ion_density: 1.0,
        }
    }

    /// Plasma frequency of the total density, ω_p0 = √(n₀ e² / (m ε₀)).
    pub fn plasma_frequency(&self) -> f64 {
        (self.ion_density * self.elementary_charge * self.elementary_charge
            / (self.electron_mass * self.vacuum_permittivity))
            .sqrt()
    }
}

// ---------------------------------------------------------------------------
// Stream spectra and backgrounds
// ---------------------------------------------------------------------------

/// Shape of one background stream in momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Monoenergetic beam: a delta line at the drift momentum (width 0).
    Delta,
    /// Lorentzian of half-width `width` around the drift momentum.
    Lorentzian,
}

/// One background stream: density, drift momentum, and spectral width.
///
/// Units are the caller's choice (SI or dimensionless); the invariant
/// `kind == Delta ⟺ width == 0` is enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamSpectrum {
    density: f64,
    drift: f64,
    width: f64,
    kind: SpectrumKind,
}

impl StreamSpectrum {
    /// A monoenergetic (zero-width) stream.
    pub fn delta(density: f64, drift: f64) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::bad_param("density", density, "must be positive"));
        }
        Ok(Self {
            density,
            drift,
            width: 0.0,
            kind: SpectrumKind::Delta,
        })
    }

    /// A Lorentzian stream of half-width `width > 0`.
    pub fn lorentzian(density: f64, drift: f64, width: f64) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::bad_param("density", density, "must be positive"));
        }
        if !(width > 0.0) {
            return Err(Error::bad_param(
                "width",
                width,
                "Lorentzian width must be positive (use delta for width 0)",
            ));
        }
        Ok(Self {
            density,
            drift,
            width,
            kind: SpectrumKind::Lorentzian,
        })
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    /// Exact integral of the spectrum over all momenta (= the density, for
    /// both kinds; the Lorentzian normalization is analytic).
    pub fn integral(&self) -> f64 {
        self.density
    }

    /// Rescale into another unit system: densities by `1/density_scale`,
    /// momenta by `1/momentum_scale`.
    pub fn scaled(&self, density_scale: f64, momentum_scale: f64) -> Self {
        Self {
            density: self.density / density_scale,
            drift: self.drift / momentum_scale,
            width: self.width / momentum_scale,
            kind: self.kind,
        }
    }
}

/// Pointwise value of a Lorentzian stream spectrum,
/// `(n₀ⱼ/π) p_Tⱼ / ((p − p₀ⱼ)² + p_Tⱼ²)`.
///
/// Delta streams are rejected: they are handled analytically, never sampled.
pub fn lorentzian_value(stream: &StreamSpectrum, p: f64) -> Result<f64> {
    if stream.kind == SpectrumKind::Delta {
        return Err(Error::DeltaStream(
            "lorentzian_value cannot sample a delta spectrum pointwise",
        ));
    }
    let dp = p - stream.drift;
    Ok(stream.density / std::f64::consts::PI * stream.width / (dp * dp + stream.width * stream.width))
}

/// An ordered list of streams making up the unperturbed background.
///
/// Quasineutrality against the fixed ion density (Σⱼ n₀ⱼ = n₀) is enforced at
/// construction to within [`QUASINEUTRALITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Background {
    streams: Vec<StreamSpectrum>,
    total_density: f64,
}

impl Background {
    pub fn new(streams: Vec<StreamSpectrum>, total_density: f64) -> Result<Self> {
        if streams.is_empty() {
            return Err(Error::bad_param(
                "streams",
                0.0,
                "background needs at least one stream",
            ));
        }
        if !(total_density > 0.0) {
            return Err(Error::bad_param(
                "total_density",
                total_density,
                "must be positive",
            ));
        }
        let sum: f64 = streams.iter().map(|s| s.density).sum();
        if ((sum - total_density) / total_density).abs() > QUASINEUTRALITY_TOL {
            return Err(Error::Quasineutrality {
                sum,
                total: total_density,
            });
        }
        Ok(Self {
            streams,
            total_density,
        })
    }

    /// Dimensionless single cold beam: unit density fraction, drift +1.
    pub fn one_stream_cold() -> Self {
        Self {
            streams: vec![StreamSpectrum::delta(1.0, 1.0).unwrap()],
            total_density: 1.0,
        }
    }

    /// Dimensionless single Lorentzian beam with relative broadening `alpha`.
    pub fn one_stream_lorentzian(alpha: f64) -> Result<Self> {
        Ok(Self {
            streams: vec![StreamSpectrum::lorentzian(1.0, 1.0, alpha)?],
            total_density: 1.0,
        })
    }

    /// Dimensionless symmetric cold pair: half density each, drifts ±1.
    pub fn two_stream_cold() -> Self {
        Self {
            streams: vec![
                StreamSpectrum::delta(0.5, 1.0).unwrap(),
                StreamSpectrum::delta(0.5, -1.0).unwrap(),
            ],
            total_density: 1.0,
        }
    }

    /// Dimensionless symmetric Lorentzian pair with equal broadening `alpha`.
    pub fn two_stream_lorentzian(alpha: f64) -> Result<Self> {
        Ok(Self {
            streams: vec![
                StreamSpectrum::lorentzian(0.5, 1.0, alpha)?,
                StreamSpectrum::lorentzian(0.5, -1.0, alpha)?,
            ],
            total_density: 1.0,
        })
    }

    pub fn streams(&self) -> &[StreamSpectrum] {
        &self.streams
    }

    pub fn total_density(&self) -> f64 {
        self.total_density
    }

    /// Density fraction fⱼ = n₀ⱼ/n₀ of stream `j`.
    pub fn fraction(&self, j: usize) -> f64 {
        self.streams[j].density / self.total_density
    }

    /// True if any stream is a delta line.
    pub fn has_delta(&self) -> bool {
        self.streams.iter().any(|s| s.kind == SpectrumKind::Delta)
    }

    /// Same stream structure (densities, drifts) with every width replaced
    /// by `alpha` — delta lines at α = 0, Lorentzians otherwise. Used when
    /// sweeping the broadening as a parameter.
    pub fn with_broadening(&self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::bad_param("alpha", alpha, "must be non-negative"));
        }
        let streams = self
            .streams
            .iter()
            .map(|s| {
                if alpha > 0.0 {
                    StreamSpectrum::lorentzian(s.density, s.drift, alpha)
                } else {
                    StreamSpectrum::delta(s.density, s.drift)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            streams,
            total_density: self.total_density,
        })
    }

    /// Convert an SI background into dimensionless form: densities as
    /// fractions of the total, momenta in units of `p0`.
    pub fn to_dimensionless(&self, p0: f64) -> Result<Self> {
        if !(p0 > 0.0) {
            return Err(Error::bad_param(
                "p0",
                p0,
                "reference drift momentum must be positive",
            ));
        }
        Ok(Self {
            streams: self
                .streams
                .iter()
                .map(|s| s.scaled(self.total_density, p0))
                .collect(),
            total_density: 1.0,
        })
    }
}

// ---------------------------------------------------------------------------
// Dimensionless parameters
// ---------------------------------------------------------------------------

/// Which square-root branch of a dispersion relation is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchSign {
    #[default]
    Plus,
    Minus,
}

/// The dimensionless parameter triple (K̄, H, α) plus a branch selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    /// Normalized wavenumber K̄ = p₀K/(ω_p0 m) > 0.
    pub k_bar: f64,
    /// Quantum parameter H = ħω_p0 m/p₀² ≥ 0.
    pub h: f64,
    /// Relative broadening α = p_T/p₀ ≥ 0.
    pub alpha: f64,
    /// Square-root branch selector carried along for dispersion calls.
    pub branch: BranchSign,
}

impl DimensionlessParams {
    pub fn new(k_bar: f64, h: f64, alpha: f64, branch: BranchSign) -> Result<Self> {
        if !(k_bar > 0.0) {
            return Err(Error::bad_param("k_bar", k_bar, "must be positive"));
        }
        if !(h >= 0.0) {
            return Err(Error::bad_param("h", h, "must be non-negative"));
        }
        if !(alpha >= 0.0) {
            return Err(Error::bad_param("alpha", alpha, "must be non-negative"));
        }
        Ok(Self {
            k_bar,
            h,
            alpha,
            branch,
        })
    }
}

/// Map SI inputs to the dimensionless triple:
/// K̄ = p₀K/(ω_p0 m), H = ħω_p0 m/p₀², α = p_T/p₀.
///
/// `p0` is the reference drift momentum; it sets the normalization scale and
/// must be positive (zero drift leaves the normalization undefined).
pub fn to_dimensionless(
    phys: &PhysicalParams,
    wavenumber: f64,
    p0: f64,
    p_t: f64,
) -> Result<DimensionlessParams> {
    if p0 == 0.0 {
        return Err(Error::bad_param(
            "p0",
            p0,
            "zero drift momentum: normalization undefined",
        ));
    }
    if !(p0 > 0.0) {
        return Err(Error::bad_param(
            "p0",
            p0,
            "reference drift momentum must be positive",
        ));
    }
    if !(wavenumber > 0.0) {
        return Err(Error::bad_param(
            "wavenumber",
            wavenumber,
            "must be positive",
        ));
    }
    if !(p_t >= 0.0) {
        return Err(Error::bad_param("p_t", p_t, "must be non-negative"));
    }
    let wp = phys.plasma_frequency();
    let m = phys.electron_mass;
    DimensionlessParams::new(
        p0 * wavenumber / (wp * m),
        phys.reduced_planck * wp * m / (p0 * p0),
        p_t / p0,
        BranchSign::Plus,
    )
}

/// Inverse of [`to_dimensionless`]: recover (K, p₀, p_T) from (K̄, H, α).
///
/// Requires H > 0 — at H = 0 the momentum scale cannot be reconstructed.
pub fn from_dimensionless(phys: &PhysicalParams, dims: &DimensionlessParams) -> Result<(f64, f64, f64)> {
    if !(dims.h > 0.0) {
        return Err(Error::bad_param(
            "h",
            dims.h,
            "inverse conversion needs H > 0 to fix the momentum scale",
        ));
    }
    let wp = phys.plasma_frequency();
    let m = phys.electron_mass;
    let p0 = (phys.reduced_planck * wp * m / dims.h).sqrt();
    let k = dims.k_bar * wp * m / p0;
    let p_t = dims.alpha * p0;
    Ok((k, p0, p_t))
}

// ---------------------------------------------------------------------------
// Spectrum from the phase correlation function
// ---------------------------------------------------------------------------

/// Numerically Fourier-transform the exponential phase-correlation function
/// `C(s) = exp(−p_T |s|)` onto the given momentum grid, for a unit-density
/// stream drifting at `p0`.
///
/// The separation variable `s` is conjugate to momentum (`e^{i(p−p₀)s}` pairs
/// them), so the result is the spectrum the correlation decay implies — a
/// Lorentzian of half-width `p_T`. This routine exists purely as an
/// FFT-route oracle for [`lorentzian_value`]; it shares no code with it.
///
/// The grid must be uniform, symmetric about `p0`, of even length, and fine
/// enough to put at least 8 points across the width `p_T`.
pub fn spectrum_from_correlation(p_t: f64, p0: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(p_t > 0.0) {
        return Err(Error::bad_param("p_t", p_t, "must be positive"));
    }
    let n = grid.len();
    if n < 16 || n % 2 != 0 {
        return Err(Error::bad_param(
            "grid",
            n as f64,
            "need an even grid of at least 16 points",
        ));
    }
    let dp = grid[1] - grid[0];
    if !(dp > 0.0) {
        return Err(Error::bad_param("grid", dp, "grid must be increasing"));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - dp).abs() > 1e-9 * dp {
            return Err(Error::bad_param("grid", w[1] - w[0], "grid must be uniform"));
        }
    }
    // Symmetric about p0 in the FFT sense: the point at index n/2 is p0.
    if (grid[n / 2] - p0).abs() > 1e-9 * dp.max(p0.abs()) {
        return Err(Error::bad_param(
            "grid",
            grid[n / 2],
            "grid must be centered on the drift momentum (grid[n/2] == p0)",
        ));
    }
    let points_per_width = p_t / dp;
    if points_per_width < 8.0 {
        return Err(Error::GridTooCoarse {
            points_per_width,
            required: 8,
        });
    }

    // Conjugate grid s_k = (k − n/2)·ds with ds = 2π/(n·dp); sample the
    // correlation and apply a centered DFT:
    //   W(p_j) = (1/2π) Σ_k exp(i (p_j − p0) s_k) C(s_k) ds.
    // With q_j = (j − n/2)·dp the phase is 2π (j − n/2)(k − n/2)/n, which an
    // FFT handles after re-centering both indices.
    let ds = 2.0 * std::f64::consts::PI / (n as f64 * dp);
    let half = n / 2;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| {
            // ifftshift: buffer index k holds centered index (k + half) mod n.
            let centered = ((k + half) % n) as f64 - half as f64;
            Complex64::new((-p_t * (centered * ds).abs()).exp(), 0.0)
        })
        .collect();

    let mut planner = FftPlanner::new();
    // Inverse FFT gives the e^{+i·} phase convention used above.
    let fft = planner.plan_fft_inverse(n);
    fft.process(&mut buf);

    // fftshift back to centered order; fftshift ∘ FFT ∘ ifftshift is exactly
    // the centered DFT, so no residual phase factors appear.
    let scale = ds / (2.0 * std::f64::consts::PI);
    let mut out: Vec<f64> = (0..n).map(|j| buf[(j + half) % n].re * scale).collect();

    // Euler–Maclaurin endpoint correction for the |s| kink of the sampled
    // correlation: the plain Riemann sum carries a p-independent excess of
    // p_T·Δs²/(12π). Valid while the sampling resolves the decay (p_T·Δs
    // small); beyond that the raw sum is returned as-is.
    if p_t * ds < 0.5 {
        let kink = p_t * ds * ds / (12.0 * std::f64::consts::PI);
        for w in &mut out {
            *w -= kink;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_stream(width: f64) -> StreamSpectrum {
        StreamSpectrum::lorentzian(1.0, 1.0, width).unwrap()
    }

    #[test]
    fn plasma_frequency_unit_system() {
        let phys = PhysicalParams::unit();
        assert_eq!(phys.plasma_frequency(), 1.0);
    }

    #[test]
    fn physical_params_reject_nonpositive() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn unit_system_gives_unit_dimensionless() {
        let phys = PhysicalParams::unit();
        let dims = to_dimensionless(&phys, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(dims.k_bar, 1.0);
        assert_eq!(dims.h, 1.0);
        assert_eq!(dims.alpha, 0.0);
    }

    #[test]
    fn zero_width_gives_zero_alpha() {
        let phys = PhysicalParams::electron(1e28).unwrap();
        let dims = to_dimensionless(&phys, 1e9, 1e-24, 0.0).unwrap();
        assert_eq!(dims.alpha, 0.0);
        assert!(dims.k_bar > 0.0 && dims.h > 0.0);
    }

    #[test]
    fn zero_drift_is_an_error() {
        let phys = PhysicalParams::unit();
        assert!(matches!(
            to_dimensionless(&phys, 1.0, 0.0, 0.0),
            Err(Error::InvalidParameter { name: "p0", .. })
        ));
    }

    #[test]
    fn round_trip_seeded_sweep() {
        // to_dimensionless ∘ from_dimensionless is the identity on (K̄, H, α).
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let phys = PhysicalParams::new(
                1e-31 * (1.0 + 9.0 * next()),
                1e-19 * (1.0 + 9.0 * next()),
                1e-12 * (1.0 + 9.0 * next()),
                1e-34 * (1.0 + 9.0 * next()),
                1e26 * (1.0 + 99.0 * next()),
            )
            .unwrap();
            let dims = DimensionlessParams::new(
                0.01 + 4.0 * next(),
                0.01 + 4.0 * next(),
                2.0 * next(),
                BranchSign::Plus,
            )
            .unwrap();
            let (k, p0, p_t) = from_dimensionless(&phys, &dims).unwrap();
            let back = to_dimensionless(&phys, k, p0, p_t).unwrap();
            assert!((back.k_bar - dims.k_bar).abs() <= ROUND_TRIP_TOL * dims.k_bar);
            assert!((back.h - dims.h).abs() <= ROUND_TRIP_TOL * dims.h);
            assert!((back.alpha - dims.alpha).abs() <= ROUND_TRIP_TOL * dims.alpha.max(1.0));
        }
    }

    #[test]
    fn lorentzian_peak_value() {
        let s = unit_stream(0.25);
        let peak = lorentzian_value(&s, 1.0).unwrap();
        assert!((peak - 1.0 / (std::f64::consts::PI * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn lorentzian_even_about_drift() {
        let s = unit_stream(0.3);
        for delta in [0.01, 0.1, 0.7, 2.5, 11.0] {
            let a = lorentzian_value(&s, 1.0 + delta).unwrap();
            let b = lorentzian_value(&s, 1.0 - delta).unwrap();
            assert!((a - b).abs() <= 1e-15 * a.abs());
            assert!(a > 0.0);
        }
    }

    #[test]
    fn lorentzian_rejects_delta() {
        let s = StreamSpectrum::delta(1.0, 0.0).unwrap();
        assert!(matches!(
            lorentzian_value(&s, 0.0),
            Err(Error::DeltaStream(_))
        ));
    }

    #[test]
    fn lorentzian_quadrature_normalization() {
        // Trapezoid integral over ±100 widths recovers the density within 1%.
        let s = unit_stream(0.2);
        let (lo, hi) = (1.0 - 100.0 * 0.2, 1.0 + 100.0 * 0.2);
        let n = 200_000;
        let dp = (hi - lo) / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            sum += w * lorentzian_value(&s, lo + i as f64 * dp).unwrap();
        }
        sum *= dp;
        assert!((sum - 1.0).abs() < 0.01, "integral {sum}");
    }

    #[test]
    fn background_quasineutrality_enforced() {
        let s1 = StreamSpectrum::delta(0.5, 1.0).unwrap();
        let s2 = StreamSpectrum::delta(0.6, -1.0).unwrap();
        assert!(matches!(
            Background::new(vec![s1, s2], 1.0),
            Err(Error::Quasineutrality { .. })
        ));
        let s3 = StreamSpectrum::delta(0.5, -1.0).unwrap();
        assert!(Background::new(vec![s1, s3], 1.0).is_ok());
    }

    #[test]
    fn background_stream_integrals_sum_to_total() {
        let bg = Background::two_stream_lorentzian(0.3).unwrap();
        let sum: f64 = bg.streams().iter().map(|s| s.integral()).sum();
        assert!(((sum - bg.total_density()) / bg.total_density()).abs() < QUASINEUTRALITY_TOL);
    }

    #[test]
    fn si_background_to_dimensionless() {
        let n0 = 1e28;
        let p0 = 3e-25;
        let s1 = StreamSpectrum::lorentzian(0.5 * n0, p0, 0.1 * p0).unwrap();
        let s2 = StreamSpectrum::lorentzian(0.5 * n0, -p0, 0.1 * p0).unwrap();
        let bg = Background::new(vec![s1, s2], n0).unwrap();
        let dim = bg.to_dimensionless(p0).unwrap();
        assert_eq!(dim.total_density(), 1.0);
        assert!((dim.streams()[0].drift() - 1.0).abs() < 1e-14);
        assert!((dim.streams()[1].drift() + 1.0).abs() < 1e-14);
        assert!((dim.fraction(0) - 0.5).abs() < 1e-14);
        assert!((dim.streams()[0].width() - 0.1).abs() < 1e-14);
    }

    #[test]
    fn correlation_transform_matches_closed_form() {
        // FFT of exp(−p_T|s|) vs the closed-form Lorentzian, pointwise 1e-6
        // relative on a fine wide grid (out to 20 widths from the peak; the
        // wide span keeps periodization images out of the comparison window).
        let p_t = 0.2;
        let p0 = 1.0;
        let n = 1 << 19;
        let dp = p_t / 10.0;
        let grid: Vec<f64> = (0..n)
            .map(|j| p0 + (j as f64 - (n / 2) as f64) * dp)
            .collect();
        let fftd = spectrum_from_correlation(p_t, p0, &grid).unwrap();
        let s = unit_stream(p_t);
        for (j, &p) in grid.iter().enumerate() {
            if (p - p0).abs() > 20.0 * p_t {
                continue;
            }
            let exact = lorentzian_value(&s, p).unwrap();
            let rel = ((fftd[j] - exact) / exact).abs();
            assert!(
                rel < 1e-6,
                "p = {p}: fft {} vs exact {} (rel {rel:.2e})",
                fftd[j],
                exact
            );
        }
    }

    #[test]
    fn correlation_transform_integral_within_one_percent() {
        let p_t = 0.5;
        let n = 1 << 12;
        let dp = p_t / 10.0;
        let grid: Vec<f64> = (0..n)
            .map(|j| (j as f64 - (n / 2) as f64) * dp)
            .collect();
        let w = spectrum_from_correlation(p_t, 0.0, &grid).unwrap();
        let integral: f64 = w.iter().sum::<f64>() * dp;
        assert!((integral - 1.0).abs() < 0.01, "integral {integral}");
    }

    #[test]
    fn correlation_transform_flattens_with_width() {
        // Larger p_T on a fixed grid → flatter spectrum (max/min shrinks).
        let n = 4096;
        let dp = 0.05;
        let grid: Vec<f64> = (0..n)
            .map(|j| (j as f64 - (n / 2) as f64) * dp)
            .collect();
        let mut last_ratio = f64::INFINITY;
        for p_t in [0.5, 1.0, 2.0, 4.0] {
            let w = spectrum_from_correlation(p_t, 0.0, &grid).unwrap();
            let max = w.iter().cloned().fold(f64::MIN, f64::max);
            let min = w.iter().cloned().fold(f64::MAX, f64::min);
            let ratio = max / min;
            assert!(
                ratio < last_ratio,
                "ratio should shrink monotonically: {ratio} !< {last_ratio}"
            );
            last_ratio = ratio;
        }
    }

    #[test]
    fn correlation_transform_rejects_coarse_grid() {
        let grid: Vec<f64> = (0..64).map(|j| (j as f64 - 32.0) * 0.1).collect();
        assert!(matches!(
            spectrum_from_correlation(0.5, 0.0, &grid),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
