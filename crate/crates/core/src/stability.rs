//! Stability maps over the (K̄, H) plane at fixed broadening α: per-cell
//! classification, growth rates, traced zero-growth boundary curves, and
//! unstable-band reports along K̄ at fixed H.
//!
//! Classification uses the closed-form two-stream branch from
//! [`crate::analytic`]; the growth rate is cheap, so boundaries are refined
//! by bisection on the true function rather than interpolated.

use crate::analytic;
use crate::error::{Error, Result};

/// Growth above this threshold classifies a cell unstable; marginal points
/// are stable.
pub const GROWTH_TOL: f64 = 1e-12;

/// Required |Im Ω̄| at every traced boundary point.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Position tolerance of bisection refinements.
const POSITION_TOL: f64 = 1e-10;

/// Stability class of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Stable,
    Unstable,
}

/// One traced zero-growth curve in the (K̄, H) plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundaryCurve {
    pub points: Vec<(f64, f64)>,
}

/// Grid of classifications and growth rates, plus traced boundary curves.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMap {
    pub k_axis: Vec<f64>,
    pub h_axis: Vec<f64>,
    pub alpha: f64,
    /// Row-major `[h][k]`: growth rate max(Im Ω̄, 0) per cell.
    pub growth: Vec<f64>,
    /// Row-major `[h][k]` classifications.
    pub class: Vec<Classification>,
    pub boundaries: Vec<BoundaryCurve>,
}

impl StabilityMap {
    pub fn cell(&self, ik: usize, ih: usize) -> (Classification, f64) {
        let idx = ih * self.k_axis.len() + ik;
        (self.class[idx], self.growth[idx])
    }
}

/// Classify one (K̄, H, α) point: unstable iff Im Ω̄ exceeds [`GROWTH_TOL`];
/// the reported growth rate is clamped at zero.
pub fn classify(k_bar: f64, h: f64, alpha: f64) -> Result<(Classification, f64)> {
    let im = analytic::two_stream_growth(k_bar, h, alpha)?;
    if im > GROWTH_TOL {
        Ok((Classification::Unstable, im))
    } else {
        Ok((Classification::Stable, 0.0))
    }
}

/// Build a uniform grid over `(0, k_max] × [0, h_max]`.
pub fn uniform_axes(k_max: f64, h_max: f64, nk: usize, nh: usize) -> (Vec<f64>, Vec<f64>) {
    let k_axis = (1..=nk).map(|i| k_max * i as f64 / nk as f64).collect();
    let h_axis = (0..nh).map(|j| h_max * j as f64 / (nh - 1) as f64).collect();
    (k_axis, h_axis)
}

/// Classify every cell of the grid and trace the zero-growth boundary by
/// bisection between adjacent cells of opposite class.
pub fn build_map(k_axis: &[f64], h_axis: &[f64], alpha: f64) -> Result<StabilityMap> {
    if k_axis.len() < 2 || h_axis.len() < 2 {
        return Err(Error::bad_param(
            "grid",
            k_axis.len().min(h_axis.len()) as f64,
            "need at least 2 points per axis",
        ));
    }
    for axis in [k_axis, h_axis] {
        for w in axis.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::bad_param(
                    "grid",
                    w[1],
                    "axes must be strictly increasing",
                ));
            }
        }
    }
    if !(alpha >= 0.0) {
        return Err(Error::bad_param("alpha", alpha, "must be non-negative"));
    }

    let nk = k_axis.len();
    let nh = h_axis.len();
    let mut growth = vec![0.0; nk * nh];
    let mut class = vec![Classification::Stable; nk * nh];
    for (ih, &h) in h_axis.iter().enumerate() {
        for (ik, &k) in k_axis.iter().enumerate() {
            let (c, g) = classify(k, h, alpha)?;
            growth[ih * nk + ik] = g;
            class[ih * nk + ik] = c;
        }
    }

    // Boundary points on cell edges joining opposite classes.
    let unstable = |ik: usize, ih: usize| class[ih * nk + ik] == Classification::Unstable;
    let mut raw_points: Vec<(f64, f64)> = Vec::new();
    for ih in 0..nh {
        for ik in 0..nk {
            if ik + 1 < nk && unstable(ik, ih) != unstable(ik + 1, ih) {
                let h = h_axis[ih];
                let k = refine_edge(|k| signed_growth(k, h, alpha), k_axis[ik], k_axis[ik + 1])?;
                raw_points.push((k, h));
            }
            if ih + 1 < nh && unstable(ik, ih) != unstable(ik, ih + 1) {
                let k = k_axis[ik];
                let h = refine_edge(|h| signed_growth(k, h, alpha), h_axis[ih], h_axis[ih + 1])?;
                raw_points.push((k, h));
            }
        }
    }

    let boundaries = chain_points(raw_points, k_axis, h_axis);
    Ok(StabilityMap {
        k_axis: k_axis.to_vec(),
        h_axis: h_axis.to_vec(),
        alpha,
        growth,
        class,
        boundaries,
    })
}

fn signed_growth(k: f64, h: f64, alpha: f64) -> f64 {
    analytic::two_stream_growth(k, h, alpha).unwrap_or(f64::NAN)
}

/// Bisect a sign change of `f` (in the `> GROWTH_TOL` sense) down to
/// [`POSITION_TOL`], returning the endpoint with the smaller |f|.
fn refine_edge<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Result<f64> {
    let fa = f(a);
    let unstable_a = fa > GROWTH_TOL;
    for _ in 0..200 {
        if (b - a).abs() < POSITION_TOL {
            break;
        }
        let mid = 0.5 * (a + b);
        if (f(mid) > GROWTH_TOL) == unstable_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    // Pick the side with the smaller residual growth magnitude.
    let (ga, gb) = (f(a), f(b));
    let point = if ga.abs() <= gb.abs() { a } else { b };
    let residual = ga.abs().min(gb.abs());
    if residual >= BOUNDARY_TOL {
        return Err(Error::bad_param(
            "boundary",
            residual,
            "bisection could not reach the boundary tolerance",
        ));
    }
    Ok(point)
}

/// Chain loose boundary points into polylines by nearest-neighbor walks with
/// a grid-scale linking distance.
fn chain_points(
    mut points: Vec<(f64, f64)>,
    k_axis: &[f64],
    h_axis: &[f64],
) -> Vec<BoundaryCurve> {
    let dk = (k_axis[k_axis.len() - 1] - k_axis[0]) / (k_axis.len() - 1) as f64;
    let dh = (h_axis[h_axis.len() - 1] - h_axis[0]) / (h_axis.len() - 1) as f64;
    let link2 = 4.0 * (dk * dk + dh * dh);
    let mut curves = Vec::new();
    while let Some(start) = points.pop() {
        let mut curve = vec![start];
        // Grow both ends greedily.
        loop {
            let tail = *curve.last().unwrap();
            let next = nearest_within(&points, tail, link2);
            match next {
                Some(i) => curve.push(points.swap_remove(i)),
                None => break,
            }
        }
        loop {
            let head = curve[0];
            let next = nearest_within(&points, head, link2);
            match next {
                Some(i) => curve.insert(0, points.swap_remove(i)),
                None => break,
            }
        }
        curves.push(BoundaryCurve { points: curve });
    }
    // Deterministic order: by first point, K̄ then H.
    curves.sort_by(|a, b| {
        a.points[0]
            .partial_cmp(&b.points[0])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    curves
}

fn nearest_within(points: &[(f64, f64)], to: (f64, f64), max_d2: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        let d2 = (p.0 - to.0).powi(2) + (p.1 - to.1).powi(2);
        if d2 <= max_d2 && best.map_or(true, |(_, bd)| d2 < bd) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, _)| i)
}

/// Unstable K̄ intervals at fixed (H, α), located by a scan over `n_scan`
/// points of `[k_lo, k_hi]` and refined by bisection.
///
/// `k_lo = 0` is allowed; the growth rate is zero there by definition.
pub fn band_report(
    h: f64,
    alpha: f64,
    k_lo: f64,
    k_hi: f64,
    n_scan: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(k_lo >= 0.0) || !(k_hi > k_lo) {
        return Err(Error::bad_param("k_range", k_hi, "need 0 ≤ k_lo < k_hi"));
    }
    if n_scan < 8 {
        return Err(Error::bad_param(
            "n_scan",
            n_scan as f64,
            "need at least 8 scan points",
        ));
    }
    let grid: Vec<f64> = (0..=n_scan)
        .map(|i| k_lo + (k_hi - k_lo) * i as f64 / n_scan as f64)
        .collect();
    let f = |k: f64| signed_growth(k, h, alpha);

    let mut bands: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = if f(grid[0]) > GROWTH_TOL {
        Some(grid[0])
    } else {
        None
    };
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ua = f(a) > GROWTH_TOL;
        let ub = f(b) > GROWTH_TOL;
        if ua == ub {
            continue;
        }
        let edge = refine_band_edge(&f, a, b);
        if ub {
            open = Some(edge);
        } else if let Some(start) = open.take() {
            bands.push((start, edge));
        }
    }
    if let Some(start) = open {
        bands.push((start, grid[n_scan]));
    }
    Ok(bands)
}

/// Bisect a band edge to 1e-8 in position.
fn refine_band_edge<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let ua = f(a) > GROWTH_TOL;
    while (b - a).abs() > 1e-8 {
        let mid = 0.5 * (a + b);
        if (f(mid) > GROWTH_TOL) == ua {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
