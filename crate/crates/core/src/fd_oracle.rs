//! Finite-difference cross-check for `lambda_1`: a cell-centered tridiagonal
//! discretization whose smallest eigenvalue is found by Sturm bisection, then
//! Richardson-extrapolated over three grids.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::abs;
use crate::model::{BoundarySpec, GrowthPair, ZoneLayout};

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    TooFewCells(usize),
    InvalidTolerance(f64),
    /// Successive grid differences did not shrink by at least a factor 2.
    NonConvergent { coarse_diff: f64, fine_diff: f64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewCells(n) => write!(f, "need at least 16 cells, got {n}"),
            Self::InvalidTolerance(t) => write!(f, "tolerance must be > 0, got {t}"),
            Self::NonConvergent { coarse_diff, fine_diff } => write!(
                f,
                "grid refinement did not converge: differences {coarse_diff:e} then {fine_diff:e}"
            ),
        }
    }
}

impl core::error::Error for OracleError {}

pub const MIN_CELLS: usize = 16;

/// Integral of the piecewise-constant potential against the linear weight
/// `1 - |x - c| / h` over `[x0, x1]`, a subset of one side of the hat.
fn weighted_integral(x0: f64, x1: f64, c: f64, h: f64, zone: (f64, f64), pots: (f64, f64)) -> f64 {
    let mut cuts = [x0, x1, x1, x1];
    let mut k = 1;
    for p in [zone.0, zone.1] {
        if p > x0 && p < x1 {
            cuts[k] = p;
            k += 1;
        }
    }
    cuts[k] = x1;
    cuts[..=k].sort_by(f64::total_cmp);
    let antideriv = |x: f64| {
        let t = x - c;
        x - t * abs(t) / (2.0 * h)
    };
    let mut s = 0.0;
    for w in cuts[..=k].windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let mid = 0.5 * (p + q);
        let v = if mid >= zone.0 && mid <= zone.1 { pots.0 } else { pots.1 };
        s += v * (antideriv(q) - antideriv(p));
    }
    s
}

fn flat_integral(x0: f64, x1: f64, zone: (f64, f64), pots: (f64, f64)) -> f64 {
    let overlap = (x1.min(zone.1) - x0.max(zone.0)).max(0.0);
    overlap * pots.0 + (x1 - x0 - overlap) * pots.1
}

/// Ghost-value ratio `phi_ghost / phi_edge` from the boundary row written at
/// the habitat end, halfway between the edge cell center and its ghost.
fn ghost_ratio(flux: f64, value: f64, h: f64) -> f64 {
    (flux / h - value / 2.0) / (flux / h + value / 2.0)
}

/// Assembles `-phi'' + H phi` on `n` cells of width `L/n`.
///
/// The potential in each row is its average against the hat function of that
/// cell center, which keeps second-order accuracy across the zone edges.
pub fn assemble(
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    n: usize,
) -> Result<Tridiag, OracleError> {
    if n < MIN_CELLS {
        return Err(OracleError::TooFewCells(n));
    }
    let habitat = layout.habitat();
    let h = habitat / n as f64;
    let inv_h2 = 1.0 / (h * h);
    let zone = (layout.alpha(), layout.zone_end());
    let pots = (-growth.fp0(), -growth.gp0());

    let mut diag = vec![0.0; n];
    for (i, d) in diag.iter_mut().enumerate() {
        let c = (i as f64 + 0.5) * h;
        let left = if i == 0 {
            flat_integral(0.0, c, zone, pots)
        } else {
            weighted_integral(c - h, c, c, h, zone, pots)
        };
        let right = if i + 1 == n {
            flat_integral(c, habitat, zone, pots)
        } else {
            weighted_integral(c, c + h, c, h, zone, pots)
        };
        *d = 2.0 * inv_h2 + (left + right) / h;
    }
    diag[0] -= ghost_ratio(bc.a1, bc.a2, h) * inv_h2;
    diag[n - 1] -= ghost_ratio(bc.b1, bc.b2, h) * inv_h2;
    Ok(Tridiag { diag, off: vec![-inv_h2; n - 1], h })
}

/// Number of eigenvalues of `t` strictly below `x`.
pub fn sturm_count(t: &Tridiag, x: f64) -> usize {
    let scale = t.diag.iter().map(|d| abs(*d)).fold(0.0, f64::max).max(1.0);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
    let mut count = 0;
    let mut d = t.diag[0] - x;
    if abs(d) < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..t.diag.len() {
        let e = t.off[i - 1];
        d = (t.diag[i] - x) - e * e / d;
        if abs(d) < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin enclosure of the spectrum, padded outward.
pub fn gershgorin(t: &Tridiag) -> (f64, f64) {
    let n = t.diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { abs(t.off[i - 1]) } else { 0.0 } + if i + 1 < n { abs(t.off[i]) } else { 0.0 };
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    let pad = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) * n as f64;
    (lo - pad, hi + pad)
}

/// Smallest eigenvalue by Sturm bisection to bracket width `tol`.
pub fn smallest_eig(t: &Tridiag, tol: f64) -> f64 {
    let (mut lo, mut hi) = gershgorin(t);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(t, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    /// Richardson-extrapolated eigenvalue.
    pub value: f64,
    /// `|lambda(2n) - lambda(n)|`.
    pub err_estimate: f64,
    pub n: usize,
    /// Raw eigenvalues at `n/2`, `n`, `2n` cells.
    pub levels: [f64; 3],
}

/// Cells used by [`oracle_eigenvalue`] for the middle grid.
pub const DEFAULT_CELLS: usize = 4096;

/// Differences below this are indistinguishable from bisection round-off.
const NOISE_FLOOR: f64 = 1e-9;

/// Extrapolated smallest eigenvalue at the default resolution.
pub fn oracle_eigenvalue(
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    tol: f64,
) -> Result<OracleEstimate, OracleError> {
    oracle_eigenvalue_at(layout, bc, growth, tol, DEFAULT_CELLS)
}

/// As [`oracle_eigenvalue`] with an explicit middle grid of `n` cells.
pub fn oracle_eigenvalue_at(
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    tol: f64,
    n: usize,
) -> Result<OracleEstimate, OracleError> {
    if !(tol > 0.0) {
        return Err(OracleError::InvalidTolerance(tol));
    }
    if n / 2 < MIN_CELLS {
        return Err(OracleError::TooFewCells(n / 2));
    }
    let solve = |m: usize| assemble(layout, bc, growth, m).map(|t| smallest_eig(&t, tol));
    let levels = [solve(n / 2)?, solve(n)?, solve(2 * n)?];
    let coarse_diff = abs(levels[1] - levels[0]);
    let fine_diff = abs(levels[2] - levels[1]);
    let settled = coarse_diff <= NOISE_FLOOR && fine_diff <= NOISE_FLOOR;
    if !settled && !(coarse_diff >= 2.0 * fine_diff) {
        return Err(OracleError::NonConvergent { coarse_diff, fine_diff });
    }
    Ok(OracleEstimate {
        value: levels[2] + (levels[2] - levels[1]) / 3.0,
        err_estimate: fine_diff,
        n,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{sqrt, PI};

    fn growth() -> GrowthPair {
        GrowthPair::cubic_logistic(0.2, 0.1).unwrap()
    }

    #[test]
    fn three_by_three() {
        let t = Tridiag { diag: vec![2.0; 3], off: vec![-1.0; 2], h: 1.0 };
        assert!((smallest_eig(&t, 1e-14) - (2.0 - sqrt(2.0))).abs() < 1e-13);
        assert_eq!(sturm_count(&t, 1.0), 1);
        assert_eq!(sturm_count(&t, 2.5), 2);
    }

    #[test]
    fn diagonal_matrix() {
        let t = Tridiag { diag: vec![0.7; 20], off: vec![0.0; 19], h: 1.0 };
        assert!((smallest_eig(&t, 1e-14) - 0.7).abs() < 1e-13);
    }

    #[test]
    fn gershgorin_counts() {
        let z = ZoneLayout::new(10.0, 2.0, 3.0).unwrap();
        let t = assemble(&z, &BoundarySpec::ND, &growth(), 64).unwrap();
        let (lo, hi) = gershgorin(&t);
        assert_eq!(sturm_count(&t, lo), 0);
        assert_eq!(sturm_count(&t, hi), 64);
    }

    #[test]
    fn stencil_shape() {
        let z = ZoneLayout::new(10.0, 2.0, 3.0).unwrap();
        let t = assemble(&z, &BoundarySpec::DD, &growth(), 100).unwrap();
        assert_eq!(t.off.len(), 99);
        assert!(t.off.iter().all(|&e| e == -1.0 / (t.h * t.h)));
        assert!(matches!(
            assemble(&z, &BoundarySpec::DD, &growth(), 8),
            Err(OracleError::TooFewCells(8))
        ));
    }

    #[test]
    fn whole_zone_neumann_is_exact() {
        let z = ZoneLayout::new(10.0, 0.0, 10.0).unwrap();
        for n in [16, 100, 1000] {
            let t = assemble(&z, &BoundarySpec::NN, &growth(), n).unwrap();
            assert!((smallest_eig(&t, 1e-14) + 0.2).abs() < 1e-10);
        }
        let est = oracle_eigenvalue(&z, &BoundarySpec::NN, &growth(), 1e-14).unwrap();
        assert!((est.value + 0.2).abs() < 1e-10);
    }

    #[test]
    fn vanishing_zone_dirichlet() {
        let g = growth();
        let n = 1024;
        let h = 10.0 / n as f64;
        let z = ZoneLayout::new(10.0, 0.0, h / 1000.0).unwrap();
        let t = assemble(&z, &BoundarySpec::DD, &g, n).unwrap();
        let expect = PI * PI / 100.0 - g.gp0();
        assert!((smallest_eig(&t, 1e-14) - expect).abs() < 1e-5);
    }
}
