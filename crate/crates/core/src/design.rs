//! Design answers built on `lambda_1`: where to put a zone of given length,
//! how long it must be, and what happens at the best placement.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use crate::baseline::lambda0;
use crate::eigen::{principal_eigenvalue, EigenError};
use crate::math::{sqrt, PI};
use crate::model::{BoundaryKind, BoundarySpec, FateVerdict, GrowthPair, ModelError, ZoneLayout};
use crate::roots::golden_min;
use crate::EIGEN_TOL;

/// Optimal start of a zone of fixed length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaStar {
    /// A single minimizer.
    At(f64),
    /// Two minimizers related by reflection, left one first.
    Pair(f64, f64),
}

impl AlphaStar {
    /// The minimizer used for evaluation; the left one of a pair.
    pub fn primary(&self) -> f64 {
        match *self {
            Self::At(a) | Self::Pair(a, _) => a,
        }
    }
}

fn layout(habitat: f64, alpha: f64, l: f64) -> Result<ZoneLayout, EigenError> {
    ZoneLayout::new(habitat, alpha, l).map_err(|e| EigenError::Baseline(e.into()))
}

fn lambda_at(habitat: f64, alpha: f64, l: f64, bc: &BoundarySpec, growth: &GrowthPair) -> Result<f64, EigenError> {
    Ok(principal_eigenvalue(&layout(habitat, alpha, l)?, bc, growth, EIGEN_TOL)?.lambda1)
}

/// Start `alpha` minimizing `lambda_1(alpha, l)`.
///
/// Neumann/Dirichlet pairs use the known monotone structure. Genuine Robin
/// rows run golden-section searches on the whole range and on each half and
/// keep the best of those and the two ends and midpoint.
pub fn optimal_alpha(
    l: f64,
    habitat: f64,
    bc: &BoundarySpec,
    growth: &GrowthPair,
) -> Result<AlphaStar, EigenError> {
    layout(habitat, 0.0, l)?;
    let top = (habitat - l).max(0.0);
    use BoundaryKind::*;
    match bc.kinds() {
        (Neumann, Neumann) if top > 0.0 => return Ok(AlphaStar::Pair(0.0, top)),
        (Neumann, Neumann) => return Ok(AlphaStar::At(0.0)),
        (Dirichlet, Dirichlet) => return Ok(AlphaStar::At(top / 2.0)),
        (Neumann, Dirichlet) => return Ok(AlphaStar::At(0.0)),
        (Dirichlet, Neumann) => return Ok(AlphaStar::At(top)),
        _ => {}
    }
    if top == 0.0 {
        return Ok(AlphaStar::At(0.0));
    }
    let tol = 1e-6 * habitat;
    let mut failure = None;
    let mut f = |a: f64| match lambda_at(habitat, a.clamp(0.0, top), l, bc, growth) {
        Ok(v) => v,
        Err(e) => {
            failure = Some(e);
            f64::INFINITY
        }
    };
    let mut best = (0.0, f(0.0));
    for (a, b) in [(0.0, top), (0.0, top / 2.0), (top / 2.0, top)] {
        let cand = golden_min(&mut f, a, b, tol);
        if cand.1 < best.1 {
            best = cand;
        }
    }
    for a in [top / 2.0, top] {
        let v = f(a);
        if v < best.1 {
            best = (a, v);
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(AlphaStar::At(best.0.clamp(0.0, top)))
}

/// Thresholds on the zone length.
///
/// `l_bar1` is the length beyond which every placement persists, `l_bar2`
/// and `l_bar3` the smaller thresholds of the mixed cases, `l_tilde` the
/// zero crossing used when the closed-form threshold exceeds `L`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CriticalLengths {
    pub l_bar1: Option<f64>,
    pub l_bar2: Option<f64>,
    pub l_bar3: Option<f64>,
    pub l_tilde: Option<f64>,
    /// `lambda_0(L) >= f'(0)`: no zone of any length or placement helps.
    pub extinct_for_all_zones: bool,
}

/// Length `l` at which `lambda_1(alpha*(l), l)` crosses zero, searched in
/// `(0, upper]`. `None` when `lambda_1` is still nonnegative at `upper`.
pub fn zero_crossing_length(
    habitat: f64,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    upper: f64,
    tol: f64,
) -> Result<Option<f64>, EigenError> {
    let value = |l: f64| -> Result<f64, EigenError> {
        let a = optimal_alpha(l, habitat, bc, growth)?.primary();
        lambda_at(habitat, a, l, bc, growth)
    };
    let upper = upper.min(habitat);
    if value(upper)? >= 0.0 {
        return Ok(None);
    }
    let mut lo = 1e-9 * habitat;
    if value(lo)? < 0.0 {
        return Ok(Some(lo));
    }
    let mut hi = upper;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if value(mid)? < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn inside(habitat: f64, l: f64) -> Option<f64> {
    (l > 0.0 && l < habitat).then_some(l)
}

/// Critical zone lengths for the boundary pair.
pub fn critical_lengths(
    bc: &BoundarySpec,
    growth: &GrowthPair,
    habitat: f64,
    tol: f64,
) -> Result<CriticalLengths, EigenError> {
    let fp0 = growth.fp0();
    let full = PI / sqrt(fp0);
    let half = full / 2.0;
    let l0 = lambda0(habitat, bc, 1e-15)?;
    let mut out = CriticalLengths { extinct_for_all_zones: l0 >= fp0, ..Default::default() };
    if out.extinct_for_all_zones {
        return Ok(out);
    }
    let crossing = |upper: f64| zero_crossing_length(habitat, bc, growth, upper, tol);
    use BoundaryKind::*;
    match bc.kinds() {
        (Neumann, Neumann) => {
            out.l_bar1 = inside(habitat, half);
            match out.l_bar1 {
                Some(l1) => out.l_bar2 = crossing(l1)?,
                None => out.l_tilde = crossing(habitat)?,
            }
        }
        (Dirichlet, Dirichlet) => {
            out.l_bar1 = inside(habitat, full);
            out.l_bar2 = crossing(out.l_bar1.unwrap_or(habitat))?;
        }
        (Neumann, Dirichlet) | (Dirichlet, Neumann) => {
            out.l_bar1 = inside(habitat, full);
            out.l_bar2 = inside(habitat, half);
            match out.l_bar2 {
                Some(l2) => out.l_bar3 = crossing(l2)?,
                None => out.l_tilde = crossing(habitat)?,
            }
        }
        _ => out.l_tilde = crossing(habitat)?,
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Every placement of this length persists.
    PersistAnywhere,
    /// Only good placements persist; the recommended start is one of them.
    PersistAtOptimum,
    /// No placement of this length persists.
    ExtinctForLength,
    /// No zone of any length persists.
    ExtinctAllZones,
    /// No zone length was given; only thresholds are reported.
    LengthsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recommendation {
    Anywhere,
    Place(AlphaStar),
    Nowhere,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub regime: Regime,
    pub lengths: CriticalLengths,
    pub alpha_star: Option<AlphaStar>,
    pub recommendation: Recommendation,
    pub verdict_at_optimum: Option<FateVerdict>,
    /// `lambda_1` at the worst placement of the given length.
    pub lambda_worst: Option<f64>,
    /// Branch label such as `NN (i)(b-1)`.
    pub branch: String,
    /// Whether the branch predicted by the length thresholds agrees with the
    /// direct `lambda_1` evaluations.
    pub consistent: bool,
}

const WORST_GRID: usize = 50;

fn nn_dd_branch(
    kinds: (BoundaryKind, BoundaryKind),
    l: f64,
    lengths: &CriticalLengths,
    lambda_at_l1: Option<f64>,
) -> (String, Option<Regime>) {
    use BoundaryKind::*;
    use Regime::*;
    let above = |t: Option<f64>| t.is_some_and(|t| l > t);
    match kinds {
        (Neumann, Neumann) => match (lengths.l_bar1, lengths.l_tilde) {
            (Some(_), _) if above(lengths.l_bar1) => ("NN (i)(a)".into(), Some(PersistAnywhere)),
            (Some(_), _) if lambda_at_l1.is_some_and(|v| v < 0.0) => {
                if above(lengths.l_bar2) {
                    ("NN (i)(b-1)".into(), Some(PersistAtOptimum))
                } else {
                    ("NN (i)(b-2)".into(), Some(ExtinctForLength))
                }
            }
            (Some(_), _) => ("NN (i)(c)".into(), Some(ExtinctForLength)),
            (None, _) if above(lengths.l_tilde) => ("NN (ii)(a)".into(), Some(PersistAtOptimum)),
            (None, _) => ("NN (ii)(b)".into(), Some(ExtinctForLength)),
        },
        (Dirichlet, Dirichlet) => {
            if lengths.extinct_for_all_zones {
                ("DD (ii)".into(), Some(ExtinctAllZones))
            } else if above(lengths.l_bar1) {
                ("DD (i)(a)".into(), Some(PersistAnywhere))
            } else if above(lengths.l_bar2) {
                ("DD (i)(b-1)".into(), Some(PersistAtOptimum))
            } else if lengths.l_bar2.is_some() {
                ("DD (i)(b-2)".into(), Some(ExtinctForLength))
            } else {
                ("DD (i)(c)".into(), Some(ExtinctForLength))
            }
        }
        (Neumann, Dirichlet) | (Dirichlet, Neumann) => {
            let tag = if kinds.0 == Neumann { "ND" } else { "DN" };
            let part = if lengths.extinct_for_all_zones {
                return (format!("{tag} (iii)"), Some(ExtinctAllZones));
            } else if lengths.l_bar1.is_none() && lengths.l_bar2.is_some() {
                "(ii)"
            } else {
                "(i)"
            };
            let l1 = lengths.l_bar1;
            let (sub, regime) = if l1.is_some_and(|t| l >= t) {
                ("(a)", PersistAnywhere)
            } else if above(lengths.l_bar2) {
                ("(b)", PersistAtOptimum)
            } else if above(lengths.l_bar3) {
                ("(c-1)", PersistAtOptimum)
            } else if lengths.l_bar3.is_some() {
                ("(c-2)", ExtinctForLength)
            } else {
                ("(d)", ExtinctForLength)
            };
            (format!("{tag} {part}{sub}"), Some(regime))
        }
        _ => (String::from("Robin (direct evaluation)"), None),
    }
}

/// Classifies `(L, bc, growth)` and, if `l` is given, the best placement of a
/// zone of that length.
pub fn design_report(
    habitat: f64,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    l: Option<f64>,
) -> Result<DesignReport, EigenError> {
    let tol = 1e-9 * habitat;
    let lengths = critical_lengths(bc, growth, habitat, tol)?;
    let Some(l) = l else {
        let regime = if lengths.extinct_for_all_zones { Regime::ExtinctAllZones } else { Regime::LengthsOnly };
        return Ok(DesignReport {
            regime,
            lengths,
            alpha_star: None,
            recommendation: if lengths.extinct_for_all_zones { Recommendation::Nowhere } else { Recommendation::Anywhere },
            verdict_at_optimum: None,
            lambda_worst: None,
            branch: String::from(if lengths.extinct_for_all_zones { "extinct for all zones" } else { "thresholds only" }),
            consistent: true,
        });
    };
    if !(l > 0.0 && l <= habitat) {
        return Err(EigenError::Baseline(ModelError::InvalidLength(l).into()));
    }

    let star = optimal_alpha(l, habitat, bc, growth)?;
    let lambda_opt = lambda_at(habitat, star.primary(), l, bc, growth)?;
    let top = habitat - l;
    let mut lambda_worst = lambda_opt;
    for i in 0..=WORST_GRID {
        let a = top * i as f64 / WORST_GRID as f64;
        lambda_worst = lambda_worst.max(lambda_at(habitat, a, l, bc, growth)?);
    }

    let observed = if lambda_worst < 0.0 {
        Regime::PersistAnywhere
    } else if lambda_opt < 0.0 {
        Regime::PersistAtOptimum
    } else if lengths.extinct_for_all_zones {
        Regime::ExtinctAllZones
    } else {
        Regime::ExtinctForLength
    };

    let kinds = bc.kinds();
    let lambda_at_l1 = match (kinds, lengths.l_bar1) {
        ((BoundaryKind::Neumann, BoundaryKind::Neumann), Some(l1)) => Some(lambda_at(habitat, 0.0, l1, bc, growth)?),
        _ => None,
    };
    let (branch, predicted) = nn_dd_branch(kinds, l, &lengths, lambda_at_l1);
    // The NN (ii)(a) and mixed (b)/(c-1) branches promise persistence at the
    // optimum; persisting everywhere is a stronger outcome of the same branch.
    let consistent = match predicted {
        None => true,
        Some(p) if p == observed => true,
        Some(Regime::PersistAtOptimum) => observed == Regime::PersistAnywhere,
        Some(_) => false,
    };

    let recommendation = match observed {
        Regime::PersistAnywhere => Recommendation::Anywhere,
        Regime::PersistAtOptimum => Recommendation::Place(star),
        _ => Recommendation::Nowhere,
    };
    Ok(DesignReport {
        regime: observed,
        lengths,
        alpha_star: Some(star),
        recommendation,
        verdict_at_optimum: Some(FateVerdict::from_lambda(lambda_opt)),
        lambda_worst: Some(lambda_worst),
        branch,
        consistent,
    })
}

/// `lambda_1` over a grid; rows follow `l_grid`, columns `alpha_grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub alphas: Vec<f64>,
    pub ls: Vec<f64>,
    /// `None` where `alpha + l > L`.
    pub values: Vec<Vec<Option<f64>>>,
}

/// One cell of a sweep: `None` if the layout does not fit.
pub fn sweep_cell(
    habitat: f64,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    alpha: f64,
    l: f64,
) -> Result<Option<f64>, EigenError> {
    match ZoneLayout::new(habitat, alpha, l) {
        Ok(z) => Ok(Some(principal_eigenvalue(&z, bc, growth, EIGEN_TOL)?.lambda1)),
        Err(_) => Ok(None),
    }
}

pub fn sweep(
    habitat: f64,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    alpha_grid: &[f64],
    l_grid: &[f64],
) -> Result<SweepTable, EigenError> {
    let mut values = Vec::with_capacity(l_grid.len());
    for &l in l_grid {
        let row = alpha_grid
            .iter()
            .map(|&a| sweep_cell(habitat, bc, growth, a, l))
            .collect::<Result<Vec<_>, _>>()?;
        values.push(row);
    }
    Ok(SweepTable { alphas: alpha_grid.to_vec(), ls: l_grid.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Verdict;

    fn growth() -> GrowthPair {
        GrowthPair::cubic_logistic(0.2, 0.1).unwrap()
    }

    #[test]
    fn optimal_starts() {
        let g = growth();
        assert_eq!(optimal_alpha(4.0, 10.0, &BoundarySpec::NN, &g).unwrap(), AlphaStar::Pair(0.0, 6.0));
        assert_eq!(optimal_alpha(4.0, 10.0, &BoundarySpec::DD, &g).unwrap(), AlphaStar::At(3.0));
        assert_eq!(optimal_alpha(4.0, 10.0, &BoundarySpec::ND, &g).unwrap(), AlphaStar::At(0.0));
        assert_eq!(optimal_alpha(4.0, 10.0, &BoundarySpec::DN, &g).unwrap(), AlphaStar::At(6.0));
    }

    #[test]
    fn robin_near_neumann_prefers_an_end() {
        let g = growth();
        let bc = BoundarySpec::new(1.0, 1e-3, 1.0, 0.0).unwrap();
        let a = optimal_alpha(4.0, 10.0, &bc, &g).unwrap().primary();
        assert!(a < 1e-3 || a > 6.0 - 1e-3, "{a}");
        let bc = BoundarySpec::new(1.0, 1e3, 1.0, 0.0).unwrap();
        let a = optimal_alpha(4.0, 10.0, &bc, &g).unwrap().primary();
        assert!((a - 6.0).abs() < 1e-4, "{a}");
    }

    #[test]
    fn closed_form_thresholds() {
        let g = growth();
        let nn = critical_lengths(&BoundarySpec::NN, &g, 10.0, 1e-9).unwrap();
        assert!((nn.l_bar1.unwrap() - 3.5124).abs() < 1e-4);
        let dd = critical_lengths(&BoundarySpec::DD, &g, 10.0, 1e-9).unwrap();
        assert!((dd.l_bar1.unwrap() - 7.0248).abs() < 1e-4);
        let nd = critical_lengths(&BoundarySpec::ND, &g, 10.0, 1e-9).unwrap();
        let (l1, l2, l3) = (nd.l_bar1.unwrap(), nd.l_bar2.unwrap(), nd.l_bar3.unwrap());
        assert!(l3 < l2 && l2 < l1);
        let lam = |l: f64| lambda_at(10.0, 0.0, l, &BoundarySpec::ND, &g).unwrap();
        assert!(lam(l3 - 1e-6) > 0.0 && lam(l3 + 1e-6) < 0.0);
    }

    #[test]
    fn dirichlet_small_habitat_is_hopeless() {
        let cl = critical_lengths(&BoundarySpec::DD, &growth(), 5.0, 1e-9).unwrap();
        assert!(cl.extinct_for_all_zones && cl.l_bar1.is_none());
        let rep = design_report(5.0, &BoundarySpec::DD, &growth(), Some(3.0)).unwrap();
        assert_eq!(rep.regime, Regime::ExtinctAllZones);
        assert_eq!(rep.branch, "DD (ii)");
        assert!(rep.consistent);
    }

    #[test]
    fn neumann_long_zone_persists_anywhere() {
        let rep = design_report(10.0, &BoundarySpec::NN, &growth(), Some(4.0)).unwrap();
        assert_eq!(rep.branch, "NN (i)(a)");
        assert_eq!(rep.regime, Regime::PersistAnywhere);
        assert!(rep.consistent);
        for i in 0..50 {
            let a = 6.0 * i as f64 / 49.0;
            assert!(lambda_at(10.0, a, 4.0, &BoundarySpec::NN, &growth()).unwrap() < 0.0);
        }
    }

    #[test]
    fn dirichlet_short_zone_report() {
        let g = growth();
        let rep = design_report(10.0, &BoundarySpec::DD, &g, Some(3.0)).unwrap();
        assert_eq!(rep.alpha_star, Some(AlphaStar::At(3.5)));
        let lam = lambda_at(10.0, 3.5, 3.0, &BoundarySpec::DD, &g).unwrap();
        let v = rep.verdict_at_optimum.unwrap();
        assert_eq!(v.lambda1, Some(lam));
        assert_eq!(v.verdict == Verdict::Extinct, lam > 0.0);
        assert!(rep.consistent);
    }

    #[test]
    fn sweep_rows_are_symmetric() {
        let g = growth();
        let alphas: Vec<f64> = (0..=12).map(|i| i as f64 * 0.5).collect();
        let t = sweep(10.0, &BoundarySpec::NN, &g, &alphas, &[4.0, 7.0]).unwrap();
        let row = &t.values[0];
        for i in 0..=12 {
            let (a, b) = (row[i].unwrap(), row[12 - i].unwrap());
            assert!((a - b).abs() < 1e-8);
        }
        assert!(row[6].unwrap() >= row.iter().flatten().copied().fold(f64::MIN, f64::max) - 1e-15);
        assert!(t.values[1][7].is_none());
    }
}
