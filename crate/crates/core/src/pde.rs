//! Time integration of `u_t = u_xx + F(x, u)` on the habitat, fate
//! classification of trajectories, and the zone steady state `theta_f`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::baseline::{lambda0, BaselineError};
use crate::math::{cos, round, sin, sqrt, PI};
use crate::model::{BoundaryKind, BoundarySpec, FateVerdict, GrowthPair, Verdict, ZoneLayout};
use crate::ode::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    ExplicitEuler,
    /// Crank–Nicolson diffusion with explicit reaction.
    SemiImplicitCn,
}

pub type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct SimConfig {
    pub dx: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Persistence floor.
    pub xi: f64,
    /// Interval between entries of the floor/max/mass series.
    pub record_every: f64,
    /// Interval between stored profiles.
    pub snapshot_every: f64,
    /// Positive interior weight that the floor is measured against. `None`
    /// picks the half- or full-sine matching the Dirichlet ends.
    pub weight: Option<WeightFn>,
}

impl fmt::Debug for SimConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimConfig")
            .field("dx", &self.dx)
            .field("dt", &self.dt)
            .field("t_end", &self.t_end)
            .field("scheme", &self.scheme)
            .field("xi", &self.xi)
            .field("record_every", &self.record_every)
            .field("snapshot_every", &self.snapshot_every)
            .field("weight", &self.weight.as_ref().map(|_| "custom"))
            .finish()
    }
}

impl SimConfig {
    /// `dx = dt = 0.025`, `t_end = 2000`, Crank–Nicolson, `xi = a/2`.
    pub fn new(allee_a: f64) -> Self {
        Self {
            dx: 0.025,
            dt: 0.025,
            t_end: 2000.0,
            scheme: Scheme::SemiImplicitCn,
            xi: 0.5 * allee_a,
            record_every: 1.0,
            snapshot_every: 10.0,
            weight: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    InvalidConfig(&'static str),
    StabilityViolation { dt: f64, limit: f64 },
    NegativeDensity { t: f64, value: f64 },
    BelowThreshold { fp0: f64, threshold: f64 },
    NotApplicable(&'static str),
    Baseline(BaselineError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig(m) => write!(f, "invalid simulation config: {m}"),
            Self::StabilityViolation { dt, limit } => {
                write!(f, "explicit step dt={dt} exceeds the stability limit {limit}")
            }
            Self::NegativeDensity { t, value } => write!(f, "density {value:e} < 0 at t={t}"),
            Self::BelowThreshold { fp0, threshold } => {
                write!(f, "f'(0)={fp0} does not exceed pi^2/l^2={threshold}")
            }
            Self::NotApplicable(m) => write!(f, "not applicable: {m}"),
            Self::Baseline(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SimError {}

impl From<BaselineError> for SimError {
    fn from(e: BaselineError) -> Self {
        Self::Baseline(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Cell centers.
    pub x: Vec<f64>,
    /// Weight the floor series is measured against.
    pub weight: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    /// `min u / weight` at each entry of `times`.
    pub floor_series: Vec<f64>,
    pub max_series: Vec<f64>,
    /// `integral of u` at each entry of `times`.
    pub mass_series: Vec<f64>,
    pub t_end: f64,
}

impl Trajectory {
    pub fn final_profile(&self) -> &[f64] {
        self.snapshots.last().map_or(&[], |s| s.as_slice())
    }
}

/// Ratio `phi_ghost / phi_edge` for a boundary row placed at the habitat end.
fn ghost_ratio(flux: f64, value: f64, h: f64) -> f64 {
    (flux / h - value / 2.0) / (flux / h + value / 2.0)
}

fn default_weight(bc: &BoundarySpec, habitat: f64) -> impl Fn(f64) -> f64 {
    let kinds = bc.kinds();
    move |x: f64| {
        use BoundaryKind::Dirichlet;
        match kinds {
            (Dirichlet, Dirichlet) => sin(PI * x / habitat),
            (Dirichlet, _) => sin(PI * x / (2.0 * habitat)),
            (_, Dirichlet) => cos(PI * x / (2.0 * habitat)),
            _ => 1.0,
        }
    }
}

/// Factored `I + c A` for the constant diffusion matrix `A`.
struct Tridiagonal {
    sub: f64,
    /// Modified super-diagonal and inverse pivots of the Thomas sweep.
    sup_mod: Vec<f64>,
    inv_piv: Vec<f64>,
}

impl Tridiagonal {
    fn new(diag: &[f64], off: f64, c: f64) -> Self {
        let n = diag.len();
        let sub = c * off;
        let mut sup_mod = vec![0.0; n];
        let mut inv_piv = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let piv = 1.0 + c * diag[i] - sub * prev;
            inv_piv[i] = 1.0 / piv;
            prev = sub / piv;
            sup_mod[i] = prev;
        }
        Self { sub, sup_mod, inv_piv }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        let mut prev = 0.0;
        for i in 0..n {
            rhs[i] = (rhs[i] - self.sub * prev) * self.inv_piv[i];
            prev = rhs[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.sup_mod[i] * rhs[i + 1];
        }
    }
}

fn apply_a(diag: &[f64], off: f64, u: &[f64], out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        let mut v = diag[i] * u[i];
        if i > 0 {
            v += off * u[i - 1];
        }
        if i + 1 < n {
            v += off * u[i + 1];
        }
        out[i] = v;
    }
}

const NEG_TOL: f64 = -1e-12;
const RANNACHER_STEPS: usize = 4;

/// Runs the reaction–diffusion model from `u0` (evaluated at cell centers).
pub fn simulate(
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    u0: &dyn Fn(f64) -> f64,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    if !(cfg.dx > 0.0 && cfg.dt > 0.0 && cfg.t_end > 0.0) {
        return Err(SimError::InvalidConfig("dx, dt and t_end must be positive"));
    }
    if !(cfg.xi > 0.0) {
        return Err(SimError::InvalidConfig("persistence floor must be positive"));
    }
    let habitat = layout.habitat();
    let n = (round(habitat / cfg.dx) as usize).max(4);
    let h = habitat / n as f64;
    if cfg.scheme == Scheme::ExplicitEuler && cfg.dt > 0.5 * h * h {
        return Err(SimError::StabilityViolation { dt: cfg.dt, limit: 0.5 * h * h });
    }
    let inv_h2 = 1.0 / (h * h);
    let mut diag = vec![2.0 * inv_h2; n];
    diag[0] -= ghost_ratio(bc.a1, bc.a2, h) * inv_h2;
    diag[n - 1] -= ghost_ratio(bc.b1, bc.b2, h) * inv_h2;
    let off = -inv_h2;

    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let (za, zb) = (layout.alpha(), layout.zone_end());
    let frac: Vec<f64> = (0..n)
        .map(|i| {
            let (c0, c1) = (i as f64 * h, (i + 1) as f64 * h);
            ((c1.min(zb) - c0.max(za)).max(0.0) / h).min(1.0)
        })
        .collect();
    let weight: Vec<f64> = match &cfg.weight {
        Some(w) => x.iter().map(|&xi| w(xi).max(1e-6)).collect(),
        None => {
            let w = default_weight(bc, habitat);
            x.iter().map(|&xi| w(xi).max(1e-6)).collect()
        }
    };

    let mut u: Vec<f64> = x.iter().map(|&xi| u0(xi)).collect();
    if u.iter().any(|v| !(*v >= 0.0)) {
        return Err(SimError::InvalidConfig("initial density must be nonnegative"));
    }

    let reaction = |u: &[f64], out: &mut [f64]| {
        for i in 0..u.len() {
            let th = frac[i];
            let mut r = 0.0;
            if th > 0.0 {
                r += th * growth.f(u[i]);
            }
            if th < 1.0 {
                r += (1.0 - th) * growth.g(u[i]);
            }
            out[i] = r;
        }
    };

    let steps = round(cfg.t_end / cfg.dt) as usize;
    let record_stride = (round(cfg.record_every / cfg.dt) as usize).max(1);
    let snap_stride = (round(cfg.snapshot_every / cfg.dt) as usize).max(1);
    let solver = Tridiagonal::new(&diag, off, 0.5 * cfg.dt);

    let mut traj = Trajectory {
        x,
        weight,
        snapshot_times: Vec::new(),
        snapshots: Vec::new(),
        times: Vec::new(),
        floor_series: Vec::new(),
        max_series: Vec::new(),
        mass_series: Vec::new(),
        t_end: steps as f64 * cfg.dt,
    };
    let record = |traj: &mut Trajectory, t: f64, u: &[f64]| {
        let floor = u.iter().zip(&traj.weight).map(|(v, w)| v / w).fold(f64::INFINITY, f64::min);
        traj.times.push(t);
        traj.floor_series.push(floor);
        traj.max_series.push(u.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        traj.mass_series.push(u.iter().sum::<f64>() * h);
    };
    record(&mut traj, 0.0, &u);
    traj.snapshot_times.push(0.0);
    traj.snapshots.push(u.clone());

    let mut fr = vec![0.0; n];
    let mut au = vec![0.0; n];
    for k in 1..=steps {
        match cfg.scheme {
            Scheme::ExplicitEuler => {
                reaction(&u, &mut fr);
                apply_a(&diag, off, &u, &mut au);
                for i in 0..n {
                    u[i] += cfg.dt * (fr[i] - au[i]);
                }
            }
            Scheme::SemiImplicitCn if k <= RANNACHER_STEPS => {
                for _ in 0..2 {
                    reaction(&u, &mut fr);
                    for i in 0..n {
                        u[i] += 0.5 * cfg.dt * fr[i];
                    }
                    solver.solve(&mut u);
                }
            }
            Scheme::SemiImplicitCn => {
                reaction(&u, &mut fr);
                apply_a(&diag, off, &u, &mut au);
                for i in 0..n {
                    u[i] += cfg.dt * fr[i] - 0.5 * cfg.dt * au[i];
                }
                solver.solve(&mut u);
            }
        }
        let t = k as f64 * cfg.dt;
        for v in u.iter_mut() {
            if *v < 0.0 {
                if *v < NEG_TOL {
                    return Err(SimError::NegativeDensity { t, value: *v });
                }
                *v = 0.0;
            }
        }
        if k % record_stride == 0 || k == steps {
            record(&mut traj, t, &u);
        }
        if k % snap_stride == 0 || k == steps {
            traj.snapshot_times.push(t);
            traj.snapshots.push(u.clone());
        }
    }
    Ok(traj)
}

/// Fate over the final `window` time units of `traj`.
///
/// Persist when the weighted floor never drops below `xi`; Extinct when the
/// maximum is non-increasing and ends below `xi / 10`; otherwise Undecided.
/// Windows shorter than a fifth of the run, or longer than the run, give
/// Undecided.
pub fn classify_fate(traj: &Trajectory, xi: f64, window: f64) -> FateVerdict {
    let undecided = |floor: Option<f64>| FateVerdict { verdict: Verdict::Undecided, lambda1: None, sim_floor: floor };
    if !(window >= 0.2 * traj.t_end && window <= traj.t_end) || traj.times.is_empty() {
        return undecided(None);
    }
    let start = traj.t_end - window;
    let first = traj.times.iter().position(|&t| t >= start).unwrap_or(traj.times.len());
    let floors = &traj.floor_series[first..];
    let maxes = &traj.max_series[first..];
    if floors.len() < 2 {
        return undecided(None);
    }
    let floor = floors.iter().copied().fold(f64::INFINITY, f64::min);
    let sim_floor = Some(floor.max(0.0));
    if floor >= xi {
        return FateVerdict { verdict: Verdict::Persist, lambda1: None, sim_floor };
    }
    let non_increasing = maxes.windows(2).all(|w| w[1] <= w[0]);
    if non_increasing && *maxes.last().unwrap() < xi / 10.0 {
        return FateVerdict { verdict: Verdict::Extinct, lambda1: None, sim_floor };
    }
    undecided(sim_floor)
}

/// Positive solution of `u'' + f(u) = 0` on `[0, l]` with zero ends.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaProfile {
    pub l: f64,
    /// Initial slope found by shooting.
    pub slope: f64,
    pub peak: f64,
    /// True when the turning point could not reach `l/2` in double precision
    /// and a flat top was inserted at the peak.
    pub plateau: bool,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl ThetaProfile {
    /// Linear interpolation of the sampled profile; zero outside `[0, l]`.
    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0 && x < self.l) {
            return 0.0;
        }
        let m = self.xs.len() - 1;
        let pos = x / self.l * m as f64;
        let i = (pos as usize).min(m - 1);
        let t = pos - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }
}

const THETA_SAMPLES: usize = 4001;
const ODE_TOL: f64 = 1e-12;

/// `theta_f` by shooting on the initial slope.
pub fn theta_f(l: f64, growth: &GrowthPair, tol: f64) -> Result<ThetaProfile, SimError> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(SimError::InvalidConfig("zone length must be positive"));
    }
    if !(tol > 0.0) {
        return Err(SimError::InvalidConfig("tolerance must be positive"));
    }
    let threshold = PI * PI / (l * l);
    if growth.fp0() <= threshold {
        return Err(SimError::BelowThreshold { fp0: growth.fp0(), threshold });
    }
    // Energy bound: the orbit through (0, s) stays in (0, 1) iff s^2/2 < F(1).
    let m = 2000;
    let big_f: f64 = (0..m)
        .map(|i| {
            let (a, b) = (i as f64 / m as f64, (i + 1) as f64 / m as f64);
            (b - a) / 6.0 * (growth.f(a) + 4.0 * growth.f(0.5 * (a + b)) + growth.f(b))
        })
        .sum();
    let s_max = sqrt(2.0 * big_f);
    let rhs = |_: f64, y: [f64; 2]| [y[1], -growth.f(y[0])];

    // Does the orbit return to zero before l?
    let returns_early = |s: f64| {
        let mut hit = false;
        integrate(rhs, 0.0, [0.0, s], l, ODE_TOL, |_, y| {
            hit = y[0] < 0.0;
            !hit
        });
        hit
    };
    let (mut lo, mut hi) = (0.0, s_max);
    while hi - lo > tol * s_max {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if returns_early(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let slope = lo;

    // Rising half, recorded step by step up to the turning point.
    let mut pts: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, slope)];
    integrate(rhs, 0.0, [0.0, slope], 0.5 * l, ODE_TOL, |t, y| {
        pts.push((t, y[0], y[1]));
        y[1] > 0.0
    });
    let &(tn, un, vn) = pts.last().unwrap();
    let (turn, peak) = if vn <= 0.0 && pts.len() >= 2 {
        let (tp, up, vp) = pts[pts.len() - 2];
        let w = vp / (vp - vn);
        (tp + w * (tn - tp), hermite(tp, up, vp, tn, un, vn, tp + w * (tn - tp)))
    } else {
        (tn, un)
    };
    let plateau = turn < 0.5 * l * (1.0 - 1e-6);

    let nm = THETA_SAMPLES - 1;
    let xs: Vec<f64> = (0..=nm).map(|i| l * i as f64 / nm as f64).collect();
    let mut values = vec![0.0; THETA_SAMPLES];
    let mut j = 0;
    for i in 0..=nm / 2 {
        let x = xs[i];
        let v = if x >= turn {
            peak
        } else {
            while j + 2 < pts.len() && pts[j + 1].0 < x {
                j += 1;
            }
            let (t0, u0, v0) = pts[j];
            let (t1, u1, v1) = pts[j + 1];
            hermite(t0, u0, v0, t1, u1, v1, x)
        };
        values[i] = v;
        values[nm - i] = v;
    }
    values[0] = 0.0;
    values[nm] = 0.0;
    Ok(ThetaProfile { l, slope, peak, plateau, xs, values })
}

/// Cubic Hermite interpolation of `u` from values and slopes at two nodes.
fn hermite(t0: f64, u0: f64, v0: f64, t1: f64, u1: f64, v1: f64, x: f64) -> f64 {
    let h = t1 - t0;
    if h <= 0.0 {
        return u0;
    }
    let s = (x - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * u0
        + (s3 - 2.0 * s2 + s) * h * v0
        + (-2.0 * s3 + 3.0 * s2) * u1
        + (s3 - s2) * h * v1
}

/// Whether small and large populations alike must die out because
/// `lambda_0(L) > f'(0)`.
pub fn extinction_sufficient(growth: &GrowthPair, bc: &BoundarySpec, habitat: f64) -> Result<bool, SimError> {
    if bc.kinds() == (BoundaryKind::Neumann, BoundaryKind::Neumann) {
        return Err(SimError::NotApplicable("Neumann at both ends makes the bound vacuous"));
    }
    let m = 1000;
    let violates = (1..=m).any(|i| {
        let u = i as f64 / m as f64;
        growth.f(u) / u > growth.fp0() * (1.0 + 1e-12) + 1e-15
    });
    if violates {
        return Err(SimError::NotApplicable("f(u)/u exceeds f'(0)"));
    }
    Ok(lambda0(habitat, bc, 1e-15)? > growth.fp0())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::principal_eigenvalue;
    use crate::EIGEN_TOL;

    fn growth() -> GrowthPair {
        GrowthPair::cubic_logistic(0.2, 0.1).unwrap()
    }

    fn short(t_end: f64) -> SimConfig {
        SimConfig { t_end, ..SimConfig::new(0.1) }
    }

    #[test]
    fn zero_stays_zero() {
        let z = ZoneLayout::new(10.0, 1.0, 3.0).unwrap();
        let tr = simulate(&z, &BoundarySpec::ND, &growth(), &|_| 0.0, &short(50.0)).unwrap();
        assert!(tr.final_profile().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn carrying_capacity_is_steady() {
        let z = ZoneLayout::new(10.0, 0.0, 10.0).unwrap();
        let tr = simulate(&z, &BoundarySpec::NN, &growth(), &|_| 1.0, &short(50.0)).unwrap();
        assert!(tr.final_profile().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn mass_conserved_without_growth() {
        let zero: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|_| 0.0);
        let g = GrowthPair::custom(0.2, -0.02, 0.1, 0.2, zero.clone(), zero).unwrap();
        let z = ZoneLayout::new(10.0, 2.0, 3.0).unwrap();
        let tr = simulate(&z, &BoundarySpec::NN, &g, &|x| 0.5 + 0.4 * cos(x), &short(20.0)).unwrap();
        let m0 = tr.mass_series[0];
        for (t, m) in tr.times.iter().zip(&tr.mass_series) {
            assert!((m - m0).abs() <= 1e-8 * t.max(1.0));
        }
    }

    #[test]
    fn explicit_stability_guard() {
        let z = ZoneLayout::new(10.0, 2.0, 3.0).unwrap();
        let cfg = SimConfig { scheme: Scheme::ExplicitEuler, ..short(1.0) };
        assert!(matches!(
            simulate(&z, &BoundarySpec::NN, &growth(), &|_| 0.01, &cfg),
            Err(SimError::StabilityViolation { .. })
        ));
        let cfg = SimConfig { scheme: Scheme::ExplicitEuler, dt: 2e-4, ..short(1.0) };
        assert!(simulate(&z, &BoundarySpec::NN, &growth(), &|_| 0.01, &cfg).is_ok());
    }

    #[test]
    fn explicit_and_implicit_agree() {
        let z = ZoneLayout::new(10.0, 2.0, 3.0).unwrap();
        let g = growth();
        let u0 = |x: f64| 0.3 + 0.2 * sin(x);
        let cn = simulate(&z, &BoundarySpec::DN, &g, &u0, &SimConfig { dt: 1e-3, ..short(2.0) }).unwrap();
        let ee = simulate(&z, &BoundarySpec::DN, &g, &u0, &SimConfig { scheme: Scheme::ExplicitEuler, dt: 2e-4, ..short(2.0) })
            .unwrap();
        let diff = cn.final_profile().iter().zip(ee.final_profile()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-4, "{diff}");
    }

    #[test]
    fn fates_follow_spectrum() {
        let g = growth();
        let cfg = SimConfig::new(0.1);
        for (bc, alpha, expect) in [
            (BoundarySpec::ND, 1.0, Verdict::Persist),
            (BoundarySpec::DD, 1.0, Verdict::Extinct),
        ] {
            let z = ZoneLayout::new(10.0, alpha, 3.0).unwrap();
            let lam = principal_eigenvalue(&z, &bc, &g, EIGEN_TOL).unwrap().lambda1;
            let tr = simulate(&z, &bc, &g, &|_| 0.01, &cfg).unwrap();
            let v = classify_fate(&tr, cfg.xi, 400.0);
            assert_eq!(v.verdict, expect, "{bc:?} lambda={lam}");
            assert_eq!(lam < 0.0, expect == Verdict::Persist);
        }
    }

    #[test]
    fn short_window_is_undecided() {
        let z = ZoneLayout::new(10.0, 1.0, 3.0).unwrap();
        let tr = simulate(&z, &BoundarySpec::ND, &growth(), &|_| 0.01, &short(10.0)).unwrap();
        assert_eq!(classify_fate(&tr, 0.05, 20.0).verdict, Verdict::Undecided);
        assert_eq!(classify_fate(&tr, 0.05, 1.0).verdict, Verdict::Undecided);
    }

    #[test]
    fn theta_below_threshold() {
        let g = growth();
        assert!(matches!(theta_f(7.0, &g, 1e-12), Err(SimError::BelowThreshold { .. })));
    }

    #[test]
    fn theta_moderate_zone() {
        let th = theta_f(8.0, &growth(), 1e-14).unwrap();
        assert!(!th.plateau);
        assert!(th.peak > 0.0 && th.peak < 1.0);
        let n = th.values.len();
        for i in 1..n - 1 {
            assert!(th.values[i] > 0.0);
            assert!((th.values[i] - th.values[n - 1 - i]).abs() <= 1e-8);
        }
        // The profile solves the boundary problem: a second shot from the
        // recorded slope ends at zero.
        let g = growth();
        let (_, y) = integrate(|_, y| [y[1], -g.f(y[0])], 0.0, [0.0, th.slope], 8.0, 1e-12, |_, _| true);
        assert!(y[0].abs() < 1e-4, "{}", y[0]);
    }

    #[test]
    fn theta_long_zone_saturates() {
        let th = theta_f(200.0, &growth(), 1e-14).unwrap();
        assert!(th.peak >= 0.99 && th.peak < 1.0);
        assert!((th.eval(100.0) - th.peak).abs() < 1e-12);
    }

    #[test]
    fn extinction_bound() {
        let g = growth();
        assert!(!extinction_sufficient(&g, &BoundarySpec::DD, 10.0).unwrap());
        assert!(extinction_sufficient(&g, &BoundarySpec::DD, 5.0).unwrap());
        assert!(matches!(
            extinction_sufficient(&g, &BoundarySpec::NN, 10.0),
            Err(SimError::NotApplicable(_))
        ));
        let f: WeightFn = Arc::new(|u| 0.2 * u * (1.0 - u) * (1.0 + 2.0 * u));
        let gg: WeightFn = Arc::new(|u| -0.02 * u);
        let bad = GrowthPair::custom(0.2, -0.02, 0.1, 0.2, f, gg).unwrap();
        assert!(matches!(
            extinction_sufficient(&bad, &BoundarySpec::DD, 10.0),
            Err(SimError::NotApplicable(_))
        ));
    }
}
