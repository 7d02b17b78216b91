//! Principal eigenvalue of `-phi'' + H phi = lambda phi` with piecewise-constant
//! `H` by exact segment propagators, plus the closed-form equations that
//! `lambda_1` must satisfy in each regime.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::baseline::{lambda0, spectral_bracket, BaselineError, Bracket};
use crate::math::{abs, cos, cosh, exp, hypot, ln, sin, sinc, sqrt};
use crate::model::{classify_case, BoundaryKind, BoundarySpec, CaseTag, GrowthPair, ZoneLayout};
use crate::roots::{bisect, first_sign_change};
use crate::H2_BAND;

/// Propagator of `(phi, phi')` across one constant-potential segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl TransferMatrix {
    pub const IDENTITY: Self = Self { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0 };

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.m11 * v[0] + self.m12 * v[1], self.m21 * v[0] + self.m22 * v[1]]
    }

    /// `self * rhs`, i.e. `rhs` is applied first.
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// `sinh(x)/x`, continuous at zero.
fn sinhc(x: f64) -> f64 {
    if abs(x) < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        crate::math::sinh(x) / x
    }
}

const SCALE_THRESHOLD: f64 = 30.0;

/// Exact propagator over `length` for `phi'' = (potential - lambda) phi`.
pub fn segment_transfer(lambda: f64, potential: f64, length: f64) -> TransferMatrix {
    let (m, log_scale) = segment_scaled(lambda, potential, length);
    if log_scale == 0.0 {
        return m;
    }
    let s = exp(log_scale);
    TransferMatrix { m11: m.m11 * s, m12: m.m12 * s, m21: m.m21 * s, m22: m.m22 * s }
}

/// Same propagator, returned as `(M e^{-s}, s)` so that growing exponentials
/// never overflow.
fn segment_scaled(lambda: f64, potential: f64, length: f64) -> (TransferMatrix, f64) {
    let k2 = lambda - potential;
    if k2 >= 0.0 {
        let kl = sqrt(k2) * length;
        let c = cos(kl);
        let s_over_k = length * sinc(kl);
        return (TransferMatrix { m11: c, m12: s_over_k, m21: -k2 * s_over_k, m22: c }, 0.0);
    }
    let kappa = sqrt(-k2);
    let kl = kappa * length;
    if kl > SCALE_THRESHOLD {
        let e = exp(-2.0 * kl);
        let c = 0.5 * (1.0 + e);
        let s = 0.5 * (1.0 - e);
        let m = TransferMatrix { m11: c, m12: s / kappa, m21: kappa * s, m22: c };
        return (m, kl);
    }
    let c = cosh(kl);
    let s_over_k = length * sinhc(kl);
    (TransferMatrix { m11: c, m12: s_over_k, m21: -k2 * s_over_k, m22: c }, 0.0)
}

fn potentials(growth: &GrowthPair) -> (f64, f64) {
    (-growth.fp0(), -growth.gp0())
}

fn segment_list(layout: &ZoneLayout, growth: &GrowthPair) -> [(f64, f64); 3] {
    let (vz, vo) = potentials(growth);
    layout.segments().map(|(zone, len)| (if zone { vz } else { vo }, len))
}

/// State at `x = L` scaled to unit size, together with the log of the scale.
fn shoot(lambda: f64, layout: &ZoneLayout, bc: &BoundarySpec, growth: &GrowthPair) -> ([f64; 2], f64) {
    let mut v = [bc.a1, bc.a2];
    let mut log_scale = 0.0;
    for (pot, len) in segment_list(layout, growth) {
        if len == 0.0 {
            continue;
        }
        let (m, s) = segment_scaled(lambda, pot, len);
        v = m.apply(v);
        let n = hypot(v[0], v[1]);
        v = [v[0] / n, v[1] / n];
        log_scale += s + ln(n);
    }
    (v, log_scale)
}

fn normalized_residual(lambda: f64, layout: &ZoneLayout, bc: &BoundarySpec, growth: &GrowthPair) -> f64 {
    let (v, _) = shoot(lambda, layout, bc, growth);
    bc.b1 * v[1] + bc.b2 * v[0]
}

/// Right boundary functional `b1 phi'(L) + b2 phi(L)` of the solution started
/// from `(phi, phi')(0) = (a1, a2)`. It vanishes exactly at eigenvalues.
pub fn characteristic_residual(
    lambda: f64,
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
) -> f64 {
    let (v, log_scale) = shoot(lambda, layout, bc, growth);
    (bc.b1 * v[1] + bc.b2 * v[0]) * exp(log_scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub lambda1: f64,
    pub case_tag: CaseTag,
    pub f_tilde: f64,
    pub g_tilde: f64,
    /// Characteristic residual at `lambda1`, normalized by the size of the
    /// propagated state.
    pub residual: f64,
    pub phi_samples: Vec<(f64, f64)>,
    pub bracket: Bracket,
    pub fp0: f64,
    pub gp0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    /// General Robin rows, exponential outer segments.
    H1Robin,
    H1Neumann,
    H1Dirichlet,
    /// Neumann at `x = 0`, Dirichlet at `x = L`.
    H1NeumannDirichlet,
    H2Dirichlet,
    H2NeumannDirichlet,
    H3Dirichlet,
    H3NeumannDirichlet,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Self::H1Robin => "h1_robin",
            Self::H1Neumann => "h1_nn",
            Self::H1Dirichlet => "h1_dd",
            Self::H1NeumannDirichlet => "h1_nd",
            Self::H2Dirichlet => "h2_dd",
            Self::H2NeumannDirichlet => "h2_nd",
            Self::H3Dirichlet => "h3_dd",
            Self::H3NeumannDirichlet => "h3_nd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenError {
    Baseline(BaselineError),
    InvalidTolerance(f64),
    NoSignChange { lo: f64, hi: f64 },
    NodeCountNonzero { lambda: f64, nodes: usize },
    OutsideBracket { lambda: f64, lo: f64, hi: f64 },
    /// `lambda_1 + f'(0) <= 0`.
    BelowLogisticFloor { lambda: f64, fp0: f64 },
    ResidualTooLarge { equation: Equation, residual: f64 },
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Baseline(e) => write!(f, "{e}"),
            Self::InvalidTolerance(t) => write!(f, "tolerance must be > 0, got {t}"),
            Self::NoSignChange { lo, hi } => {
                write!(f, "characteristic residual has no sign change on ({lo}, {hi})")
            }
            Self::NodeCountNonzero { lambda, nodes } => {
                write!(f, "eigenfunction at lambda={lambda} has {nodes} interior nodes")
            }
            Self::OutsideBracket { lambda, lo, hi } => {
                write!(f, "lambda={lambda} is outside the bracket ({lo}, {hi})")
            }
            Self::BelowLogisticFloor { lambda, fp0 } => {
                write!(f, "lambda + f'(0) = {} is not positive", lambda + fp0)
            }
            Self::ResidualTooLarge { equation, residual } => {
                write!(f, "equation {} residual {residual:e} exceeds 1e-6", equation.name())
            }
        }
    }
}

impl core::error::Error for EigenError {}

impl From<BaselineError> for EigenError {
    fn from(e: BaselineError) -> Self {
        Self::Baseline(e)
    }
}

const SCAN_PANELS: usize = 256;
const NODE_GRID: usize = 512;
const RESULT_SAMPLES: usize = 257;

/// Principal eigenvalue `lambda_1(alpha, l)` and its eigenfunction.
pub fn principal_eigenvalue(
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    tol: f64,
) -> Result<SpectralResult, EigenError> {
    if !(tol > 0.0) {
        return Err(EigenError::InvalidTolerance(tol));
    }
    let bracket = spectral_bracket(layout.habitat(), bc, growth)?;
    let (fp0, gp0) = (growth.fp0(), growth.gp0());

    let lambda = if layout.is_full() {
        lambda0(layout.habitat(), bc, 1e-15)? - fp0
    } else {
        let eps = 1e-12 * (bracket.hi - bracket.lo);
        let (lo, hi) = (bracket.lo + eps, bracket.hi - eps);
        let res = |x: f64| normalized_residual(x, layout, bc, growth);
        let (a, fa, b, _) =
            first_sign_change(res, lo, hi, SCAN_PANELS).ok_or(EigenError::NoSignChange { lo, hi })?;
        let lambda = bisect(res, a, fa, b, tol);
        if !bracket.contains_strict(lambda) {
            return Err(EigenError::OutsideBracket { lambda, lo: bracket.lo, hi: bracket.hi });
        }
        lambda
    };
    if !(lambda + fp0 > 0.0) && !layout.is_full() {
        return Err(EigenError::BelowLogisticFloor { lambda, fp0 });
    }

    let grid = sample_phi(lambda, fp0, gp0, layout, bc, NODE_GRID);
    let nodes = count_interior_nodes(&grid);
    if nodes != 0 {
        return Err(EigenError::NodeCountNonzero { lambda, nodes });
    }

    Ok(SpectralResult {
        lambda1: lambda,
        case_tag: classify_case(lambda, gp0, H2_BAND),
        f_tilde: sqrt((fp0 + lambda).max(0.0)),
        g_tilde: sqrt(abs(gp0 + lambda)),
        residual: normalized_residual(lambda, layout, bc, growth),
        phi_samples: sample_phi(lambda, fp0, gp0, layout, bc, RESULT_SAMPLES),
        bracket,
        fp0,
        gp0,
    })
}

fn count_interior_nodes(samples: &[(f64, f64)]) -> usize {
    let n = samples.len();
    if n < 3 {
        return 0;
    }
    let inner = &samples[1..n - 1];
    let mut nodes = 0;
    let mut prev = 0.0f64;
    for &(_, v) in inner {
        if v == 0.0 {
            nodes += 1;
            continue;
        }
        if prev != 0.0 && (prev < 0.0) != (v < 0.0) {
            nodes += 1;
        }
        prev = v;
    }
    nodes
}

struct Walker {
    lambda: f64,
    zone: (f64, f64),
    pots: (f64, f64),
    x: f64,
    v: [f64; 2],
    log_scale: f64,
}

impl Walker {
    fn advance(&mut self, to: f64) {
        let (z0, z1) = self.zone;
        while self.x != to {
            let forward = to > self.x;
            let mut stop = to;
            for p in [z0, z1] {
                if forward && p > self.x && p < stop || !forward && p < self.x && p > stop {
                    stop = p;
                }
            }
            let mid = 0.5 * (self.x + stop);
            let pot = if mid >= z0 && mid <= z1 { self.pots.0 } else { self.pots.1 };
            let (m, s) = segment_scaled(self.lambda, pot, abs(stop - self.x));
            let m = if forward {
                m
            } else {
                TransferMatrix { m11: m.m22, m12: -m.m12, m21: -m.m21, m22: m.m11 }
            };
            let v = m.apply(self.v);
            let norm = hypot(v[0], v[1]);
            if norm > 0.0 {
                self.v = [v[0] / norm, v[1] / norm];
                self.log_scale += s + ln(norm);
            }
            self.x = stop;
        }
    }
}

/// Samples of the eigenfunction on `n` equispaced points of `[0, L]`, scaled
/// so that the largest value is `+1`. The left part is propagated from
/// `(a1, a2)` at `x = 0`, the right part backwards from `x = L`, and the two
/// are joined at the middle of the zone.
fn sample_phi(
    lambda: f64,
    fp0: f64,
    gp0: f64,
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    n: usize,
) -> Vec<(f64, f64)> {
    let habitat = layout.habitat();
    let joint = layout.alpha() + 0.5 * layout.l();
    let denom = (n.max(2) - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| if i + 1 == n { habitat } else { habitat * i as f64 / denom }).collect();
    let walker = |x: f64, v: [f64; 2]| Walker {
        lambda,
        zone: (layout.alpha(), layout.zone_end()),
        pots: (-fp0, -gp0),
        x,
        v,
        log_scale: 0.0,
    };

    let mut raw: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 0.0); n];
    let mut fwd = walker(0.0, [bc.a1, bc.a2]);
    for (i, &x) in xs.iter().enumerate().take_while(|(_, x)| **x <= joint) {
        fwd.advance(x);
        raw[i] = (x, fwd.v[0], fwd.log_scale);
    }
    fwd.advance(joint);
    let mut bwd = walker(habitat, [bc.b1, -bc.b2]);
    let mut right = Vec::new();
    for (i, &x) in xs.iter().enumerate().rev().take_while(|(_, x)| **x > joint) {
        bwd.advance(x);
        right.push((i, x, bwd.v[0], bwd.log_scale));
    }
    bwd.advance(joint);
    let k = if abs(fwd.v[0]) >= abs(fwd.v[1]) { 0 } else { 1 };
    let flip = if (fwd.v[k] < 0.0) != (bwd.v[k] < 0.0) { -1.0 } else { 1.0 };
    let shift = ln(abs(fwd.v[k])) + fwd.log_scale - ln(abs(bwd.v[k])) - bwd.log_scale;
    for (i, x, v, s) in right {
        raw[i] = (x, flip * v, s + shift);
    }

    let peak = raw
        .iter()
        .filter(|r| r.1 != 0.0)
        .map(|r| ln(abs(r.1)) + r.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let sign = raw
        .iter()
        .filter(|r| r.1 != 0.0)
        .find(|r| ln(abs(r.1)) + r.2 == peak)
        .map_or(1.0, |r| r.1.signum());
    raw.into_iter()
        .map(|(x, v, s)| {
            let val = if v == 0.0 { 0.0 } else { sign * v.signum() * exp(ln(abs(v)) + s - peak) };
            (x, val)
        })
        .collect()
}

/// Principal eigenfunction on `n_samples` equispaced points, max-normalized.
///
/// Values at Dirichlet ends are set to exactly zero.
pub fn eigenfunction(
    result: &SpectralResult,
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    n_samples: usize,
) -> Vec<(f64, f64)> {
    let mut s = sample_phi(result.lambda1, result.fp0, result.gp0, layout, bc, n_samples.max(2));
    if bc.kind_left() == BoundaryKind::Dirichlet {
        s[0].1 = 0.0;
    }
    if bc.kind_right() == BoundaryKind::Dirichlet {
        let last = s.len() - 1;
        s[last].1 = 0.0;
    }
    s
}

/// The constants `R_1, R_2, A, B, C, D, T_1..T_4, R^_1, R^_2` built from
/// `f~ = sqrt(f'(0)+lambda)` and `g~ = sqrt(|g'(0)+lambda|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperConstants {
    pub f_tilde: f64,
    pub g_tilde: f64,
    pub r1: f64,
    pub r2: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub r1_hat: f64,
    pub r2_hat: f64,
}

impl PaperConstants {
    pub fn new(lambda: f64, layout: &ZoneLayout, bc: &BoundarySpec, growth: &GrowthPair) -> Self {
        let f = sqrt(growth.fp0() + lambda);
        let g = sqrt(abs(growth.gp0() + lambda));
        let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
        let BoundarySpec { a1, a2, b1, b2 } = *bc;
        let r1 = (a1 * g - a2) / (a1 * g + a2);
        let r2 = exp(-2.0 * g * habitat) * (b1 * g - b2) / (b1 * g + b2);
        let e_a = exp(g * al);
        let e_al = exp(g * (al + l));
        let a = r1 / e_a + e_a;
        let b = 1.0 / e_al + r2 * e_al;
        let c = -r1 / e_a + e_a;
        let d = -1.0 / e_al + r2 * e_al;
        let sq = |x: f64| x * x;
        Self {
            f_tilde: f,
            g_tilde: g,
            r1,
            r2,
            a,
            b,
            c,
            d,
            t1: b * c - a * d,
            t2: f * f * a * b + g * g * c * d,
            t3: b * c + a * d,
            t4: a * b * f * f - c * d * g * g,
            r1_hat: 2.0 * a1 * a2 / sq(a1 * g + a2),
            r2_hat: 2.0 * b1 * b2 / sq(b1 * g + b2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationResidual {
    pub equation: Equation,
    /// Pole-free residual of `tan(f~ l) = num/den`:
    /// `(sin(f~ l) den - num cos(f~ l)) / hypot(num, den)`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranscendentalReport {
    pub case_tag: CaseTag,
    pub residuals: Vec<EquationResidual>,
}

impl TranscendentalReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| abs(r.residual)).fold(0.0, f64::max)
    }
}

const RESIDUAL_LIMIT: f64 = 1e-6;

fn tan_residual(theta: f64, num: f64, den: f64) -> f64 {
    (sin(theta) * den - num * cos(theta)) / hypot(num, den)
}

/// `(num, den)` of the H1 Neumann/Dirichlet special cases, written out in
/// exponentials.
fn h1_special(f: f64, g: f64, layout: &ZoneLayout, left_dirichlet: bool, right_dirichlet: bool) -> (f64, f64) {
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let e = exp(-2.0 * g * habitat);
    let ea = exp(g * al);
    let eal = exp(g * (al + l));
    let sgn = if right_dirichlet { -1.0 } else { 1.0 };
    let p = 1.0 / ea + ea;
    let m = -1.0 / ea + ea;
    let bq = 1.0 / eal + sgn * e * eal;
    let dq = -1.0 / eal + sgn * e * eal;
    let mixed = if left_dirichlet == right_dirichlet { -1.0 } else { 1.0 };
    let num = 2.0 * f * g * (exp(-g * l) + mixed * e * exp(g * l));
    let den = if left_dirichlet {
        let bq_n = 1.0 / eal + e * eal;
        let dq_n = -1.0 / eal + e * eal;
        -g * g * p * bq_n - f * f * m * dq_n
    } else {
        f * f * p * bq + g * g * m * dq
    };
    (num, den)
}

fn h2_h3_nd(f: f64, g: f64, tag: CaseTag, layout: &ZoneLayout) -> (Equation, f64, f64) {
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let d = layout.right_gap();
    if tag == CaseTag::H2 {
        return (Equation::H2NeumannDirichlet, 1.0, f * d);
    }
    let tnd = f * f * cos(g * al) * sin(g * d) + g * g * sin(g * al) * cos(g * d);
    (Equation::H3NeumannDirichlet, f * g * cos(g * (habitat - l)), tnd)
}

fn h2_h3_dd(f: f64, g: f64, tag: CaseTag, layout: &ZoneLayout) -> (Equation, f64, f64) {
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let d = layout.right_gap();
    if tag == CaseTag::H2 {
        return (Equation::H2Dirichlet, f * (habitat - l), f * f * al * d - 1.0);
    }
    let tdd = f * f * sin(g * al) * sin(g * d) - g * g * cos(g * al) * cos(g * d);
    (Equation::H3Dirichlet, f * g * sin(g * (habitat - l)), tdd)
}

/// Evaluates every closed-form equation that applies to `result` and fails if
/// any residual exceeds `1e-6`.
pub fn verify_transcendental(
    result: &SpectralResult,
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
) -> Result<TranscendentalReport, EigenError> {
    let lambda = result.lambda1;
    let f = sqrt(growth.fp0() + lambda);
    let g = sqrt(abs(growth.gp0() + lambda));
    let theta = f * layout.l();
    let tag = result.case_tag;
    let mut out = Vec::new();
    let mut push = |equation, num, den| {
        out.push(EquationResidual { equation, residual: tan_residual(theta, num, den) });
    };
    use BoundaryKind::*;
    let kinds = bc.kinds();
    match tag {
        CaseTag::H1 => {
            let k = PaperConstants::new(lambda, layout, bc, growth);
            push(Equation::H1Robin, f * g * k.t1, k.t2);
            match kinds {
                (Neumann, Neumann) => {
                    let (n, d) = h1_special(f, g, layout, false, false);
                    push(Equation::H1Neumann, n, d);
                }
                (Dirichlet, Dirichlet) => {
                    let (n, d) = h1_special(f, g, layout, true, true);
                    push(Equation::H1Dirichlet, n, d);
                }
                (Neumann, Dirichlet) => {
                    let (n, d) = h1_special(f, g, layout, false, true);
                    push(Equation::H1NeumannDirichlet, n, d);
                }
                (Dirichlet, Neumann) => {
                    let (n, d) = h1_special(f, g, &layout.reflected(), false, true);
                    push(Equation::H1NeumannDirichlet, n, d);
                }
                _ => {}
            }
        }
        CaseTag::H2 | CaseTag::H3 => match kinds {
            (Dirichlet, Dirichlet) => {
                let (e, n, d) = h2_h3_dd(f, g, tag, layout);
                push(e, n, d);
            }
            (Neumann, Dirichlet) => {
                let (e, n, d) = h2_h3_nd(f, g, tag, layout);
                push(e, n, d);
            }
            (Dirichlet, Neumann) => {
                let (e, n, d) = h2_h3_nd(f, g, tag, &layout.reflected());
                push(e, n, d);
            }
            _ => {}
        },
    }
    if let Some(bad) = out.iter().find(|r| !(abs(r.residual) <= RESIDUAL_LIMIT)) {
        return Err(EigenError::ResidualTooLarge { equation: bad.equation, residual: bad.residual });
    }
    Ok(TranscendentalReport { case_tag: tag, residuals: out })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::EIGEN_TOL;
    use proptest::prelude::*;

    fn any_bc() -> impl Strategy<Value = BoundarySpec> {
        prop_oneof![
            Just(BoundarySpec::NN),
            Just(BoundarySpec::DD),
            Just(BoundarySpec::ND),
            Just(BoundarySpec::DN),
            (0.0f64..2.0, 0.0f64..2.0, 0.0f64..2.0, 0.0f64..2.0)
                .prop_filter("nondegenerate", |(a, b, c, d)| (*a + *b) > 0.05 && (*c + *d) > 0.05)
                .prop_map(|(a, b, c, d)| BoundarySpec::new(a, b, c, d).unwrap()),
        ]
    }

    fn any_growth() -> impl Strategy<Value = GrowthPair> {
        (0.05f64..1.0, 0.02f64..0.9).prop_map(|(r, a)| GrowthPair::cubic_logistic(r, a).unwrap())
    }

    fn any_layout() -> impl Strategy<Value = ZoneLayout> {
        (2.0f64..20.0, 0.02f64..0.98, 0.0f64..1.0).prop_map(|(habitat, lf, af)| {
            let l = lf * habitat;
            ZoneLayout::new(habitat, af * (habitat - l), l).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn determinant_is_one(lambda in -2.0f64..2.0, pot in -2.0f64..2.0, len in 0.0f64..12.0) {
            let m = segment_transfer(lambda, pot, len);
            let scale = m.m11.abs().max(m.m22.abs()).max(1.0);
            prop_assert!((m.det() - 1.0).abs() <= 1e-10 * scale * scale);
        }

        #[test]
        fn bracket_and_floor(z in any_layout(), bc in any_bc(), g in any_growth()) {
            let r = principal_eigenvalue(&z, &bc, &g, EIGEN_TOL).unwrap();
            prop_assert!(r.bracket.lo + 1e-10 < r.lambda1 && r.lambda1 < r.bracket.hi - 1e-10);
            prop_assert!(r.lambda1 + g.fp0() > 1e-10);
            prop_assert!(r.phi_samples[1..r.phi_samples.len() - 1].iter().all(|p| p.1 > 0.0));
        }

        #[test]
        fn decreasing_in_zone_length(z in any_layout(), bc in any_bc(), g in any_growth(), t in 0.05f64..0.95) {
            let room = z.habitat() - z.zone_end();
            prop_assume!(room > 1e-3);
            let longer = ZoneLayout::new(z.habitat(), z.alpha(), z.l() + t * room).unwrap();
            let a = principal_eigenvalue(&z, &bc, &g, EIGEN_TOL).unwrap().lambda1;
            let b = principal_eigenvalue(&longer, &bc, &g, EIGEN_TOL).unwrap().lambda1;
            prop_assert!(b < a);
        }

        #[test]
        fn reflection(z in any_layout(), bc in any_bc(), g in any_growth()) {
            let a = principal_eigenvalue(&z, &bc, &g, EIGEN_TOL).unwrap().lambda1;
            let b = principal_eigenvalue(&z.reflected(), &bc.reflected(), &g, EIGEN_TOL).unwrap().lambda1;
            prop_assert!((a - b).abs() <= 1e-8);
        }

        #[test]
        fn closed_form_equations_hold(z in any_layout(), bc in any_bc(), g in any_growth()) {
            let r = principal_eigenvalue(&z, &bc, &g, EIGEN_TOL).unwrap();
            prop_assert!(verify_transcendental(&r, &z, &bc, &g).is_ok());
        }
    }
}
