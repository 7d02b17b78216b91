//! Domain types shared by every other module: growth laws, boundary rows,
//! zone layouts and the small value types that describe results.

use alloc::sync::Arc;
use core::fmt;

use crate::math::abs;

/// Evaluable growth law `u -> F(u)`.
pub type GrowthFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// `f'(0)` must be positive.
    NonPositiveLogisticSlope(f64),
    /// `g'(0)` must be negative.
    NonNegativeAlleeSlope(f64),
    /// `f'(0) >= -g'(0)` is required.
    SlopeOrdering { fp0: f64, gp0: f64 },
    AlleeThresholdOutOfRange(f64),
    NonPositiveRate(f64),
    NegativeCoefficient,
    DegenerateBoundary { end: &'static str },
    InvalidLength(f64),
    ZoneOutsideHabitat { alpha: f64, l: f64, habitat: f64 },
    UnknownBoundaryKeyword,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveLogisticSlope(v) => write!(f, "f'(0) must be > 0, got {v}"),
            Self::NonNegativeAlleeSlope(v) => write!(f, "g'(0) must be < 0, got {v}"),
            Self::SlopeOrdering { fp0, gp0 } => {
                write!(f, "growth slopes must satisfy f'(0) >= -g'(0), got f'(0)={fp0}, g'(0)={gp0}")
            }
            Self::AlleeThresholdOutOfRange(a) => write!(f, "Allee threshold must lie in (0,1), got {a}"),
            Self::NonPositiveRate(r) => write!(f, "growth rate must be > 0, got {r}"),
            Self::NegativeCoefficient => f.write_str("boundary coefficients must be nonnegative"),
            Self::DegenerateBoundary { end } => {
                write!(f, "both boundary coefficients vanish at the {end} end")
            }
            Self::InvalidLength(v) => write!(f, "length must be finite and positive, got {v}"),
            Self::ZoneOutsideHabitat { alpha, l, habitat } => {
                write!(f, "zone [{alpha}, {alpha}+{l}] does not fit in [0, {habitat}]")
            }
            Self::UnknownBoundaryKeyword => f.write_str("boundary keyword must be one of NN, ND, DN, DD"),
        }
    }
}

impl core::error::Error for ModelError {}

/// The two growth laws: logistic `f` inside the zone, strong-Allee `g` outside.
///
/// The eigenvalue modules only read the slopes; the simulator evaluates the
/// full laws.
#[derive(Clone)]
pub struct GrowthPair {
    fp0: f64,
    gp0: f64,
    allee_a: f64,
    rate_r: f64,
    f_eval: GrowthFn,
    g_eval: GrowthFn,
}

impl fmt::Debug for GrowthPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthPair")
            .field("fp0", &self.fp0)
            .field("gp0", &self.gp0)
            .field("allee_a", &self.allee_a)
            .field("rate_r", &self.rate_r)
            .finish_non_exhaustive()
    }
}

fn check_slopes(fp0: f64, gp0: f64) -> Result<(), ModelError> {
    if !(fp0 > 0.0 && fp0.is_finite()) {
        return Err(ModelError::NonPositiveLogisticSlope(fp0));
    }
    if !(gp0 < 0.0 && gp0.is_finite()) {
        return Err(ModelError::NonNegativeAlleeSlope(gp0));
    }
    if fp0 < -gp0 {
        return Err(ModelError::SlopeOrdering { fp0, gp0 });
    }
    Ok(())
}

impl GrowthPair {
    /// `f(u) = r u (1-u)`, `g(u) = r u (1-u)(u-a)`; so `f'(0) = r`, `g'(0) = -r a`.
    pub fn cubic_logistic(rate_r: f64, allee_a: f64) -> Result<Self, ModelError> {
        if !(rate_r > 0.0 && rate_r.is_finite()) {
            return Err(ModelError::NonPositiveRate(rate_r));
        }
        if !(allee_a > 0.0 && allee_a < 1.0) {
            return Err(ModelError::AlleeThresholdOutOfRange(allee_a));
        }
        let fp0 = rate_r;
        let gp0 = -rate_r * allee_a;
        check_slopes(fp0, gp0)?;
        Ok(Self {
            fp0,
            gp0,
            allee_a,
            rate_r,
            f_eval: Arc::new(move |u| rate_r * u * (1.0 - u)),
            g_eval: Arc::new(move |u| rate_r * u * (1.0 - u) * (u - allee_a)),
        })
    }

    /// Default laws with prescribed slopes: `r = f'(0)`, `a = -g'(0)/f'(0)`.
    ///
    /// Needs `f'(0) > -g'(0)` strictly so that `a < 1`.
    pub fn from_slopes(fp0: f64, gp0: f64) -> Result<Self, ModelError> {
        check_slopes(fp0, gp0)?;
        Self::cubic_logistic(fp0, -gp0 / fp0)
    }

    /// User-supplied laws. Only the slopes are validated; `f`, `g` are
    /// trusted to be consistent with them.
    pub fn custom(
        fp0: f64,
        gp0: f64,
        allee_a: f64,
        rate_r: f64,
        f_eval: GrowthFn,
        g_eval: GrowthFn,
    ) -> Result<Self, ModelError> {
        check_slopes(fp0, gp0)?;
        if !(allee_a > 0.0 && allee_a < 1.0) {
            return Err(ModelError::AlleeThresholdOutOfRange(allee_a));
        }
        if !(rate_r > 0.0 && rate_r.is_finite()) {
            return Err(ModelError::NonPositiveRate(rate_r));
        }
        Ok(Self { fp0, gp0, allee_a, rate_r, f_eval, g_eval })
    }

    pub fn fp0(&self) -> f64 {
        self.fp0
    }
    pub fn gp0(&self) -> f64 {
        self.gp0
    }
    pub fn allee_a(&self) -> f64 {
        self.allee_a
    }
    pub fn rate_r(&self) -> f64 {
        self.rate_r
    }

    /// Logistic law used inside the zone.
    pub fn f(&self, u: f64) -> f64 {
        (self.f_eval)(u)
    }

    /// Allee law used outside the zone.
    pub fn g(&self, u: f64) -> f64 {
        (self.g_eval)(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Neumann,
    Dirichlet,
    Robin,
}

impl BoundaryKind {
    fn from_pair(flux: f64, value: f64) -> Self {
        if value == 0.0 {
            Self::Neumann
        } else if flux == 0.0 {
            Self::Dirichlet
        } else {
            Self::Robin
        }
    }

    pub fn letter(self) -> char {
        match self {
            Self::Neumann => 'N',
            Self::Dirichlet => 'D',
            Self::Robin => 'R',
        }
    }
}

/// Robin rows `a1 u_x(0) - a2 u(0) = 0` and `b1 u_x(L) + b2 u(L) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl BoundarySpec {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<Self, ModelError> {
        let all = [a1, a2, b1, b2];
        if all.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(ModelError::NegativeCoefficient);
        }
        if a1 == 0.0 && a2 == 0.0 {
            return Err(ModelError::DegenerateBoundary { end: "left" });
        }
        if b1 == 0.0 && b2 == 0.0 {
            return Err(ModelError::DegenerateBoundary { end: "right" });
        }
        Ok(Self { a1, a2, b1, b2 })
    }

    pub const NN: Self = Self { a1: 1.0, a2: 0.0, b1: 1.0, b2: 0.0 };
    pub const DD: Self = Self { a1: 0.0, a2: 1.0, b1: 0.0, b2: 1.0 };
    pub const ND: Self = Self { a1: 1.0, a2: 0.0, b1: 0.0, b2: 1.0 };
    pub const DN: Self = Self { a1: 0.0, a2: 1.0, b1: 1.0, b2: 0.0 };

    /// Parses `NN`, `ND`, `DN` or `DD` (left end first).
    pub fn from_keyword(kw: &str) -> Result<Self, ModelError> {
        match kw {
            "NN" | "nn" => Ok(Self::NN),
            "ND" | "nd" => Ok(Self::ND),
            "DN" | "dn" => Ok(Self::DN),
            "DD" | "dd" => Ok(Self::DD),
            _ => Err(ModelError::UnknownBoundaryKeyword),
        }
    }

    pub fn kind_left(&self) -> BoundaryKind {
        BoundaryKind::from_pair(self.a1, self.a2)
    }

    pub fn kind_right(&self) -> BoundaryKind {
        BoundaryKind::from_pair(self.b1, self.b2)
    }

    pub fn kinds(&self) -> (BoundaryKind, BoundaryKind) {
        (self.kind_left(), self.kind_right())
    }

    /// True if either end is a genuine Robin row.
    pub fn has_robin(&self) -> bool {
        self.kind_left() == BoundaryKind::Robin || self.kind_right() == BoundaryKind::Robin
    }

    /// Boundary rows seen under `y = L - x`: the two ends swap.
    pub fn reflected(&self) -> Self {
        Self { a1: self.b1, a2: self.b2, b1: self.a1, b2: self.a2 }
    }

    /// Two-letter label such as `ND` or `RN`.
    pub fn label(&self) -> [char; 2] {
        [self.kind_left().letter(), self.kind_right().letter()]
    }
}

/// Habitat `[0, habitat]` with protection zone `[alpha, alpha + l]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneLayout {
    habitat: f64,
    alpha: f64,
    l: f64,
}

impl ZoneLayout {
    pub fn new(habitat: f64, alpha: f64, l: f64) -> Result<Self, ModelError> {
        if !(habitat > 0.0 && habitat.is_finite()) {
            return Err(ModelError::InvalidLength(habitat));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(ModelError::InvalidLength(l));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) || alpha + l > habitat * (1.0 + 4.0 * f64::EPSILON) {
            return Err(ModelError::ZoneOutsideHabitat { alpha, l, habitat });
        }
        Ok(Self { habitat, alpha, l })
    }

    /// Habitat length `L`.
    pub fn habitat(&self) -> f64 {
        self.habitat
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn l(&self) -> f64 {
        self.l
    }
    pub fn zone_end(&self) -> f64 {
        self.alpha + self.l
    }

    /// Length of the unprotected stretch to the right of the zone.
    pub fn right_gap(&self) -> f64 {
        (self.habitat - self.alpha - self.l).max(0.0)
    }

    /// Largest admissible start for this zone length.
    pub fn max_alpha(&self) -> f64 {
        (self.habitat - self.l).max(0.0)
    }

    /// Same zone length at a different start.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(self.habitat, alpha, self.l)
    }

    /// Mirror image under `x -> L - x`.
    pub fn reflected(&self) -> Self {
        Self { habitat: self.habitat, alpha: self.right_gap(), l: self.l }
    }

    /// Zone covers the whole habitat.
    pub fn is_full(&self) -> bool {
        self.alpha == 0.0 && self.l >= self.habitat
    }

    /// The three constant-potential segments `(is_zone, length)` left to right.
    pub(crate) fn segments(&self) -> [(bool, f64); 3] {
        [(false, self.alpha), (true, self.l), (false, self.right_gap())]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `g'(0) + lambda_1 < 0`: exponential outer segments.
    H1,
    /// `g'(0) + lambda_1 = 0`: linear outer segments.
    H2,
    /// `g'(0) + lambda_1 > 0`: oscillatory outer segments.
    H3,
}

pub fn classify_case(lambda: f64, gp0: f64, tol: f64) -> CaseTag {
    let s = gp0 + lambda;
    if abs(s) <= tol {
        CaseTag::H2
    } else if s < 0.0 {
        CaseTag::H1
    } else {
        CaseTag::H3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Persist,
    Extinct,
    Undecided,
}

/// A fate call with the evidence behind it. Either piece of evidence may be
/// missing: spectral verdicts carry no simulation and vice versa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FateVerdict {
    pub verdict: Verdict,
    pub lambda1: Option<f64>,
    /// Long-time minimum density, divided by the Dirichlet weight when an end
    /// is Dirichlet.
    pub sim_floor: Option<f64>,
}

impl FateVerdict {
    /// Verdict read off the sign of `lambda_1` alone.
    pub fn from_lambda(lambda1: f64) -> Self {
        let verdict = if lambda1 < 0.0 {
            Verdict::Persist
        } else if lambda1 > 0.0 {
            Verdict::Extinct
        } else {
            Verdict::Undecided
        };
        Self { verdict, lambda1: Some(lambda1), sim_floor: None }
    }
}
