//! Closed-form `d lambda_1 / d alpha` and a finite-difference reference.

use core::fmt;

use crate::eigen::{principal_eigenvalue, EigenError, PaperConstants, SpectralResult};
use crate::math::{abs, cos, exp, sin, sqrt};
use crate::model::{BoundaryKind, BoundarySpec, CaseTag, GrowthPair, ZoneLayout};
use crate::EIGEN_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SensitivityFormula {
    H1Robin,
    H1Neumann,
    H1Dirichlet,
    H1NeumannDirichlet,
    H2Dirichlet,
    H2NeumannDirichlet,
    H3Dirichlet,
    H3NeumannDirichlet,
}

impl SensitivityFormula {
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityTerms {
    pub formula: SensitivityFormula,
    /// True when a Dirichlet/Neumann pair was evaluated through the mirrored
    /// Neumann/Dirichlet layout and negated.
    pub reflected: bool,
    /// Only defined in the exponential regime.
    pub constants: Option<PaperConstants>,
    pub numerator: f64,
    pub e_denominator: f64,
    pub dlambda_dalpha: f64,
    /// The general Robin expression when a specialized one was used, or the
    /// mirrored specialized expression for Dirichlet/Neumann.
    pub cross_check: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SensitivityError {
    Eigen(EigenError),
    NoFormula { case_tag: CaseTag, bc: [char; 2] },
    SingularDenominator { e: f64, scale: f64 },
    InvalidStep(f64),
}

impl fmt::Display for SensitivityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Eigen(e) => write!(f, "{e}"),
            Self::NoFormula { case_tag, bc } => {
                write!(f, "no closed-form derivative for {case_tag:?} with {}{} ends", bc[0], bc[1])
            }
            Self::SingularDenominator { e, scale } => {
                write!(f, "derivative denominator {e:e} is negligible against scale {scale:e}")
            }
            Self::InvalidStep(s) => write!(f, "finite-difference step must be > 0, got {s}"),
        }
    }
}

impl core::error::Error for SensitivityError {}

impl From<EigenError> for SensitivityError {
    fn from(e: EigenError) -> Self {
        Self::Eigen(e)
    }
}

const SINGULAR_REL: f64 = 1e-14;

struct Ratio {
    num: f64,
    den: f64,
    scale: f64,
}

impl Ratio {
    fn from_terms(num: f64, terms: &[f64]) -> Self {
        let den = terms.iter().sum();
        let scale = terms.iter().map(|t| abs(*t)).sum();
        Self { num, den, scale }
    }

    fn value(&self) -> Result<f64, SensitivityError> {
        if !(abs(self.den) > SINGULAR_REL * self.scale) {
            return Err(SensitivityError::SingularDenominator { e: self.den, scale: self.scale });
        }
        Ok(self.num / self.den)
    }
}

fn sec2(x: f64) -> f64 {
    let c = cos(x);
    1.0 / (c * c)
}

fn h1_general(k: &PaperConstants, layout: &ZoneLayout) -> Ratio {
    let (f, g) = (k.f_tilde, k.g_tilde);
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let (f2, g2) = (f * f, g * g);
    let num = f * g2 * (f2 + g2) * k.t1 * k.t3;
    let ac = k.a * k.a * f2 + k.c * k.c * g2;
    let bd = k.b * k.b * f2 + k.d * k.d * g2;
    Ratio::from_terms(
        num,
        &[
            -(f / (2.0 * g) + g / (2.0 * f)) * k.t1 * k.t4,
            f * (f2 + g2) / 2.0 * k.t1 * al * k.t3,
            -2.0 * f * ac * (habitat - l) * k.r2,
            f * bd * k.r1_hat,
            f * ac * exp(-2.0 * g * habitat) * k.r2_hat,
            -l * (k.t2 * k.t2 + f2 * g2 * k.t1 * k.t1) / (2.0 * f),
        ],
    )
}

/// Neumann/Dirichlet pairs in the exponential regime, where the boundary
/// contribution collapses to `-/+ 2 f~ (A^2 f~^2 + C^2 g~^2)(L-l) e^{-2 g~ L}`.
fn h1_special(k: &PaperConstants, layout: &ZoneLayout, sign: f64) -> Ratio {
    let (f, g) = (k.f_tilde, k.g_tilde);
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let (f2, g2) = (f * f, g * g);
    let num = f * g2 * (f2 + g2) * k.t1 * k.t3;
    let ac = k.a * k.a * f2 + k.c * k.c * g2;
    Ratio::from_terms(
        num,
        &[
            -(f / (2.0 * g) + g / (2.0 * f)) * k.t1 * k.t4,
            f * (f2 + g2) / 2.0 * k.t1 * al * k.t3,
            sign * 2.0 * f * ac * (habitat - l) * exp(-2.0 * g * habitat),
            -l * (k.t2 * k.t2 + f2 * g2 * k.t1 * k.t1) / (2.0 * f),
        ],
    )
}

fn h2_dd(f: f64, layout: &ZoneLayout) -> Ratio {
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let d = habitat - al - l;
    let f2 = f * f;
    let q = f2 * al * d - 1.0;
    Ratio::from_terms(
        f * (habitat - l) * (-f2 * d + f2 * al),
        &[
            q * q * sec2(f * l) * l / (2.0 * f),
            -(habitat - l) * q / (2.0 * f),
            (habitat - l) * f * al * d,
        ],
    )
}

fn h2_nd(f: f64, layout: &ZoneLayout) -> Ratio {
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let d = habitat - al - l;
    let f2 = f * f;
    Ratio::from_terms(2.0 * f2, &[f2 * sec2(f * l) * l * d * d, d])
}

fn h3_dd(f: f64, g: f64, layout: &ZoneLayout) -> Ratio {
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let d = habitat - al - l;
    let (f2, g2) = (f * f, g * g);
    let (f3, g3) = (f2 * f, g2 * g);
    let s_ll = sin(g * (habitat - l));
    let c_ll = cos(g * (habitat - l));
    let s_mid = sin(g * (habitat - 2.0 * al - l));
    let (sa, ca, sd, cd) = (sin(g * al), cos(g * al), sin(g * d), cos(g * d));
    let t = f2 * sa * sd - g2 * ca * cd;
    Ratio::from_terms(
        (f * g2 * g2 - f3 * g2) * s_ll * s_mid,
        &[
            t * t * sec2(f * l) * l / (2.0 * f),
            -0.5 * f * g * s_ll * c_ll,
            -f3 / (2.0 * g) * s_ll * sa * sd,
            g3 / (2.0 * f) * s_ll * ca * cd,
            0.5 * f * g2 * (habitat - l) * ca * ca,
            0.5 * f3 * (habitat - l) * sa * sa,
            0.5 * (f3 - f * g2) * al * s_ll * s_mid,
        ],
    )
}

fn h3_nd(f: f64, g: f64, layout: &ZoneLayout) -> Ratio {
    let (habitat, al, l) = (layout.habitat(), layout.alpha(), layout.l());
    let d = habitat - al - l;
    let (f2, g2) = (f * f, g * g);
    let (f3, g3) = (f2 * f, g2 * g);
    let s_ll = sin(g * (habitat - l));
    let c_ll = cos(g * (habitat - l));
    let c_mid = cos(g * (habitat - 2.0 * al - l));
    let (sa, ca, sd, cd) = (sin(g * al), cos(g * al), sin(g * d), cos(g * d));
    let t = f2 * ca * sd + g2 * sa * cd;
    Ratio::from_terms(
        c_ll * c_mid * (f3 * g2 - f * g2 * g2),
        &[
            t * t * sec2(f * l) * l / (2.0 * f),
            0.5 * f * g * c_ll * s_ll,
            -f3 / (2.0 * g) * c_ll * ca * sd,
            -g3 / (2.0 * f) * c_ll * sa * cd,
            0.5 * f3 * (habitat - l) * ca * ca,
            0.5 * f * g2 * (habitat - l) * sa * sa,
            -0.5 * (f3 - f * g2) * al * c_ll * c_mid,
        ],
    )
}

/// Closed-form `d lambda_1 / d alpha` at the eigenvalue in `result`.
pub fn dlambda_dalpha_closed(
    result: &SpectralResult,
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
) -> Result<SensitivityTerms, SensitivityError> {
    use BoundaryKind::*;
    let lambda = result.lambda1;
    let f = sqrt(growth.fp0() + lambda);
    let g = sqrt(abs(growth.gp0() + lambda));
    let tag = result.case_tag;
    let kinds = bc.kinds();
    let no_formula = SensitivityError::NoFormula { case_tag: tag, bc: bc.label() };

    let terms = |formula, reflected, constants, r: &Ratio, sign: f64, cross_check| {
        Ok(SensitivityTerms {
            formula,
            reflected,
            constants,
            numerator: sign * r.num,
            e_denominator: r.den,
            dlambda_dalpha: sign * r.value()?,
            cross_check,
        })
    };

    match tag {
        CaseTag::H1 => {
            let k = PaperConstants::new(lambda, layout, bc, growth);
            let general = h1_general(&k, layout);
            let special = match kinds {
                (Neumann, Neumann) => Some((SensitivityFormula::H1Neumann, -1.0)),
                (Dirichlet, Dirichlet) => Some((SensitivityFormula::H1Dirichlet, 1.0)),
                (Neumann, Dirichlet) => Some((SensitivityFormula::H1NeumannDirichlet, 1.0)),
                _ => None,
            };
            if let Some((formula, sign)) = special {
                let r = h1_special(&k, layout, sign);
                return terms(formula, false, Some(k), &r, 1.0, general.value().ok());
            }
            let mirrored = if kinds == (Dirichlet, Neumann) {
                let z = layout.reflected();
                let km = PaperConstants::new(lambda, &z, &bc.reflected(), growth);
                h1_special(&km, &z, 1.0).value().ok().map(|v| -v)
            } else {
                None
            };
            terms(SensitivityFormula::H1Robin, false, Some(k), &general, 1.0, mirrored)
        }
        CaseTag::H2 | CaseTag::H3 => {
            let h2 = tag == CaseTag::H2;
            match kinds {
                (Dirichlet, Dirichlet) => {
                    let (formula, r) = if h2 {
                        (SensitivityFormula::H2Dirichlet, h2_dd(f, layout))
                    } else {
                        (SensitivityFormula::H3Dirichlet, h3_dd(f, g, layout))
                    };
                    terms(formula, false, None, &r, 1.0, None)
                }
                (Neumann, Dirichlet) | (Dirichlet, Neumann) => {
                    let reflected = kinds.0 == Dirichlet;
                    let z = if reflected { layout.reflected() } else { *layout };
                    let (formula, r) = if h2 {
                        (SensitivityFormula::H2NeumannDirichlet, h2_nd(f, &z))
                    } else {
                        (SensitivityFormula::H3NeumannDirichlet, h3_nd(f, g, &z))
                    };
                    terms(formula, reflected, None, &r, if reflected { -1.0 } else { 1.0 }, None)
                }
                _ => Err(no_formula),
            }
        }
    }
}

/// Default finite-difference step as a fraction of the habitat length.
pub const FD_STEP_FRACTION: f64 = 1e-4;

/// Richardson-refined difference quotient of `lambda_1` in `alpha`.
///
/// Centered where `alpha +/- step` is feasible, otherwise a second-order
/// one-sided stencil pointing into the feasible range.
pub fn dlambda_dalpha_fd(
    layout: &ZoneLayout,
    bc: &BoundarySpec,
    growth: &GrowthPair,
    step: f64,
) -> Result<f64, SensitivityError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(SensitivityError::InvalidStep(step));
    }
    let tol = (step * step * step).min(EIGEN_TOL);
    let al = layout.alpha();
    let hi = layout.max_alpha();
    let lam = |a: f64| -> Result<f64, SensitivityError> {
        let z = layout.with_alpha(a.clamp(0.0, hi)).map_err(|_| SensitivityError::InvalidStep(step))?;
        Ok(principal_eigenvalue(&z, bc, growth, tol)?.lambda1)
    };
    let h = step.min(hi / 4.0).max(f64::EPSILON * layout.habitat());
    if hi <= 0.0 {
        return Err(SensitivityError::InvalidStep(step));
    }
    let centered = al - h >= 0.0 && al + h <= hi;
    let diff = |h: f64| -> Result<f64, SensitivityError> {
        if centered {
            Ok((lam(al + h)? - lam(al - h)?) / (2.0 * h))
        } else {
            let dir = if al + 2.0 * h <= hi { 1.0 } else { -1.0 };
            let f0 = lam(al)?;
            let f1 = lam(al + dir * h)?;
            let f2 = lam(al + 2.0 * dir * h)?;
            Ok(dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
        }
    };
    let coarse = diff(h)?;
    let fine = diff(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
