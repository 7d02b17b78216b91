//! The baseline eigenvalue `lambda_0(L)` of `-phi'' = lambda phi` and the
//! resulting bracket for `lambda_1`.

use core::fmt;

use crate::math::{cos, sin, sinc, PI};
use crate::model::{BoundaryKind, BoundarySpec, GrowthPair, ModelError};
use crate::roots::{bisect, first_sign_change};

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineError {
    Model(ModelError),
    /// The relation had no sign change on `(0, 2 pi / L]`.
    NoBracket { habitat: f64 },
    InvalidTolerance(f64),
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Model(e) => write!(f, "{e}"),
            Self::NoBracket { habitat } => {
                write!(f, "no root of the baseline relation bracketed for L={habitat}")
            }
            Self::InvalidTolerance(t) => write!(f, "tolerance must be > 0, got {t}"),
        }
    }
}

impl core::error::Error for BaselineError {}

impl From<ModelError> for BaselineError {
    fn from(e: ModelError) -> Self {
        Self::Model(e)
    }
}

/// Rigid bounds `(lambda_0 - f'(0), lambda_0 - g'(0))` for `lambda_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn contains_strict(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

const PANELS: usize = 64;

/// Relation in `s = sqrt(lambda_0)` whose smallest positive root is the
/// baseline eigenvalue. Each form is divided through by `s` where needed so
/// it stays finite and nonzero at `s = 0`.
fn relation(s: f64, habitat: f64, bc: &BoundarySpec) -> f64 {
    let BoundarySpec { a1, a2, b1, b2 } = *bc;
    let sl = s * habitat;
    let c = cos(sl);
    let sinc_l = habitat * sinc(sl);
    match bc.kinds() {
        (BoundaryKind::Dirichlet, _) => b2 * sinc_l + b1 * c,
        (_, BoundaryKind::Dirichlet) => a2 * sinc_l + a1 * c,
        (BoundaryKind::Neumann, _) => b1 * s * sin(sl) - b2 * c,
        (_, BoundaryKind::Neumann) => a1 * s * sin(sl) - a2 * c,
        _ => (a2 * b1 + a1 * b2) * c + (a2 * b2 - a1 * b1 * s * s) * sinc_l,
    }
}

/// Principal eigenvalue of `-phi'' = lambda phi` on `[0, L]` under `bc`.
pub fn lambda0(habitat: f64, bc: &BoundarySpec, tol: f64) -> Result<f64, BaselineError> {
    if !(habitat > 0.0 && habitat.is_finite()) {
        return Err(ModelError::InvalidLength(habitat).into());
    }
    if !(tol > 0.0) {
        return Err(BaselineError::InvalidTolerance(tol));
    }
    let q = PI / habitat;
    use BoundaryKind::*;
    match bc.kinds() {
        (Neumann, Neumann) => return Ok(0.0),
        (Dirichlet, Dirichlet) => return Ok(q * q),
        (Neumann, Dirichlet) | (Dirichlet, Neumann) => return Ok(q * q / 4.0),
        _ => {}
    }
    let rel = |s: f64| relation(s, habitat, bc);
    let (a, fa, b, _) = first_sign_change(rel, 0.0, 2.0 * q, PANELS)
        .ok_or(BaselineError::NoBracket { habitat })?;
    let s_tol = (tol / (2.0 * q)).max(f64::EPSILON * q);
    let s = bisect(rel, a, fa, b, s_tol);
    Ok(s * s)
}

/// Bracket `(lambda_{L,f}, lambda_{L,g})`.
pub fn spectral_bracket(
    habitat: f64,
    bc: &BoundarySpec,
    growth: &GrowthPair,
) -> Result<Bracket, BaselineError> {
    let l0 = lambda0(habitat, bc, 1e-15)?;
    Ok(Bracket { lo: l0 - growth.fp0(), hi: l0 - growth.gp0() })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn any_bc() -> impl Strategy<Value = BoundarySpec> {
        (0.0f64..3.0, 0.0f64..3.0, 0.0f64..3.0, 0.0f64..3.0)
            .prop_filter("nondegenerate", |(a1, a2, b1, b2)| {
                (*a1 > 1e-3 || *a2 > 1e-3) && (*b1 > 1e-3 || *b2 > 1e-3)
            })
            .prop_map(|(a1, a2, b1, b2)| BoundarySpec::new(a1, a2, b1, b2).unwrap())
    }

    proptest! {
        #[test]
        fn nonincreasing_in_length(bc in any_bc(), l in 0.5f64..20.0, dl in 0.01f64..5.0) {
            let a = lambda0(l, &bc, 1e-14).unwrap();
            let b = lambda0(l + dl, &bc, 1e-14).unwrap();
            prop_assert!(a >= 0.0 && b >= 0.0);
            prop_assert!(b <= a + 1e-12);
        }
    }
}
