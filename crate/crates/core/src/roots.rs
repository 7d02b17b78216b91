//! Bracketed scalar root finding and 1-D minimization.

use crate::math::{abs, sqrt};

/// First sign change of `f` over `n` equal panels of `[lo, hi]`.
///
/// Returns the panel `(a, fa, b, fb)`; an exact zero at a node yields a
/// degenerate panel `a == b`.
pub fn first_sign_change<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Option<(f64, f64, f64, f64)> {
    let step = (hi - lo) / n as f64;
    let mut a = lo;
    let mut fa = f(a);
    if fa == 0.0 {
        return Some((a, fa, a, fa));
    }
    for i in 1..=n {
        let b = if i == n { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fb == 0.0 {
            return Some((b, fb, b, fb));
        }
        if (fa < 0.0) != (fb < 0.0) && fa.is_finite() && fb.is_finite() {
            return Some((a, fa, b, fb));
        }
        a = b;
        fa = fb;
    }
    None
}

/// Bisection on a sign-changing bracket until the width is at most `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut fa: f64, mut b: f64, tol: f64) -> f64 {
    if a == b {
        return a;
    }
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Returns `(x, f(x))` with the final bracket no wider than `tol`. The end
/// points are also compared so a boundary minimum is not lost.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while abs(hi - lo) > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, PI};

    #[test]
    fn bisection_finds_cosine_zero() {
        let (a, fa, b, _) = first_sign_change(cos, 0.0, 3.0, 8).unwrap();
        let x = bisect(cos, a, fa, b, 1e-14);
        assert!((x - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn no_sign_change() {
        assert!(first_sign_change(|x| x * x + 1.0, -1.0, 1.0, 16).is_none());
    }

    #[test]
    fn golden_interior_and_boundary() {
        let (x, _) = golden_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
        let (x, _) = golden_min(|x| x, 0.0, 1.0, 1e-9);
        assert_eq!(x, 0.0);
    }
}
