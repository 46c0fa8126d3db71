//! Bracketed scalar root finding (Brent's method).

use crate::error::{Error, Result};
use crate::flt;

/// Find a root of `f` in `[a, b]`, which must bracket a sign change.
/// Converges to `|interval| <= tol` or errors out after `max_iter`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let max_iter = 200u32;
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Domain("brent: interval does not bracket a root"));
    }
    if flt::abs(fa) < flt::abs(fb) {
        core::mem::swap(&mut a, &mut b);
        core::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..max_iter {
        if fb == 0.0 || flt::abs(b - a) < tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let cond = !((s > lo.min(b) && s < lo.max(b))
            || (s < lo.min(b) && s > lo.max(b)))
            || (mflag && flt::abs(s - b) >= flt::abs(b - c) / 2.0)
            || (!mflag && flt::abs(s - b) >= flt::abs(c - d) / 2.0)
            || (mflag && flt::abs(b - c) < tol)
            || (!mflag && flt::abs(c - d) < tol);
        if cond {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if flt::abs(fa) < flt::abs(fb) {
            core::mem::swap(&mut a, &mut b);
            core::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::Accuracy {
        what: "brent root solve",
        achieved: flt::abs(b - a),
        requested: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
        let r = brent(|x| x.cos(), 0.0, 3.0, 1e-14).unwrap();
        assert!((r - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_bracketing() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn handles_steep_function() {
        let r = brent(|x| (x - 1.0).powi(3) * 1e6, 0.0, 5.0, 1e-13).unwrap();
        assert!((r - 1.0).abs() < 1e-4); // cubic root flat spot, interval tol applies
    }
}
