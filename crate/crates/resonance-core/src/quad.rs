//! Quadrature helpers: adaptive Simpson for smooth real integrands and
//! composite rules for oscillatory complex ones (where adaptive error
//! estimates are unreliable and a phase-resolved fixed grid is safer).

use crate::error::{Error, Result};
use crate::flt;
use crate::C64;

/// Tolerance/depth budget for adaptive quadrature.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the integral.
    pub tol: f64,
    /// Maximum bisection depth before giving up.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_depth: 40,
        }
    }
}

fn simpson_step(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    (fa + 4.0 * fm + fb) * h / 6.0
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_step(fa, flm, fm, m - a);
    let right = simpson_step(fm, frm, fb, b - m);
    let err = left + right - whole;
    if flt::abs(err) <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::Accuracy {
            what: "adaptive Simpson",
            achieved: flt::abs(err) / 15.0,
            requested: tol,
        });
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Adaptive Simpson on `[a, b]` for a smooth real integrand.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(b > a) {
        return Err(Error::Domain("adaptive_simpson needs b > a"));
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson_step(fa, fm, fb, b - a);
    adapt(&mut f, a, b, fa, fm, fb, whole, spec.tol, spec.max_depth)
}

/// Composite Simpson with a fixed step (rounded to an even panel count) for
/// complex integrands; the caller chooses `step` fine enough for the phase.
pub fn composite_simpson_c<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    step: f64,
) -> Result<C64> {
    if !(b > a) || !(step > 0.0) {
        return Err(Error::Domain("composite_simpson_c needs b > a and step > 0"));
    }
    let mut n = flt::ceil((b - a) / step) as usize;
    if n % 2 == 1 {
        n += 1;
    }
    if n < 2 {
        n = 2;
    }
    let h = (b - a) / n as f64;
    let mut acc = crate::flt::KahanC::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..n {
        let x = a + h * i as f64;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(f(x) * w);
    }
    Ok(acc.value() * (h / 3.0))
}

/// Composite trapezoid with fixed step; spectrally accurate for analytic
/// integrands that decay like a Gaussian at the endpoints.
pub fn composite_trapezoid_c<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    n_panels: usize,
) -> Result<C64> {
    if !(b > a) || n_panels < 1 {
        return Err(Error::Domain("composite_trapezoid_c needs b > a and panels >= 1"));
    }
    let h = (b - a) / n_panels as f64;
    let mut acc = crate::flt::KahanC::new();
    acc.add(f(a) * 0.5);
    acc.add(f(b) * 0.5);
    for i in 1..n_panels {
        acc.add(f(a + h * i as f64));
    }
    Ok(acc.value() * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_polynomial_exact() {
        let spec = QuadratureSpec::default();
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, &spec).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_gaussian() {
        let spec = QuadratureSpec {
            tol: 1e-12,
            max_depth: 50,
        };
        let v = adaptive_simpson(|x| (-x * x).exp(), -8.0, 8.0, &spec).unwrap();
        assert!((v - core::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_reports_failure() {
        let spec = QuadratureSpec {
            tol: 1e-14,
            max_depth: 2,
        };
        let r = adaptive_simpson(|x| (40.0 * x).cos() / (0.01 + x * x), -3.0, 3.1, &spec);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn composite_oscillatory() {
        // int_0^{2 pi} e^{i 5 x} dx = 0
        let v = composite_simpson_c(
            |x| C64::new(0.0, 5.0 * x).exp(),
            0.0,
            2.0 * core::f64::consts::PI,
            0.01,
        )
        .unwrap();
        assert!(v.norm() < 1e-10);
        // int_0^1 e^{i x} dx
        let w = composite_simpson_c(|x| C64::new(0.0, x).exp(), 0.0, 1.0, 0.01).unwrap();
        let exact = (C64::new(0.0, 1.0).exp() - 1.0) / C64::new(0.0, 1.0);
        assert!((w - exact).norm() < 1e-10); // h^4 composite error floor
    }

    #[test]
    fn trapezoid_gaussian_spectral() {
        // trapezoid on a Gaussian window is spectrally accurate
        let v = composite_trapezoid_c(
            |x| C64::new((-x * x).exp(), 0.0) * C64::new(0.0, 6.0 * x).exp(),
            -7.0,
            7.0,
            140,
        )
        .unwrap();
        let exact = core::f64::consts::PI.sqrt() * (-9.0f64).exp();
        assert!((v.re - exact).abs() < 1e-12 && v.im.abs() < 1e-12);
    }
}
