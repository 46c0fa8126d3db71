//! Complex log-gamma and digamma.
//!
//! Stirling's series after shifting the argument to `Re z >= 10`; the
//! reflection formula (with overflow-safe log-sin) covers `Re z < 1/2`.
//! Accuracy is ~1e-13 relative away from the poles, which is what the
//! archimedean-factor work downstream needs.

use crate::error::{Error, Result};
use crate::flt;
use crate::C64;

/// B_{2n} / (2n (2n-1)) for the lnGamma asymptotic series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// B_{2n} / (2n) for the digamma asymptotic series.
const DIGAMMA: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

const SHIFT_RE: f64 = 10.0;

fn near_nonpositive_integer(z: C64) -> bool {
    if z.re > 0.5 {
        return false;
    }
    let k = flt::round(z.re);
    k <= 0.0 && flt::hypot(z.re - k, z.im) < 1e-10
}

/// Overflow-safe principal `log sin(pi z)`.
fn log_sin_pi(z: C64) -> C64 {
    use core::f64::consts::PI;
    if flt::abs(z.im) < 1.0 {
        let s = (C64::new(PI, 0.0) * z).sin();
        return s.ln();
    }
    // sin(pi z) = exp(-i pi z) (w - 1) i/2 with w = exp(2 pi i z); pick the
    // decaying exponential for the current half-plane.
    let i = C64::new(0.0, 1.0);
    if z.im > 0.0 {
        let w = (C64::new(0.0, 2.0 * PI) * z).exp();
        -i * PI * z + (C64::new(1.0, 0.0) - w).ln() + (i / 2.0).ln()
    } else {
        let w = (C64::new(0.0, -2.0 * PI) * z).exp();
        i * PI * z + (C64::new(1.0, 0.0) - w).ln() + (-i / 2.0).ln()
    }
}

/// Stirling evaluation, valid for `Re z >= SHIFT_RE`.
fn log_gamma_stirling(z: C64) -> C64 {
    let half_ln_two_pi = 0.918_938_533_204_672_74; // ln(2 pi)/2
    let lz = z.ln();
    let mut out = (z - 0.5) * lz - z + half_ln_two_pi;
    let inv2 = (z * z).inv();
    let mut pow = z.inv();
    for c in STIRLING {
        out += pow * c;
        pow *= inv2;
    }
    out
}

/// Principal branch of `log Gamma(z)`.
///
/// Continuous on vertical lines in the right half-plane (our use case:
/// arguments there never cross the negative real axis during the shift).
/// For `Re z < 1/2` the reflection formula is used; the result is then a
/// valid logarithm of Gamma (exp of it is exact) but the imaginary part
/// follows the principal-branch convention of the reflection terms.
pub fn log_gamma(z: C64) -> Result<C64> {
    if near_nonpositive_integer(z) {
        return Err(Error::Pole("log_gamma at a non-positive integer"));
    }
    if z.re < 0.5 {
        // reflection: lnGamma(z) = ln pi - ln sin(pi z) - lnGamma(1 - z)
        let pi = core::f64::consts::PI;
        return Ok(C64::new(flt::ln(pi), 0.0) - log_sin_pi(z) - log_gamma(C64::new(1.0, 0.0) - z)?);
    }
    let mut shift = C64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_RE {
        shift += w.ln();
        w += 1.0;
    }
    Ok(log_gamma_stirling(w) - shift)
}

/// Digamma `psi(z) = Gamma'(z)/Gamma(z)`.
pub fn digamma(z: C64) -> Result<C64> {
    if near_nonpositive_integer(z) {
        return Err(Error::Pole("digamma at a non-positive integer"));
    }
    if z.re < 0.5 {
        // psi(z) = psi(1-z) - pi cot(pi z)
        let pi = core::f64::consts::PI;
        let piz = C64::new(pi, 0.0) * z;
        // cot overflows for large |Im|; it saturates to -+i with error
        // O(e^{-2|Im(pi z)|})
        let cot = if flt::abs(piz.im) > 20.0 {
            C64::new(0.0, if piz.im > 0.0 { -1.0 } else { 1.0 })
        } else {
            piz.cos() / piz.sin()
        };
        return Ok(digamma(C64::new(1.0, 0.0) - z)? - pi * cot);
    }
    let mut acc = C64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_RE {
        acc -= w.inv();
        w += 1.0;
    }
    let lw = w.ln();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut out = lw - inv * 0.5;
    let mut pow = inv2;
    for c in DIGAMMA {
        out -= pow * c;
        pow *= inv2;
    }
    Ok(out + acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent Spouge-series log-gamma for cross-checking (a = 14).
    fn log_gamma_spouge(z: C64) -> C64 {
        let a = 14usize;
        let zm1 = z - 1.0;
        let mut acc = C64::new((2.0 * core::f64::consts::PI).sqrt(), 0.0);
        let mut fact = 1.0f64; // (k-1)!
        for k in 1..a {
            let ak = (a - k) as f64;
            // c_k = (-1)^{k-1}/(k-1)! (a-k)^{k-1/2} e^{a-k}
            let mut ck = ak.powf(k as f64 - 0.5) * ak.exp() / fact;
            if (k - 1) % 2 == 1 {
                ck = -ck;
            }
            acc += C64::new(ck, 0.0) / (zm1 + k as f64);
            fact *= k as f64;
        }
        (zm1 + 0.5) * (zm1 + a as f64).ln() - (zm1 + a as f64) + acc.ln()
    }

    #[test]
    fn matches_spouge_oracle() {
        for z in [
            C64::new(3.0, 4.0),
            C64::new(0.75, 12.0),
            C64::new(5.5, -30.0),
            C64::new(1.0, 0.0),
            C64::new(0.5, 0.0),
            C64::new(2.75, 100.0),
        ] {
            let a = log_gamma(z).unwrap();
            let b = log_gamma_spouge(z);
            // the oracle's principal-branch log can sit on another branch;
            // compare modulo 2 pi in the imaginary part
            let two_pi = 2.0 * core::f64::consts::PI;
            let d = a - b;
            let d_im = d.im - two_pi * (d.im / two_pi).round();
            assert!(
                d.re.abs().max(d_im.abs()) <= 1e-11 * a.norm().max(1.0),
                "lnGamma mismatch at {z}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn classical_values() {
        let half = log_gamma(C64::new(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * core::f64::consts::PI.ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-14);
        let one = log_gamma(C64::new(1.0, 0.0)).unwrap();
        assert!(one.norm() < 1e-14);
        let five = log_gamma(C64::new(5.0, 0.0)).unwrap();
        assert!((five.re - 24.0f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn functional_equation_multiplicative() {
        for z in [C64::new(0.25, 7.0), C64::new(3.0, -2.0), C64::new(0.1, 0.3)] {
            let lhs = (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln()).exp();
            assert!((lhs - 1.0).norm() < 1e-12, "functional eq at {z}");
        }
    }

    #[test]
    fn reflection_region() {
        // Gamma(-0.5) = -2 sqrt(pi)
        let v = log_gamma(C64::new(-0.5, 0.0)).unwrap().exp();
        assert!((v.re + 2.0 * core::f64::consts::PI.sqrt()).abs() < 1e-12);
        // large imaginary part through the reflection path
        let z = C64::new(-1.3, 25.0);
        let direct = log_gamma(z).unwrap().exp();
        let via_fe = (log_gamma(z + 1.0).unwrap() - z.ln()).exp();
        assert!((direct - via_fe).norm() <= 1e-12 * via_fe.norm());
    }

    #[test]
    fn pole_detection() {
        assert!(matches!(log_gamma(C64::new(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(C64::new(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(digamma(C64::new(-1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn digamma_matches_loggamma_derivative() {
        for z in [C64::new(2.5, 3.0), C64::new(0.25, 10.0), C64::new(7.0, 0.0)] {
            let h = 1e-5;
            let num = (log_gamma(z + C64::new(h, 0.0)).unwrap()
                - log_gamma(z - C64::new(h, 0.0)).unwrap())
                / (2.0 * h);
            let psi = digamma(z).unwrap();
            assert!((num - psi).norm() < 1e-8, "digamma at {z}");
        }
    }

    #[test]
    fn digamma_real_oracle() {
        // psi(1) = -gamma
        let g = 0.577_215_664_901_532_9;
        let v = digamma(C64::new(1.0, 0.0)).unwrap();
        assert!((v.re + g).abs() < 1e-13);
        assert!(v.im.abs() < 1e-14);
    }
}
