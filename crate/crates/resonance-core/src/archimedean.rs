//! Archimedean factors of a degree-2 L-function: the completed-gamma
//! quotient Delta, its logarithmic derivative, sech-weighted integrals of
//! the latter, and solutions of the prescribed-argument phase equation on
//! the critical line.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flt;
use crate::gamma::{digamma, log_gamma};
use crate::quad::{adaptive_simpson, composite_simpson_c, QuadratureSpec};
use crate::roots::brent;
use crate::C64;

/// Gamma-factor data of a degree-2 form:
/// `L_inf(s) = pi^{-s} Gamma((s+mu1)/2) Gamma((s+mu2)/2)`.
#[derive(Clone, Copy, Debug)]
pub struct GammaSignature {
    mu1: C64,
    mu2: C64,
    /// Spectral parameter entering the asymptotic log-derivative
    /// (r for Maass, 0 for the holomorphic form).
    r: f64,
}

impl GammaSignature {
    /// Even Maass form with spectral parameter `r`: mu = (ir, -ir).
    pub fn maass(r: f64) -> Self {
        Self {
            mu1: C64::new(0.0, r),
            mu2: C64::new(0.0, -r),
            r,
        }
    }

    /// The weight-12 holomorphic form: mu = ((k-1)/2, (k+1)/2) with k = 12.
    pub fn holomorphic_delta() -> Self {
        Self {
            mu1: C64::new(5.5, 0.0),
            mu2: C64::new(6.5, 0.0),
            r: 0.0,
        }
    }

    pub fn for_table(table: &crate::arith::EigenvalueTable) -> Self {
        match table.kind() {
            crate::arith::FormKind::HolomorphicDelta => Self::holomorphic_delta(),
            crate::arith::FormKind::MaassEven => Self::maass(table.spectral()),
        }
    }

    pub fn spectral(&self) -> f64 {
        self.r
    }

    pub fn mu(&self) -> (C64, C64) {
        (self.mu1, self.mu2)
    }

    /// Smallest |t| at which the asymptotic machinery (and the weighted
    /// integrals) are used: clear of the low-lying gamma poles and of the
    /// spectral parameter.
    pub fn lower_cutoff(&self) -> f64 {
        (2.0 * flt::abs(self.r)).max(20.0)
    }

    /// `log L_inf(s)`, principal gamma logs.
    pub fn log_l_inf(&self, s: C64) -> Result<C64> {
        let pi = core::f64::consts::PI;
        Ok(-s * flt::ln(pi)
            + log_gamma((s + self.mu1) / 2.0)?
            + log_gamma((s + self.mu2) / 2.0)?)
    }

    /// The quotient `Delta(s) = L_inf(1/2 - s)/L_inf(1/2 + s)`.
    pub fn delta_ratio(&self, s: C64) -> Result<C64> {
        let half = C64::new(0.5, 0.0);
        let diff = self.log_l_inf(half - s)? - self.log_l_inf(half + s)?;
        if flt::abs(diff.re) > 700.0 {
            return Err(Error::Conditioning("delta_ratio would over/underflow"));
        }
        Ok(diff.exp())
    }

    /// `(Delta'/Delta)(it)`; real for the signatures built here.
    pub fn delta_logderiv(&self, t: f64, mode: LogDerivMode) -> Result<f64> {
        match mode {
            LogDerivMode::Exact => {
                let it = C64::new(0.0, t);
                let half = C64::new(0.5, 0.0);
                let mut acc = C64::new(2.0 * flt::ln(core::f64::consts::PI), 0.0);
                for sgn in [-1.0, 1.0] {
                    for mu in [self.mu1, self.mu2] {
                        acc -= digamma((half + it * sgn + mu) / 2.0)? * 0.5;
                    }
                }
                Ok(acc.re)
            }
            LogDerivMode::Asymptotic => {
                if flt::abs(t) < self.lower_cutoff() {
                    return Err(Error::Domain(
                        "asymptotic log-derivative needs |t| >= lower cutoff",
                    ));
                }
                let r = self.r;
                let pi = core::f64::consts::PI;
                let a = t + r;
                let b = t - r;
                let c = t * t - r * r;
                let num = 1.0 / 16.0 + 0.25 * (a * a + b * b) + c * c;
                Ok(-0.5 * flt::ln(num / (16.0 * flt::powi(pi, 4))))
            }
        }
    }

    /// Continuous phase `Phi(t) = arg Delta(it)` built from analytic gamma
    /// logs (no unwrapping needed on the critical line for these signatures).
    pub fn phase(&self, t: f64) -> Result<f64> {
        let half = C64::new(0.5, 0.0);
        let it = C64::new(0.0, t);
        Ok((self.log_l_inf(half - it)? - self.log_l_inf(half + it)?).im)
    }
}

/// Which evaluation of the log-derivative to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogDerivMode {
    /// Four digamma values; valid everywhere off the poles.
    Exact,
    /// Closed-form leading behaviour `-(1/2) log` of the conductor density;
    /// requires `|t|` above the signature's lower cutoff.
    Asymptotic,
}

/// The sech localisation weight `w(t) = sech((t - center)/h)`.
#[derive(Clone, Copy, Debug)]
pub struct WeightSpec {
    pub center: f64,
    pub h: f64,
}

impl WeightSpec {
    /// The standard choice `h = T / log^2 T` centred at `T`.
    pub fn standard(t_center: f64) -> Result<Self> {
        if t_center < 10.0 {
            return Err(Error::Domain("weight center must be >= 10"));
        }
        let l = flt::ln(t_center);
        Ok(Self {
            center: t_center,
            h: t_center / (l * l),
        })
    }

    pub fn w(&self, t: f64) -> f64 {
        flt::sech((t - self.center) / self.h)
    }

    /// Integration window outside which the weight is below 1e-16.
    pub fn support(&self, lower_cutoff: f64) -> (f64, f64) {
        let lo = (self.center - 38.0 * self.h).max(lower_cutoff);
        let hi = self.center + 38.0 * self.h;
        (lo, hi)
    }
}

/// `I_T = int (-2 Delta'/Delta)(it) sech((t-T)/H) dt` over the weight's
/// effective support, clipped below at the signature's lower cutoff.
pub fn compute_i_t(
    sig: &GammaSignature,
    weight: &WeightSpec,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let (lo, hi) = weight.support(sig.lower_cutoff());
    if !(hi > lo) {
        return Err(Error::Domain("weight support empty above the lower cutoff"));
    }
    // scale the absolute tolerance to the expected magnitude of I_T
    let scale = 4.0 * weight.h * flt::ln(weight.center.max(3.0)).max(1.0);
    let spec = QuadratureSpec {
        tol: quad.tol * scale,
        max_depth: quad.max_depth,
    };
    adaptive_simpson(
        |t| -2.0 * sig.delta_logderiv(t, LogDerivMode::Exact).unwrap_or(f64::NAN) * weight.w(t),
        lo,
        hi,
        &spec,
    )
}

/// One solution of the phase equation `Delta(it) = e^{2 i theta}`.
#[derive(Clone, Copy, Debug)]
pub struct PhasePoint {
    /// Location on the critical line.
    pub t: f64,
    /// `|Delta(it) - e^{2 i theta}|` at the solution.
    pub residual: f64,
    /// Phase equation misfit `Phi(t) - (2 theta + 2 pi k)` for this branch.
    pub phase_misfit: f64,
}

/// All solutions in an interval, with the winding-number prediction.
#[derive(Clone, Debug)]
pub struct PhasePointSet {
    pub theta: f64,
    pub interval: (f64, f64),
    pub points: Vec<PhasePoint>,
    /// Count implied by the total phase decrement across the interval.
    pub expected_count: usize,
}

/// Solve `Phi(t) = 2 theta + 2 pi k` for all integer `k` with solutions in
/// `[lo, hi]`. The phase is strictly decreasing there, so a slope-adapted
/// walk brackets every crossing exactly once.
pub fn solve_t_theta(
    sig: &GammaSignature,
    theta: f64,
    interval: (f64, f64),
    tol: f64,
) -> Result<PhasePointSet> {
    let (lo, hi) = interval;
    if lo < sig.lower_cutoff() {
        return Err(Error::Domain("phase solve interval below the lower cutoff"));
    }
    if !(hi > lo) || !(tol > 0.0) {
        return Err(Error::Domain("phase solve needs hi > lo and tol > 0"));
    }
    let two_pi = 2.0 * core::f64::consts::PI;
    let phi_lo = sig.phase(lo)?;
    let phi_hi = sig.phase(hi)?;
    if !(phi_hi < phi_lo) {
        return Err(Error::Refinement("phase is not decreasing on the interval"));
    }
    // branches k with 2 theta + 2 pi k inside [phi_hi, phi_lo]
    let k_hi = flt::floor((phi_lo - 2.0 * theta) / two_pi) as i64;
    let k_lo = flt::ceil((phi_hi - 2.0 * theta) / two_pi) as i64;
    let expected_count = if k_hi >= k_lo {
        (k_hi - k_lo + 1) as usize
    } else {
        0
    };

    let mut points = Vec::with_capacity(expected_count);
    let mut t0 = lo;
    let mut phi0 = phi_lo;
    let target = |k: i64| 2.0 * theta + two_pi * k as f64;
    let mut k_next = k_hi; // first branch to be crossed going up in t
    while t0 < hi {
        let slope = flt::abs(sig.delta_logderiv(t0, LogDerivMode::Exact)?).max(0.5);
        let step = (core::f64::consts::FRAC_PI_2 / (1.25 * slope)).min(hi - t0);
        let t1 = (t0 + step).min(hi);
        let phi1 = sig.phase(t1)?;
        if !(phi1 < phi0) && t1 < hi {
            return Err(Error::Refinement("phase walk lost monotonicity"));
        }
        while k_next >= k_lo && target(k_next) > phi1 && target(k_next) <= phi0 {
            let tau = target(k_next);
            let root = brent(|t| sig.phase(t).unwrap_or(f64::NAN) - tau, t0, t1, tol)?;
            let want = (C64::new(0.0, 2.0 * theta)).exp();
            let residual = (sig.delta_ratio(C64::new(0.0, root))? - want).norm();
            points.push(PhasePoint {
                t: root,
                residual,
                phase_misfit: sig.phase(root)? - tau,
            });
            k_next -= 1;
        }
        t0 = t1;
        phi0 = phi1;
        if t1 >= hi {
            break;
        }
    }
    Ok(PhasePointSet {
        theta,
        interval,
        points,
        expected_count,
    })
}

/// Weighted critical-line pairing integral for a ratio `m/n`, against its
/// diagonal prediction `-delta_{m=n} I_T / (4 pi)`.
#[derive(Clone, Copy, Debug)]
pub struct OffdiagCheck {
    pub value: C64,
    pub i_t: f64,
    pub prediction: f64,
    /// `|value| / I_T`, the suppression measure for m != n.
    pub ratio_to_i_t: f64,
}

/// `(1/2pi) int (m/n)^{it} (Delta'/Delta)(it) sech((t-T)/H) dt`.
pub fn offdiag_check(
    sig: &GammaSignature,
    m: u64,
    n: u64,
    weight: &WeightSpec,
    quad: &QuadratureSpec,
) -> Result<OffdiagCheck> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("offdiag_check needs m, n >= 1"));
    }
    let (lo, hi) = weight.support(sig.lower_cutoff());
    if !(hi > lo) {
        return Err(Error::Domain("weight support empty above the lower cutoff"));
    }
    let omega = flt::ln(m as f64 / n as f64);
    // resolve both the sech envelope and the oscillation
    let step = (weight.h / 16.0).min(0.3 / flt::abs(omega).max(1e-12));
    let value = composite_simpson_c(
        |t| {
            let ld = sig.delta_logderiv(t, LogDerivMode::Exact).unwrap_or(f64::NAN);
            C64::new(0.0, omega * t).exp() * (ld * weight.w(t))
        },
        lo,
        hi,
        step,
    )? / (2.0 * core::f64::consts::PI);
    let i_t = compute_i_t(sig, weight, quad)?;
    let prediction = if m == n { -i_t / (4.0 * core::f64::consts::PI) } else { 0.0 };
    Ok(OffdiagCheck {
        value,
        i_t,
        prediction,
        ratio_to_i_t: value.norm() / i_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_is_unimodular_on_critical_axis() {
        for sig in [GammaSignature::holomorphic_delta(), GammaSignature::maass(13.5)] {
            for t in [0.5, 3.0, 17.0, 91.3, 400.0] {
                let d = sig.delta_ratio(C64::new(0.0, t)).unwrap();
                assert!((d.norm() - 1.0).abs() < 1e-10, "|Delta(it)| != 1 at t={t}");
            }
        }
    }

    #[test]
    fn logderiv_matches_phase_derivative() {
        // dPhi/dt equals (Delta'/Delta)(it)
        let sig = GammaSignature::holomorphic_delta();
        for t in [25.0, 60.0, 150.0] {
            let h = 1e-5;
            let num = (sig.phase(t + h).unwrap() - sig.phase(t - h).unwrap()) / (2.0 * h);
            let ld = sig.delta_logderiv(t, LogDerivMode::Exact).unwrap();
            assert!((num - ld).abs() < 1e-7, "phase derivative at t={t}");
        }
    }

    #[test]
    fn asymptotic_logderiv_close_to_exact() {
        let sigs = [GammaSignature::holomorphic_delta(), GammaSignature::maass(13.78)];
        for sig in sigs {
            for (t, tol) in [(100.0, 0.02), (1000.0, 0.002)] {
                let e = sig.delta_logderiv(t, LogDerivMode::Exact).unwrap();
                let a = sig.delta_logderiv(t, LogDerivMode::Asymptotic).unwrap();
                assert!((e - a).abs() < tol, "asymptotic off by {} at t={t}", (e - a).abs());
            }
        }
    }

    #[test]
    fn asymptotic_rejects_small_t() {
        let sig = GammaSignature::maass(30.0);
        assert!(matches!(
            sig.delta_logderiv(40.0, LogDerivMode::Asymptotic),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn i_t_oracle_values() {
        // frozen from an independent fine-grid Simpson evaluation
        let sig = GammaSignature::holomorphic_delta();
        let quad = QuadratureSpec::default();
        let cases = [(100.0, 163.899401), (400.0, 581.482361)];
        for (t, expect) in cases {
            let w = WeightSpec::standard(t).unwrap();
            let v = compute_i_t(&sig, &w, &quad).unwrap();
            assert!(
                ((v - expect) / expect).abs() < 1e-5,
                "I_T at T={t}: {v} vs {expect}"
            );
        }
    }

    #[test]
    fn i_t_matches_leading_term() {
        let sig = GammaSignature::holomorphic_delta();
        let quad = QuadratureSpec::default();
        let w = WeightSpec::standard(400.0).unwrap();
        let v = compute_i_t(&sig, &w, &quad).unwrap();
        let lead = 4.0 * core::f64::consts::PI * w.h * (400.0 / (2.0 * core::f64::consts::PI)).ln();
        assert!(((v / lead) - 1.0).abs() < 0.01);
    }

    #[test]
    fn phase_solver_counts_and_residuals() {
        let sig = GammaSignature::holomorphic_delta();
        let set = solve_t_theta(&sig, 0.0, (50.0, 60.0), 1e-12).unwrap();
        assert_eq!(set.points.len(), set.expected_count);
        assert!(!set.points.is_empty());
        for p in &set.points {
            assert!(p.residual < 1e-10, "residual {}", p.residual);
            assert!(p.phase_misfit.abs() < 1e-9);
            assert!(p.t >= 50.0 && p.t <= 60.0);
        }
        // independent count: dense grid sign changes of Phi mod matching
        let n = 20000;
        let mut count = 0usize;
        let mut prev = sig.phase(50.0).unwrap();
        let two_pi = 2.0 * core::f64::consts::PI;
        for i in 1..=n {
            let t = 50.0 + 10.0 * i as f64 / n as f64;
            let cur = sig.phase(t).unwrap();
            count += ((prev / two_pi).floor() - (cur / two_pi).floor()) as usize;
            prev = cur;
        }
        assert_eq!(set.points.len(), count);
    }

    #[test]
    fn phase_solver_distinct_theta_interlace() {
        let sig = GammaSignature::maass(9.0);
        let a = solve_t_theta(&sig, 0.0, (40.0, 48.0), 1e-12).unwrap();
        let b = solve_t_theta(&sig, core::f64::consts::FRAC_PI_2, (40.0, 48.0), 1e-12).unwrap();
        // theta and theta + pi/2 solutions strictly interleave
        for p in &a.points {
            for q in &b.points {
                assert!((p.t - q.t).abs() > 1e-6);
            }
        }
        assert!((a.points.len() as i64 - b.points.len() as i64).abs() <= 1);
    }

    #[test]
    fn offdiag_diagonal_matches_prediction() {
        let sig = GammaSignature::holomorphic_delta();
        let quad = QuadratureSpec::default();
        let w = WeightSpec::standard(80.0).unwrap();
        let c = offdiag_check(&sig, 1, 1, &w, &quad).unwrap();
        assert!(
            ((c.value.re - c.prediction) / c.prediction).abs() < 0.01,
            "diagonal {} vs {}",
            c.value.re,
            c.prediction
        );
        assert!(c.value.im.abs() < 1e-6 * c.i_t);
    }
}
