//! Subcommand implementations: verify, scan, moments, kernels.

use serde_json::json;

use resonance_core::archimedean::{
    compute_i_t, solve_t_theta, GammaSignature, LogDerivMode, WeightSpec,
};
use resonance_core::arith::{d_z_coefficients, dirichlet_convolve, PrimeList};
use resonance_core::error::{Error, Result};
use resonance_core::lfun::{evaluate_l_afe, local_factors, AfeContext};
use resonance_core::moments::{
    diagonal_main_term, diagonal_main_term_join, moment_sums, oscillatory_kernel,
    DiagonalVariant, KernelSpec, KernelVariant,
};
use resonance_core::quad::QuadratureSpec;
use resonance_core::resonator::build_polynomials;
use resonance_core::C64;

use crate::config::RunConfig;

/// What a subcommand hands back to `main`.
pub struct CommandOutput {
    pub json: serde_json::Value,
    /// Plot-ready rows (scan only).
    pub csv: Option<String>,
    /// False when a verify-style assertion failed (exit 1).
    pub all_passed: bool,
}

/// Exit code for a module error: caller mistakes are 2, numeric trouble 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::ProfileRejected(_) | Error::Parse { .. } => 2,
        _ => 3,
    }
}

struct Check {
    name: &'static str,
    outcome: CheckOutcome,
    /// Measured quantity vs allowed bound.
    measured: f64,
    allowed: f64,
    detail: String,
}

enum CheckOutcome {
    Pass,
    Fail,
    Skipped,
}

impl Check {
    fn measured(name: &'static str, measured: f64, allowed: f64, detail: String) -> Self {
        let outcome = if measured <= allowed {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        };
        Self {
            name,
            outcome,
            measured,
            allowed,
            detail,
        }
    }

    fn skipped(name: &'static str, why: String) -> Self {
        Self {
            name,
            outcome: CheckOutcome::Skipped,
            measured: f64::NAN,
            allowed: f64::NAN,
            detail: why,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "status": match self.outcome {
                CheckOutcome::Pass => "pass",
                CheckOutcome::Fail => "fail",
                CheckOutcome::Skipped => "skipped",
            },
            "measured": float_or_null(self.measured),
            "allowed": float_or_null(self.allowed),
            "detail": self.detail,
        })
    }
}

fn float_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

/// AFE truncation need for evaluations up to |t| = t_max.
fn afe_need(t_max: f64) -> u64 {
    (50.0 * (1.0 + t_max)).ceil() as u64
}

fn point_interval(sig: &GammaSignature, t: f64) -> (f64, f64) {
    ((0.5 * t).max(sig.lower_cutoff() + 1.0), 2.0 * t)
}

/// Run the verification suite; exit 0 iff every non-skipped check passes.
pub fn cmd_verify(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    let want = afe_need(2.0 * config.t);
    let (eigen, clamped) = config.build_table(want)?;
    let sig = GammaSignature::for_table(&eigen);
    let mut checks: Vec<Check> = Vec::new();

    // Hecke multiplicativity on coprime pairs
    {
        let top = eigen.limit().min(1000);
        let mut worst = 0.0f64;
        for m in 2..=top {
            for n in (m + 1)..=(eigen.limit() / m).min(top) {
                if gcd(m, n) != 1 {
                    continue;
                }
                let resid = (eigen.lambda(m * n)? - eigen.lambda(m)? * eigen.lambda(n)?).abs();
                worst = worst.max(resid);
            }
        }
        checks.push(Check::measured(
            "hecke_multiplicativity",
            worst,
            config.scaled_tol(1e-11),
            format!("max residual over coprime pairs up to {top}"),
        ));
    }

    // d_{1/2} * d_{1/2} = d_1 = 1
    {
        let limit = 10_000u64;
        let dh = d_z_coefficients(0.5, limit);
        let conv = dirichlet_convolve(&dh, &dh);
        let mut worst = 0.0f64;
        for n in 1..=limit {
            worst = worst.max((conv.value(n)? - 1.0).abs());
        }
        checks.push(Check::measured(
            "fractional_divisor_identity",
            worst,
            config.scaled_tol(1e-12),
            String::from("max |d_half * d_half - 1| up to 1e4"),
        ));
    }

    // |Delta(it)| = 1 on the critical axis
    {
        let lo = sig.lower_cutoff().max(20.0);
        let mut worst = 0.0f64;
        for i in 0..200 {
            let t = lo + (2000.0 - lo) * i as f64 / 199.0;
            worst = worst.max((sig.delta_ratio(C64::new(0.0, t))?.norm() - 1.0).abs());
        }
        checks.push(Check::measured(
            "gamma_ratio_unitarity",
            worst,
            config.scaled_tol(1e-10),
            format!("200 samples on [{lo:.0}, 2000]"),
        ));
    }

    // exact vs asymptotic log-derivative
    {
        let d100 = (sig.delta_logderiv(100.0, LogDerivMode::Exact)?
            - sig.delta_logderiv(100.0, LogDerivMode::Asymptotic)?)
        .abs();
        let d1000 = (sig.delta_logderiv(1000.0, LogDerivMode::Exact)?
            - sig.delta_logderiv(1000.0, LogDerivMode::Asymptotic)?)
        .abs();
        checks.push(Check::measured(
            "logderiv_consistency_t100",
            d100,
            config.scaled_tol(0.02),
            String::from("|exact - asymptotic| at t = 100"),
        ));
        checks.push(Check::measured(
            "logderiv_consistency_t1000",
            d1000,
            config.scaled_tol(0.002),
            String::from("|exact - asymptotic| at t = 1000"),
        ));
    }

    // I_T against its leading shape
    {
        let weight = WeightSpec::standard(config.t)?;
        let i_t = compute_i_t(&sig, &weight, &QuadratureSpec::default())?;
        let leading = 4.0 * core::f64::consts::PI
            * weight.h
            * (config.t / (2.0 * core::f64::consts::PI)).ln();
        checks.push(Check::measured(
            "i_t_leading_shape",
            (i_t / leading - 1.0).abs(),
            config.scaled_tol(0.2),
            format!("I_T = {i_t:.6}, leading = {leading:.6}"),
        ));
    }

    // phase solver: winding-predicted count, residuals
    {
        let interval = point_interval(&sig, config.t);
        let points = solve_t_theta(&sig, config.theta, interval, 1e-12)?;
        let count_ok = points.points.len() == points.expected_count;
        let worst = points
            .points
            .iter()
            .map(|p| p.residual)
            .fold(0.0f64, f64::max);
        checks.push(Check::measured(
            "phase_point_count",
            if count_ok { 0.0 } else { 1.0 },
            0.0,
            format!(
                "{} points vs {} predicted on [{:.1}, {:.1}]",
                points.points.len(),
                points.expected_count,
                interval.0,
                interval.1
            ),
        ));
        checks.push(Check::measured(
            "phase_point_residuals",
            worst,
            config.scaled_tol(1e-10),
            String::from("max |Delta(it) - e^{2 i theta}| over solved points"),
        ));
    }

    // AFE reflection symmetry (table permitting)
    {
        let ts = [7.0, 21.5, 40.0];
        let need = afe_need(ts[2]);
        if eigen.limit() < need {
            checks.push(Check::skipped(
                "afe_reflection",
                format!("needs coefficients to {need}, table has {}", eigen.limit()),
            ));
        } else {
            let ctx = AfeContext::new(&eigen);
            let mut worst = 0.0f64;
            for t in ts {
                let a = evaluate_l_afe(&ctx, t)?;
                let b = evaluate_l_afe(&ctx, -t)?;
                worst = worst.max((a - b.conj()).norm() / a.norm().max(1.0));
            }
            checks.push(Check::measured(
                "afe_reflection",
                worst,
                config.scaled_tol(1e-9),
                String::from("max relative |L(1/2+it) - conj L(1/2-it)|"),
            ));
        }
    }

    // local Rankin-Selberg factorization
    {
        let top = eigen.limit().min(1000);
        let primes = PrimeList::sieve(top)?;
        let s = C64::new(1.5, 0.7);
        let mut worst = 0.0f64;
        for &p in primes.as_slice() {
            let (z, s2, rs) = local_factors(eigen.lambda(p)?, p, s)?;
            worst = worst.max((z * s2 - rs).norm() / rs.norm());
        }
        checks.push(Check::measured(
            "rankin_selberg_local_factorization",
            worst,
            config.scaled_tol(1e-12),
            format!("zeta_p x sym2_p vs RS_p for p <= {top}"),
        ));
    }

    // probability weights and moment triangle inequalities (table permitting)
    {
        let profile = config.profile()?;
        let weight = WeightSpec::standard(config.t)?;
        let lo = (config.t - 10.0 * weight.h).max(sig.lower_cutoff() + 1.0);
        let hi = config.t + 10.0 * weight.h;
        let need = afe_need(hi);
        let window_need = profile.window.1.min(profile.r_support) as u64;
        if eigen.limit() < need.max(window_need) {
            checks.push(Check::skipped(
                "moment_triangle",
                format!(
                    "needs coefficients to {}, table has {}",
                    need.max(window_need),
                    eigen.limit()
                ),
            ));
        } else {
            let polys = build_polynomials(&profile, &eigen)?;
            let points = solve_t_theta(&sig, config.theta, (lo, hi), 1e-12)?;
            let i_t = compute_i_t(&sig, &weight, &QuadratureSpec::default())?;
            let ctx = AfeContext::new(&eigen);
            let report = moment_sums(&ctx, &polys.r, &polys.a_half, &points, &weight, i_t)?;
            let signed_excess =
                (report.signed_moment.norm() - report.unsigned_moment).max(0.0);
            let rotated_excess =
                (report.rotated_moment.norm() - report.unsigned_moment).max(0.0);
            checks.push(Check::measured(
                "moment_triangle",
                signed_excess.max(rotated_excess),
                config.scaled_tol(1e-12),
                format!(
                    "unsigned {:.6e}, |signed| {:.6e}, |rotated| {:.6e} over {} points",
                    report.unsigned_moment,
                    report.signed_moment.norm(),
                    report.rotated_moment.norm(),
                    report.point_count
                ),
            ));
        }
    }

    let all_passed = checks
        .iter()
        .all(|c| !matches!(c.outcome, CheckOutcome::Fail));
    let json = json!({
        "schema": 1,
        "command": "verify",
        "config": config.to_json(),
        "table_limit": eigen.limit(),
        "table_clamped": clamped,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "all_passed": all_passed,
    });
    Ok(CommandOutput {
        json,
        csv: None,
        all_passed,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Scan the prescribed-argument set on [T/2, 2T]: CSV rows plus a summary
/// against the benchmark sqrt(log T / log log T).
pub fn cmd_scan(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    let (eigen, _) = config.build_table(afe_need(2.0 * config.t))?;
    let sig = GammaSignature::for_table(&eigen);
    let interval = point_interval(&sig, config.t);
    let residual_tol = if config.tol > 0.0 { config.tol } else { 1e-12 };
    let points = solve_t_theta(&sig, config.theta, interval, residual_tol.min(1e-9))?;
    let ctx = AfeContext::new(&eigen);

    let mut csv = String::from("t,re_l,im_l,abs_l,arg_l,residual\n");
    let mut max_log_abs = f64::NEG_INFINITY;
    for pt in &points.points {
        let l = evaluate_l_afe(&ctx, pt.t)?;
        if l.norm() > 0.0 {
            max_log_abs = max_log_abs.max(l.norm().ln());
        }
        csv.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}\n",
            pt.t,
            l.re,
            l.im,
            l.norm(),
            l.im.atan2(l.re),
            pt.residual
        ));
    }
    let benchmark = (config.t.ln() / config.t.ln().ln()).sqrt();
    let json = json!({
        "schema": 1,
        "command": "scan",
        "config": config.to_json(),
        "interval": [interval.0, interval.1],
        "point_count": points.points.len(),
        "expected_count": points.expected_count,
        "max_log_abs_l": float_or_null(max_log_abs),
        "benchmark_sqrt_logt_loglogt": benchmark,
        "ratio_to_benchmark": float_or_null(max_log_abs / benchmark),
    });
    Ok(CommandOutput {
        json,
        csv: Some(csv),
        all_passed: true,
    })
}

/// Full moment report at the configured profile.
pub fn cmd_moments(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    let profile = config.profile()?;
    // cover the AFE at 2T, the window primes, and the diagonal's n-range
    let a_max = profile.a_support as u64;
    let diag_need = a_max * a_max * (profile.r_support as u64);
    let want = afe_need(2.0 * config.t)
        .max(profile.window.1.min(profile.r_support) as u64)
        .max(diag_need);
    let (eigen, _) = config.build_table(want)?;
    let sig = GammaSignature::for_table(&eigen);
    let polys = build_polynomials(&profile, &eigen)?;
    let weight = WeightSpec::standard(config.t)?;
    let i_t = compute_i_t(&sig, &weight, &QuadratureSpec::default())?;
    let interval = point_interval(&sig, config.t);
    let points = solve_t_theta(&sig, config.theta, interval, 1e-12)?;
    let ctx = AfeContext::new(&eigen);
    let report = moment_sums(&ctx, &polys.r, &polys.a_half, &points, &weight, i_t)?;
    let diag_unsigned =
        diagonal_main_term(&polys.r_star, &polys.a_half, &eigen, DiagonalVariant::Unsigned)?;
    let diag_signed =
        diagonal_main_term(&polys.r_star, &polys.a_half, &eigen, DiagonalVariant::SignedII)?;
    let json = json!({
        "schema": 1,
        "command": "moments",
        "config": config.to_json(),
        "profile": profile.serialize_kv(),
        "weight": {"center": weight.center, "h": weight.h},
        "i_t": i_t,
        "point_count": report.point_count,
        "nw_direct": report.nw_direct,
        "nw_diagonal": report.nw_diagonal,
        "unsigned_moment": report.unsigned_moment,
        "signed_moment": [report.signed_moment.re, report.signed_moment.im],
        "rotated_moment": [report.rotated_moment.re, report.rotated_moment.im],
        "diagonal_unsigned": {
            "value": diag_unsigned.value,
            "tuples": diag_unsigned.tuple_count,
            "negative_terms": diag_unsigned.negative_terms,
        },
        "diagonal_signed_ii": {
            "value": diag_signed.value,
            "tuples": diag_signed.tuple_count,
            "negative_terms": diag_signed.negative_terms,
        },
        "diagnostics": {
            "tail_bound": report.diagnostics.tail_bound,
            "skipped_rotated": report.diagnostics.skipped_rotated,
            "afe_n_max": report.diagnostics.afe_n_max,
        },
    });
    Ok(CommandOutput {
        json,
        csv: None,
        all_passed: true,
    })
}

/// Evaluate the oscillatory kernels at representative index tuples: one
/// K far from the stationary scale, and a K-tilde diagonal/off-diagonal
/// pair realizing the delta constraint.
pub fn cmd_kernels(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    let (eigen, _) = config.build_table(100)?;
    let sig = GammaSignature::for_table(&eigen);
    let weight = WeightSpec::standard(config.t)?;
    let r = sig.spectral();
    let k_spec = KernelSpec {
        n: 1,
        m1: 1,
        m2: 100,
        l1: 1,
        l2: 100,
        u: 0.5,
        weight,
        variant: KernelVariant::K,
        r,
    };
    let diag_spec = KernelSpec {
        n: 5,
        m1: 6,
        m2: 2,
        l1: 5,
        l2: 3,
        u: 0.5,
        weight,
        variant: KernelVariant::KTilde,
        r,
    };
    let mut off_spec = diag_spec;
    off_spec.n = 50;
    let k = oscillatory_kernel(&k_spec)?;
    let diag = oscillatory_kernel(&diag_spec)?;
    let off = oscillatory_kernel(&off_spec)?;
    let kernel_json = |name: &str, eval: &resonance_core::moments::KernelEvaluation| {
        json!({
            "kernel": name,
            "value": [eval.value.re, eval.value.im],
            "abs_value": eval.value.norm(),
            "min_abs_phase_deriv": eval.min_abs_phase_deriv,
            "amplitude_mass": eval.amplitude_mass,
        })
    };
    let json = json!({
        "schema": 1,
        "command": "kernels",
        "config": config.to_json(),
        "results": [
            kernel_json("K_offscale", &k),
            kernel_json("Ktilde_diagonal", &diag),
            kernel_json("Ktilde_offdiagonal", &off),
        ],
        "ktilde_diagonal_ratio": diag.value.norm() / off.value.norm().max(1e-300),
    });
    Ok(CommandOutput {
        json,
        csv: None,
        all_passed: true,
    })
}

/// Cross-check helper exposed for the acceptance suite: the diagonal main
/// term against the independent join enumeration.
pub fn diagonal_oracle_gap(config: &RunConfig) -> Result<f64> {
    let profile = config.profile()?;
    let a_max = profile.a_support as u64;
    let want = (a_max * a_max * (profile.r_support as u64))
        .max(profile.window.1.min(profile.r_support) as u64);
    let (eigen, _) = config.build_table(want)?;
    let polys = build_polynomials(&profile, &eigen)?;
    let direct =
        diagonal_main_term(&polys.r_star, &polys.a_half, &eigen, DiagonalVariant::Unsigned)?;
    let join =
        diagonal_main_term_join(&polys.r_star, &polys.a_half, &eigen, DiagonalVariant::Unsigned)?;
    Ok((direct.value - join).abs() / direct.value.abs().max(1.0))
}
