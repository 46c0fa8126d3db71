//! L-value evaluation on the critical line (approximate functional equation
//! and smoothed Dirichlet series), Rankin-Selberg / symmetric-square Euler
//! products, fractional powers, shifted local factors and the
//! Selberg-Delange mean-value check.

use alloc::vec::Vec;

use crate::arith::{
    generalized_binomial, EigenvalueTable, MultiplicativeFunction, PrimeList,
};
use crate::archimedean::GammaSignature;
use crate::error::{Error, Result};
use crate::flt;
use crate::gamma::log_gamma;
use crate::C64;

/// Even C^2 cutoff: 1 on [0, inner], quintic smoothstep down to 0 at 1.
#[derive(Clone, Copy, Debug)]
pub struct SmoothCutoff {
    pub inner: f64,
}

impl SmoothCutoff {
    pub fn new(inner: f64) -> Result<Self> {
        if !(inner > 0.0 && inner < 1.0) {
            return Err(Error::Domain("cutoff inner edge must lie in (0,1)"));
        }
        Ok(Self { inner })
    }

    pub fn phi(&self, x: f64) -> f64 {
        let x = flt::abs(x);
        if x <= self.inner {
            1.0
        } else if x >= 1.0 {
            0.0
        } else {
            let u = (x - self.inner) / (1.0 - self.inner);
            1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
        }
    }
}

impl Default for SmoothCutoff {
    fn default() -> Self {
        Self { inner: 0.5 }
    }
}

/// Everything needed to evaluate L(f, 1/2+it) by the approximate functional
/// equation: gamma signature, coefficients, truncation rule and the contour
/// discretisation of the V-weight.
pub struct AfeContext<'a> {
    pub sig: GammaSignature,
    pub eigen: &'a EigenvalueTable,
    /// n_max(t) = ceil(multiplier * (1 + |t|)).
    pub trunc_multiplier: f64,
    /// Half-width of the truncated contour in Im(u); e^{-W^2} sets the
    /// truncation error floor.
    pub contour_half_width: f64,
    /// Trapezoid panels across the contour (spectrally accurate for the
    /// Gaussian-damped integrand).
    pub contour_panels: usize,
}

impl<'a> AfeContext<'a> {
    pub fn new(eigen: &'a EigenvalueTable) -> Self {
        Self {
            sig: GammaSignature::for_table(eigen),
            eigen,
            trunc_multiplier: 50.0,
            contour_half_width: 7.0,
            contour_panels: 140,
        }
    }

    pub fn n_max(&self, t: f64) -> u64 {
        flt::ceil(self.trunc_multiplier * (1.0 + flt::abs(t))) as u64
    }

    /// Conductor scale q = max(|nu|, 2 pi)/(2 pi): V_nu transitions from ~1
    /// to rapid decay around y ~ q.
    fn conductor(&self, nu: f64) -> f64 {
        let two_pi = 2.0 * core::f64::consts::PI;
        flt::abs(nu).max(two_pi) / two_pi
    }

    /// Left contour abscissa for the small-y residue shift: strictly right
    /// of the first gamma pole at Re(u) = -(1/2 + min Re mu).
    fn sigma_left(&self) -> f64 {
        let (m1, m2) = self.sig.mu();
        let first_pole = -(0.5 + m1.re.min(m2.re));
        (first_pole * 0.5).max(-2.0)
    }
}

/// Discretised contour for V_nu at fixed nu: V(y) = sum_j c_j e^{-u_j log y}.
struct VNodes {
    u: Vec<C64>,
    c: Vec<C64>,
    /// Extra constant (1 for the residue-shifted small-y contour).
    offset: f64,
}

impl VNodes {
    fn build(ctx: &AfeContext<'_>, nu: f64, sigma: f64, offset: f64) -> Result<Self> {
        let n = ctx.contour_panels;
        let w = ctx.contour_half_width;
        let h = 2.0 * w / n as f64;
        let l_den = ctx.sig.log_l_inf(C64::new(0.5, nu))?;
        let mut u = Vec::with_capacity(n + 1);
        let mut c = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let v = -w + h * j as f64;
            let uj = C64::new(sigma, v);
            let lnum = ctx.sig.log_l_inf(C64::new(0.5, nu) + uj)?;
            // trapezoid weight; du = i dv so the 1/(2 pi i) absorbs the i
            let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
            let coeff = (uj * uj + lnum - l_den).exp() / uj
                * (wj * h / (2.0 * core::f64::consts::PI));
            u.push(uj);
            c.push(coeff);
        }
        Ok(Self { u, c, offset })
    }

    fn eval(&self, ln_y: f64) -> C64 {
        let mut acc = flt::KahanC::new();
        for j in 0..self.u.len() {
            acc.add(self.c[j] * (-self.u[j] * ln_y).exp());
        }
        acc.value() + self.offset
    }

    /// Evaluate at ln(y) when the contour is a uniform vertical grid:
    /// e^{-u_j ln y} advances by a constant rotation per node.
    fn eval_grid(&self, sigma: f64, w: f64, h: f64, ln_y: f64) -> C64 {
        let radial = flt::exp(-sigma * ln_y);
        let mut rot = C64::new(flt::cos(w * ln_y), flt::sin(w * ln_y)); // e^{-i(-w)ln y}
        let step = C64::new(flt::cos(h * ln_y), -flt::sin(h * ln_y));
        let mut acc = flt::KahanC::new();
        for (j, cj) in self.c.iter().enumerate() {
            if j % 16 == 0 {
                // the iterated rotation drifts by ~j*eps, which the heavily
                // cancelling coefficients amplify; restart it periodically
                let ph = (w - h * j as f64) * ln_y;
                rot = C64::new(flt::cos(ph), flt::sin(ph));
            }
            acc.add(cj * rot);
            rot *= step;
        }
        acc.value() * radial + self.offset
    }
}

/// The AFE cutoff weight
/// `V_nu(y) = (1/2 pi i) int y^{-u} e^{u^2} L_inf(1/2+i nu+u)/L_inf(1/2+i nu) du/u`.
///
/// The contour is placed adaptively: Re(u) = max(3, log(y/q)/2) for y >= 1
/// (keeping the Gaussian the dominant scale and the integrand conditioned),
/// and for y < 1 shifted left past u = 0, picking up the residue 1.
pub fn v_weight(ctx: &AfeContext<'_>, nu: f64, y: f64) -> Result<C64> {
    if !(y > 0.0) {
        return Err(Error::Domain("v_weight needs y > 0"));
    }
    let q = ctx.conductor(nu);
    let (sigma, offset) = if y < 1.0 {
        (ctx.sigma_left(), 1.0)
    } else {
        ((0.5 * flt::ln(y / q)).max(3.0), 0.0)
    };
    let nodes = VNodes::build(ctx, nu, sigma, offset)?;
    Ok(nodes.eval(flt::ln(y)))
}

/// L(f, 1/2+it) by the approximate functional equation
/// `S + Delta(it) conj(S)` with `S = sum_n lambda(n) n^{-1/2-it} V_t(n)`
/// (the conjugate form uses the real-coefficient symmetry
/// `V_{-t}(y) = conj(V_t(y))`).
pub fn evaluate_l_afe(ctx: &AfeContext<'_>, t: f64) -> Result<C64> {
    let n_max = ctx.n_max(t);
    if n_max > ctx.eigen.limit() {
        return Err(Error::IncompleteTable {
            what: "AFE coefficients",
            needed: n_max,
            have: ctx.eigen.limit(),
        });
    }
    let w = ctx.contour_half_width;
    let h = 2.0 * w / ctx.contour_panels as f64;
    let lam = ctx.eigen.values();
    let ln_q = flt::ln(ctx.conductor(t));
    // The contour abscissa trades conditioning against tail decay: the node
    // sum has mass ~ e^{sigma^2} (conductor/y)^sigma against |V| <= 1, so a
    // low sigma is essential for small y, while large y wants sigma growing
    // like log(y)/2. Quantize to quarter steps and cache one node set per
    // level so the rotation recurrence still applies within each band.
    let mut bands: alloc::collections::BTreeMap<i32, VNodes> = alloc::collections::BTreeMap::new();
    let mut s = flt::KahanC::new();
    for n in 1..=n_max {
        let ln_n = flt::ln(n as f64);
        let level = flt::ceil((0.5 * (ln_n - ln_q)).max(0.75) / 0.25) as i32;
        let sigma = level as f64 * 0.25;
        if !bands.contains_key(&level) {
            bands.insert(level, VNodes::build(ctx, t, sigma, 0.0)?);
        }
        let v = bands[&level].eval_grid(sigma, w, h, ln_n);
        // lambda(n) n^{-1/2} * e^{-it ln n} * V
        let ph = -t * ln_n;
        let chr = C64::new(flt::cos(ph), flt::sin(ph));
        s.add(chr * v * (lam[n as usize] / flt::sqrt(n as f64)));
    }
    let s = s.value();
    let delta = ctx.sig.delta_ratio(C64::new(0.0, t))?;
    Ok(s + delta * s.conj())
}

/// Smoothed Dirichlet series `sum_n lambda(n) n^{-s} phi(n/X)`.
pub fn evaluate_l_smoothed(
    ctx: &AfeContext<'_>,
    cutoff: &SmoothCutoff,
    s: C64,
    x: f64,
) -> Result<C64> {
    if s.re < 0.5 {
        return Err(Error::Domain("smoothed series needs Re(s) >= 1/2"));
    }
    if !(x >= 1.0) {
        return Err(Error::Domain("smoothed series needs X >= 1"));
    }
    let n_top = flt::floor(x) as u64;
    if n_top > ctx.eigen.limit() {
        return Err(Error::IncompleteTable {
            what: "smoothed-series coefficients",
            needed: n_top,
            have: ctx.eigen.limit(),
        });
    }
    let lam = ctx.eigen.values();
    let mut acc = flt::KahanC::new();
    for n in 1..=n_top {
        let phi = cutoff.phi(n as f64 / x);
        if phi == 0.0 {
            continue;
        }
        let term = (-s * flt::ln(n as f64)).exp() * (lam[n as usize] * phi);
        acc.add(term);
    }
    Ok(acc.value())
}

/// Local Euler factors at one prime: (zeta_p, sym2_p, rs_p), each the
/// inverse local factor evaluated at `x = p^{-s}`.
pub fn local_factors(lambda_p: f64, p: u64, s: C64) -> Result<(C64, C64, C64)> {
    let x = (-s * flt::ln(p as f64)).exp();
    let disc = C64::new(lambda_p * lambda_p - 4.0, 0.0);
    let root = disc.sqrt();
    let alpha = (C64::new(lambda_p, 0.0) + root) / 2.0;
    let beta = (C64::new(lambda_p, 0.0) - root) / 2.0;
    let one = C64::new(1.0, 0.0);
    let zeta_p = (one - x).inv();
    let sym2_p = ((one - alpha * alpha * x) * (one - x) * (one - beta * beta * x)).inv();
    let rs_p = zeta_p * sym2_p;
    Ok((zeta_p, sym2_p, rs_p))
}

/// Truncated Euler products of zeta, sym^2 and Rankin-Selberg over p <= P.
#[derive(Clone, Copy, Debug)]
pub struct SymSquareProducts {
    pub zeta: C64,
    pub sym2: C64,
    pub rs: C64,
}

pub fn symmetric_square_tools(
    eigen: &EigenvalueTable,
    s: C64,
    p_cutoff: u64,
) -> Result<SymSquareProducts> {
    if s.re <= 1.0 {
        return Err(Error::Domain("Euler products need Re(s) > 1"));
    }
    if p_cutoff > eigen.limit() {
        return Err(Error::IncompleteTable {
            what: "eigenvalues for Euler product",
            needed: p_cutoff,
            have: eigen.limit(),
        });
    }
    let primes = PrimeList::sieve(p_cutoff)?;
    let mut zeta = C64::new(1.0, 0.0);
    let mut sym2 = C64::new(1.0, 0.0);
    let mut rs = C64::new(1.0, 0.0);
    for &p in primes.as_slice() {
        let (zp, s2p, rsp) = local_factors(eigen.lambda(p)?, p, s)?;
        zeta *= zp;
        sym2 *= s2p;
        rs *= rsp;
    }
    Ok(SymSquareProducts { zeta, sym2, rs })
}

/// Which fractional power of L(f x f) to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FractionalVariant {
    /// z = 1/4: coefficients start a(p) = lambda(p)^2/4.
    Quarter,
    /// z = 1/2: coefficients start b(p) = lambda(p)^2/2.
    Half,
}

/// Coefficient of X^k in prod_i (1 - x_i X)^{-z} for the four inverse roots
/// {1, alpha^2, beta^2, 1} of the Rankin-Selberg local factor.
fn rs_power_coefficient(lambda_p: f64, z: f64, k: u32) -> f64 {
    let disc = C64::new(lambda_p * lambda_p - 4.0, 0.0);
    let root = disc.sqrt();
    let alpha = (C64::new(lambda_p, 0.0) + root) / 2.0;
    let a2 = alpha * alpha;
    let b2 = (a2).inv(); // alpha beta = 1
    let roots = [C64::new(1.0, 0.0), a2, b2, C64::new(1.0, 0.0)];
    let kk = k as usize;
    let mut series = alloc::vec![C64::new(0.0, 0.0); kk + 1];
    series[0] = C64::new(1.0, 0.0);
    for x in roots {
        // multiply by (1 - x X)^{-z} = sum_j binom(z+j-1, j) x^j X^j
        let mut out = alloc::vec![C64::new(0.0, 0.0); kk + 1];
        let mut xj = C64::new(1.0, 0.0);
        for j in 0..=kk {
            let bz = generalized_binomial(z + j as f64 - 1.0, j as u32);
            for i in 0..=(kk - j) {
                out[i + j] += series[i] * xj * bz;
            }
            xj *= x;
        }
        series = out;
    }
    series[kk].re
}

/// Coefficients of `L(f x f, s)^z` for z = 1/4 or 1/2, built per prime from
/// the generalized-binomial expansion of the degree-4 local factor.
pub fn fractional_power_coeffs(
    eigen: &EigenvalueTable,
    variant: FractionalVariant,
    limit: u64,
) -> Result<MultiplicativeFunction> {
    if limit > eigen.limit() {
        return Err(Error::IncompleteTable {
            what: "eigenvalues for fractional power",
            needed: limit,
            have: eigen.limit(),
        });
    }
    let z = match variant {
        FractionalVariant::Quarter => 0.25,
        FractionalVariant::Half => 0.5,
    };
    let lam = eigen.values().to_vec();
    Ok(MultiplicativeFunction::from_prime_power_rule(
        limit,
        move |p, k| rs_power_coefficient(lam[p as usize], z, k),
    ))
}

/// Hecke eigenvalues at powers of one prime, by the recursion.
pub fn hecke_power_seq(lambda_p: f64, j_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(j_max + 1);
    out.push(1.0);
    if j_max >= 1 {
        out.push(lambda_p);
    }
    for j in 2..=j_max {
        let next = lambda_p * out[j - 1] - out[j - 2];
        out.push(next);
    }
    out
}

/// d_{1/2} at prime powers (prime-independent).
pub fn d_half_power_seq(j_max: usize) -> Vec<f64> {
    (0..=j_max as u32)
        .map(|k| generalized_binomial(0.5 + k as f64 - 1.0, k))
        .collect()
}

/// Shifted local factor
/// `[sum_k u(p^{a+k}) v(p^{b+k}) p^{-ks}] / [sum_k u(p^k) v(p^k) p^{-ks}]`,
/// the G-factor pattern of the diagonal evaluations. `u`, `v` are values at
/// prime powers (index = exponent), truncated at `k_max`.
pub fn shifted_local_factor(
    u: &[f64],
    v: &[f64],
    shifts: (usize, usize),
    p: u64,
    s: C64,
    k_max: usize,
) -> Result<C64> {
    let (a, b) = shifts;
    if u.len() <= a + k_max || v.len() <= b + k_max {
        return Err(Error::Domain(
            "prime-power sequences too short for requested shifts and k_max",
        ));
    }
    let x = (-s * flt::ln(p as f64)).exp();
    let mut num = C64::new(0.0, 0.0);
    let mut den = C64::new(0.0, 0.0);
    let mut xk = C64::new(1.0, 0.0);
    for k in 0..=k_max {
        num += xk * (u[a + k] * v[b + k]);
        den += xk * (u[k] * v[k]);
        xk *= x;
    }
    if den.norm() < 1e-6 {
        return Err(Error::Conditioning("shifted local factor denominator near 0"));
    }
    Ok(num / den)
}

/// Result of the Selberg-Delange mean-value comparison.
#[derive(Clone, Copy, Debug)]
pub struct SelbergDelange {
    pub empirical: f64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Compare `sum_{n<=x} a_n` against `x (log x)^{z-1} G1 / Gamma(z)`.
/// `G1` is the caller's truncated Euler product for F(s) zeta(s)^{-z} at 1.
pub fn selberg_delange_check(
    coeffs: &MultiplicativeFunction,
    z: f64,
    x: f64,
    g1: f64,
) -> Result<SelbergDelange> {
    if x < 3.0 {
        return Err(Error::Domain("selberg_delange_check needs x >= 3"));
    }
    if x > coeffs.limit() as f64 {
        return Err(Error::IncompleteTable {
            what: "coefficients",
            needed: x as u64,
            have: coeffs.limit(),
        });
    }
    let mut acc = flt::Kahan::new();
    let vals = coeffs.values();
    for n in 1..=(flt::floor(x) as usize) {
        acc.add(vals[n]);
    }
    let gamma_z = log_gamma(C64::new(z, 0.0))?.exp().re;
    let predicted = x * flt::powf(flt::ln(x), z - 1.0) * g1 / gamma_z;
    let empirical = acc.value();
    Ok(SelbergDelange {
        empirical,
        predicted,
        ratio: empirical / predicted,
    })
}

/// Truncated Euler product for `G(1; z) = F(1) zeta(1)^{-z}`:
/// `prod_{p <= P} [sum_k c(p^k) p^{-k}] (1 - 1/p)^z`.
pub fn truncated_g1<F: Fn(u64, u32) -> f64>(
    coeff_at_prime_power: F,
    z: f64,
    p_cutoff: u64,
    k_max: u32,
) -> Result<f64> {
    let primes = PrimeList::sieve(p_cutoff)?;
    let mut log_acc = flt::Kahan::new();
    for &p in primes.as_slice() {
        let mut local = 0.0f64;
        let mut pk = 1.0f64;
        for k in 0..=k_max {
            local += coeff_at_prime_power(p, k) * pk;
            pk /= p as f64;
        }
        if local <= 0.0 {
            return Err(Error::Conditioning("nonpositive local factor in G1 product"));
        }
        log_acc.add(flt::ln(local) + z * flt::ln(1.0 - 1.0 / p as f64));
    }
    Ok(flt::exp(log_acc.value()))
}
