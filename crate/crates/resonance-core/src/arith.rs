//! Integer and multiplicative arithmetic: primes, Ramanujan tau, Hecke
//! eigenvalue tables, generalized divisor functions and Dirichlet
//! convolution.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flt;

/// Primes up to an inclusive limit, via Eratosthenes.
#[derive(Clone, Debug)]
pub struct PrimeList {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeList {
    /// Sieve all primes `<= limit`. `limit < 2` is a domain error.
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain("prime sieve needs limit >= 2"));
        }
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        let mut i = 2usize;
        while i * i <= n {
            if !composite[i] {
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
            i += 1;
        }
        for (k, &c) in composite.iter().enumerate().skip(2) {
            if !c {
                primes.push(k as u64);
            }
        }
        Ok(Self { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    /// Primes in the half-open-by-value range `[lo, hi]`.
    pub fn in_range(&self, lo: f64, hi: f64) -> impl Iterator<Item = u64> + '_ {
        self.primes
            .iter()
            .copied()
            .filter(move |&p| (p as f64) >= lo && (p as f64) <= hi)
    }
}

/// Smallest-prime-factor table; `spf[n]` is the least prime dividing `n`
/// (0 for n < 2). Backbone of the linear multiplicative fills below.
pub(crate) fn spf_table(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        if i * i > limit {
            // remaining zeros are primes; fill directly
            for (j, s) in spf.iter_mut().enumerate().skip(i + 1) {
                if *s == 0 {
                    *s = j as u32;
                }
            }
            break;
        }
    }
    spf
}

/// Sparse coefficients of Jacobi's cube: eta^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2},
/// truncated to exponents `< n_terms`.
fn eta3_sparse(n_terms: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut k: usize = 0;
    loop {
        let e = k * (k + 1) / 2;
        if e >= n_terms {
            break;
        }
        let c = (2 * k + 1) as i64;
        out.push((e, if k % 2 == 0 { c } else { -c }));
        k += 1;
    }
    out
}

/// Multiply a dense i64 series by the sparse eta^3 factor.
fn sparse_mul_i64(cur: &[i64], sparse: &[(usize, i64)]) -> Vec<i64> {
    let n = cur.len();
    let mut out = vec![0i64; n];
    for &(j, c) in sparse {
        for i in 0..n - j {
            out[i + j] += c * cur[i];
        }
    }
    out
}

fn sparse_mul_i128(cur: &[i128], sparse: &[(usize, i64)]) -> Vec<i128> {
    let n = cur.len();
    let mut out = vec![0i128; n];
    for &(j, c) in sparse {
        let c = c as i128;
        for i in 0..n - j {
            out[i + j] += c * cur[i];
        }
    }
    out
}

/// Exact Ramanujan tau values `tau(1..=limit)` (index 0 unused).
///
/// Uses Delta = q (eta^3)^8 with eta^3 lacunary, so each squaring step is a
/// sparse convolution. Coefficients of eta^k stay inside i64 through k = 12
/// (bounded by d(n) n^{(k-2)/4}); later powers run in i128.
pub fn tau_table(limit: u64) -> Result<Vec<i128>> {
    if limit < 1 {
        return Err(Error::Domain("tau table needs limit >= 1"));
    }
    let n = limit as usize; // coefficient of q^{m} in (eta^3)^8 is tau(m+1)
    let sparse = eta3_sparse(n);
    // eta^6 directly from the sparse square
    let mut e6 = vec![0i64; n];
    for &(j1, c1) in &sparse {
        for &(j2, c2) in &sparse {
            let e = j1 + j2;
            if e < n {
                e6[e] += c1 * c2;
            } else {
                break;
            }
        }
    }
    let e9 = sparse_mul_i64(&e6, &sparse);
    let e12 = sparse_mul_i64(&e9, &sparse);
    let mut cur: Vec<i128> = e12.iter().map(|&x| x as i128).collect();
    for _ in 0..4 {
        cur = sparse_mul_i128(&cur, &sparse);
    }
    let mut tau = vec![0i128; n + 1];
    tau[1..].copy_from_slice(&cur[..n]);
    Ok(tau)
}

/// Which cusp form backs an eigenvalue table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// The weight-12 level-1 form Delta, lambda(n) = tau(n)/n^{11/2}.
    HolomorphicDelta,
    /// An even Hecke-Maass form with supplied spectral parameter and
    /// prime eigenvalues.
    MaassEven,
}

/// Hecke eigenvalues `lambda(n)` for `n <= limit`, normalised so the
/// Ramanujan bound reads `|lambda(p)| <= 2`.
///
/// The table is filled multiplicatively: prime powers by the Hecke
/// recursion `lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1})`,
/// composites as exact f64 products along the smallest-prime-factor split.
#[derive(Clone, Debug)]
pub struct EigenvalueTable {
    kind: FormKind,
    spectral: f64,
    limit: u64,
    values: Vec<f64>,
}

/// Fill values[] multiplicatively given values already set at prime powers.
fn fill_multiplicative(values: &mut [f64], spf: &[u32]) {
    let limit = values.len() - 1;
    values[1] = 1.0;
    for m in 2..=limit {
        let p = spf[m] as usize;
        let mut rest = m;
        while rest % p == 0 {
            rest /= p;
        }
        if rest > 1 {
            let pk = m / rest;
            values[m] = values[rest] * values[pk];
        }
    }
}

/// Set values at powers of `p` by the Hecke recursion from `values[p]`.
fn fill_prime_powers(values: &mut [f64], p: usize) {
    let limit = values.len() - 1;
    let lam_p = values[p];
    let mut prev = 1.0f64; // lambda(p^0)
    let mut cur = lam_p;
    let mut pk = p;
    while pk <= limit / p {
        pk *= p;
        let next = lam_p * cur - prev;
        values[pk] = next;
        prev = cur;
        cur = next;
    }
}

impl EigenvalueTable {
    /// Table for Delta, with tau computed exactly and the Deligne bound
    /// `|lambda(p)| <= 2` checked at every prime (a violation would mean the
    /// tau computation is broken).
    pub fn build_delta(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain("eigenvalue table needs limit >= 2"));
        }
        let tau = tau_table(limit)?;
        let n = limit as usize;
        let spf = spf_table(n);
        let mut values = vec![0.0f64; n + 1];
        for p in 2..=n {
            if spf[p] == p as u32 {
                let lam = tau[p] as f64 / flt::powf(p as f64, 5.5);
                if flt::abs(lam) > 2.0 + 1e-9 {
                    return Err(Error::Conditioning("Deligne bound violated at a prime"));
                }
                values[p] = lam;
                fill_prime_powers(&mut values, p);
            }
        }
        fill_multiplicative(&mut values, &spf);
        Ok(Self {
            kind: FormKind::HolomorphicDelta,
            spectral: 0.0,
            limit,
            values,
        })
    }

    /// Table for an even Maass form from its spectral parameter `r` and
    /// prime eigenvalues. Every prime `<= limit` must be supplied; the first
    /// missing one is reported.
    pub fn build_maass(r: f64, prime_lambdas: &[(u64, f64)], limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain("eigenvalue table needs limit >= 2"));
        }
        let n = limit as usize;
        let spf = spf_table(n);
        let mut values = vec![0.0f64; n + 1];
        let mut seen = vec![false; n + 1];
        for &(p, lam) in prime_lambdas {
            if p <= limit {
                let pu = p as usize;
                if pu < 2 || spf[pu] != p as u32 {
                    return Err(Error::ProfileRejected(format!(
                        "coefficient index {p} is not prime"
                    )));
                }
                values[pu] = lam;
                seen[pu] = true;
            }
        }
        for p in 2..=n {
            if spf[p] == p as u32 {
                if !seen[p] {
                    return Err(Error::IncompleteTable {
                        what: "maass prime eigenvalues",
                        needed: p as u64,
                        have: 0,
                    });
                }
                fill_prime_powers(&mut values, p);
            }
        }
        fill_multiplicative(&mut values, &spf);
        Ok(Self {
            kind: FormKind::MaassEven,
            spectral: r,
            limit,
            values,
        })
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    /// Spectral parameter: `r` for a Maass form, 0 for Delta.
    pub fn spectral(&self) -> f64 {
        self.spectral
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn lambda(&self, n: u64) -> Result<f64> {
        if n == 0 || n > self.limit {
            return Err(Error::IncompleteTable {
                what: "eigenvalues",
                needed: n,
                have: self.limit,
            });
        }
        Ok(self.values[n as usize])
    }

    /// Direct slice access; `values()[n]` is `lambda(n)`, index 0 unused.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Generalized binomial coefficient `binom(z, k) = z(z-1)...(z-k+1)/k!`.
pub fn generalized_binomial(z: f64, k: u32) -> f64 {
    let mut out = 1.0f64;
    for i in 0..k {
        out *= (z - i as f64) / (i as f64 + 1.0);
    }
    out
}

/// A multiplicative function tabulated on `1..=limit`.
#[derive(Clone, Debug)]
pub struct MultiplicativeFunction {
    limit: u64,
    values: Vec<f64>,
}

impl MultiplicativeFunction {
    /// Build from a prime-power rule `f(p^k)`; composites filled as exact
    /// products along the smallest-prime-factor split.
    pub fn from_prime_power_rule<F: FnMut(u64, u32) -> f64>(limit: u64, mut rule: F) -> Self {
        let n = limit.max(1) as usize;
        let spf = spf_table(n);
        let mut values = vec![0.0f64; n + 1];
        if n >= 1 {
            values[1] = 1.0;
        }
        for p in 2..=n {
            if spf[p] == p as u32 {
                let mut pk = p;
                let mut k = 1u32;
                loop {
                    values[pk] = rule(p as u64, k);
                    if pk > n / p {
                        break;
                    }
                    pk *= p;
                    k += 1;
                }
            }
        }
        fill_multiplicative(&mut values, &spf);
        Self {
            limit: limit.max(1),
            values,
        }
    }

    /// Wrap precomputed values (index 0 unused). The caller vouches for
    /// multiplicativity; convolutions use this.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("value table needs at least index 1"));
        }
        Ok(Self {
            limit: (values.len() - 1) as u64,
            values,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn value(&self, n: u64) -> Result<f64> {
        if n == 0 || n > self.limit {
            return Err(Error::IncompleteTable {
                what: "multiplicative function",
                needed: n,
                have: self.limit,
            });
        }
        Ok(self.values[n as usize])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Coefficients of the generalized divisor function `d_z`,
/// `d_z(p^k) = binom(z+k-1, k)`.
pub fn d_z_coefficients(z: f64, limit: u64) -> MultiplicativeFunction {
    MultiplicativeFunction::from_prime_power_rule(limit, |_, k| generalized_binomial(z + k as f64 - 1.0, k))
}

/// Dirichlet convolution `(f * g)(n) = sum_{d|n} f(d) g(n/d)` on the common
/// range of the two tables.
pub fn dirichlet_convolve(
    f: &MultiplicativeFunction,
    g: &MultiplicativeFunction,
) -> MultiplicativeFunction {
    let n = f.limit.min(g.limit) as usize;
    let mut values = vec![0.0f64; n + 1];
    for d in 1..=n {
        let fd = f.values[d];
        if fd == 0.0 {
            continue;
        }
        let mut m = d;
        let mut q = 1;
        while m <= n {
            values[m] += fd * g.values[q];
            m += d;
            q += 1;
        }
    }
    MultiplicativeFunction {
        limit: n as u64,
        values,
    }
}

/// Result of the Mertens-type prime sum for a Rankin-Selberg square.
#[derive(Clone, Copy, Debug)]
pub struct RankinMertens {
    /// `sum_{p <= x} lambda(p)^2 / p`.
    pub sum: f64,
    /// `log log x`, the expected leading term.
    pub loglog: f64,
    /// `sum - loglog`; should settle near a form-dependent constant.
    pub offset: f64,
}

/// Evaluate `sum_{p <= x} lambda(p)^2 / p` against its `log log x` leading
/// behaviour. Needs `3 <= x <= table.limit`.
pub fn rankin_mertens_sum(table: &EigenvalueTable, x: f64) -> Result<RankinMertens> {
    if x < 3.0 {
        return Err(Error::Domain("rankin_mertens_sum needs x >= 3"));
    }
    if x > table.limit() as f64 {
        return Err(Error::IncompleteTable {
            what: "eigenvalues",
            needed: x as u64,
            have: table.limit(),
        });
    }
    let primes = PrimeList::sieve(x as u64)?;
    let mut acc = flt::Kahan::new();
    for &p in primes.as_slice() {
        let lam = table.values()[p as usize];
        acc.add(lam * lam / p as f64);
    }
    let sum = acc.value();
    let loglog = flt::log_ln(x);
    Ok(RankinMertens {
        sum,
        loglog,
        offset: sum - loglog,
    })
}
