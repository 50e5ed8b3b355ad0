//! Euler factors, Dirichlet coefficients, evaluation in the half-plane of
//! absolute convergence, and the local zeta-function identities.
//!
//! Everything exact is done over integers or rationals. The floating-point
//! evaluators only accept `Re(s) > 3/2` and report a rigorous truncation
//! bound next to the value.

use std::fmt;

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, smallest_prime_factors};
use crate::curve::{minimal_model, WeierstrassCurve};
use crate::local::{self, LocalData, Reduction};
use crate::{par, Error, Result};

/// The local factor `L_p(E, s)^{-1}` as a polynomial in `T = p^{-s}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerFactor {
    pub p: u64,
    /// `1 + c1 T + c2 T^2`; trailing entries are zero at bad primes.
    pub coeffs: [i64; 3],
}

impl EulerFactor {
    /// `1 - a_p T + p T^2`.
    pub fn good(p: u64, a_p: i64) -> Self {
        EulerFactor { p, coeffs: [1, -a_p, p as i64] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    /// Coefficients up to the degree.
    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs[..=self.degree()]
    }

    /// Value of the polynomial at `t`.
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let [c0, c1, c2] = self.coeffs.map(|c| c as f64);
        Complex64::new(c0, 0.0) + t * (c1 + t * c2)
    }

    /// `a_{p^k}`, the coefficient of `T^k` in `1 / factor`.
    pub fn prime_power_coefficient(&self, k: u32) -> i64 {
        let [_, c1, c2] = self.coeffs;
        let (mut prev, mut cur) = (0i64, 1i64);
        for _ in 0..k {
            (prev, cur) = (cur, -c1 * cur - c2 * prev);
        }
        cur
    }
}

impl fmt::Display for EulerFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { '-' } else { '+' };
            let mag = c.unsigned_abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            let mono = if k == 1 { "T".to_string() } else { format!("T^{k}") };
            write!(f, " {sign} {coef}{mono}")?;
        }
        Ok(())
    }
}

/// Euler factor from the local data at one prime.
pub fn local_euler_factor(local: &LocalData) -> EulerFactor {
    let p = local.p;
    match local.reduction {
        Reduction::Good => EulerFactor::good(p, local.a_p),
        Reduction::SplitMultiplicative => EulerFactor { p, coeffs: [1, -1, 0] },
        Reduction::NonsplitMultiplicative => EulerFactor { p, coeffs: [1, 1, 0] },
        Reduction::Additive => EulerFactor { p, coeffs: [1, 0, 0] },
    }
}

/// Euler factor of `curve` at a single prime.
pub fn euler_factor_at(curve: &WeierstrassCurve, p: u64) -> Result<EulerFactor> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let (min, _) = minimal_model(curve)?;
    if min.discriminant().numer().is_divisible(&Integer::from(p)) {
        Ok(local_euler_factor(&local::tate_local(&min, p)?))
    } else {
        Ok(EulerFactor::good(p, local::ap(&min, p)?))
    }
}

/// Euler factors at every prime `<= p_max`, with bad primes from Tate's
/// algorithm, plus the full list of bad-prime data.
pub fn euler_factors(curve: &WeierstrassCurve, p_max: u64) -> Result<(Vec<EulerFactor>, Vec<LocalData>)> {
    let bad = local::bad_primes(curve)?;
    let table = local::ap_table(curve, p_max)?;
    let factors = table
        .into_iter()
        .map(|(p, a)| match bad.iter().find(|l| l.p == p) {
            Some(l) => local_euler_factor(l),
            None => EulerFactor::good(p, a),
        })
        .collect();
    Ok((factors, bad))
}

/// `a_1, ..., a_N` of `L(E, s) = sum a_n n^{-s}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCoefficients {
    coeffs: Vec<i64>,
    pub conductor: u64,
    pub bad_primes: Vec<u64>,
}

impl DirichletCoefficients {
    /// Coefficients from Euler factors covering every prime `<= n_max`.
    pub fn from_factors(factors: &[EulerFactor], n_max: usize, conductor: u64, bad_primes: Vec<u64>) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        let spf = smallest_prime_factors(n_max);
        let mut by_prime = vec![None; n_max + 1];
        for f in factors.iter().filter(|f| f.p as usize <= n_max) {
            by_prime[f.p as usize] = Some(*f);
        }
        let mut a = vec![0i64; n_max + 1];
        a[1] = 1;
        for n in 2..=n_max {
            let p = spf[n] as usize;
            let mut pk = p;
            let mut rest = n / p;
            let mut k = 1;
            while rest % p == 0 {
                rest /= p;
                pk *= p;
                k += 1;
            }
            a[n] = if rest == 1 {
                let f = by_prime[p].ok_or_else(|| Error::InvalidInput(format!("missing Euler factor at {p}")))?;
                // a_{p^k} = -c1 a_{p^{k-1}} - c2 a_{p^{k-2}}
                let [_, c1, c2] = f.coeffs;
                let prev2 = if k >= 2 { a[pk / p / p] } else { 0 };
                -c1 * a[pk / p] - c2 * prev2
            } else {
                a[pk] * a[rest]
            };
        }
        a.remove(0);
        Ok(DirichletCoefficients { coeffs: a, conductor, bad_primes })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_n` for `1 <= n <= n_max`.
    pub fn get(&self, n: usize) -> i64 {
        self.coeffs[n - 1]
    }

    /// `[a_1, ..., a_N]`.
    pub fn as_slice(&self) -> &[i64] {
        &self.coeffs
    }

    /// One `n a_n` line per coefficient.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.coeffs.len() * 8);
        for (i, a) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{} {}\n", i + 1, a));
        }
        out
    }

    /// JSON array `[a_1, ..., a_N]`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.coeffs).expect("integers serialize")
    }
}

pub fn dirichlet_coefficients(curve: &WeierstrassCurve, n_max: usize) -> Result<DirichletCoefficients> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let (factors, bad) = euler_factors(curve, n_max as u64)?;
    let conductor = local::conductor_from(&bad)?;
    DirichletCoefficients::from_factors(&factors, n_max, conductor, bad.iter().map(|l| l.p).collect())
}

/// `a_n` for a single `n` by factoring it; independent of the sieve.
pub fn coefficient(curve: &WeierstrassCurve, n: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::InvalidInput("coefficients are indexed from 1".into()));
    }
    let mut rest = n;
    let mut acc = 1i64;
    let mut d = 2u64;
    while rest > 1 {
        if d * d > rest {
            d = rest;
        }
        if rest % d == 0 {
            let mut k = 0;
            while rest % d == 0 {
                rest /= d;
                k += 1;
            }
            acc *= euler_factor_at(curve, d)?.prime_power_coefficient(k);
        }
        d += 1;
    }
    Ok(acc)
}

/// A truncated series value with a bound on the omitted part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Upper bound for `|L(s) - value|`.
    pub tail_bound: f64,
    /// Number of primes or coefficients used.
    pub terms: usize,
}

fn check_region(s: Complex64) -> Result<()> {
    if s.re > 1.5 {
        Ok(())
    } else {
        Err(Error::OutsideConvergenceRegion(s.re))
    }
}

/// `n^{-s}`.
fn n_pow_neg(n: f64, s: Complex64) -> Complex64 {
    (-s * n.ln()).exp()
}

const BLOCK: usize = 4096;

/// `prod_p factor(p^{-s})^{-1}`, summed as logarithms in fixed blocks.
pub fn euler_product(factors: &[EulerFactor], s: Complex64) -> Complex64 {
    let blocks = factors.len().div_ceil(BLOCK);
    let partial = par::map_range(blocks, |b| {
        let chunk = &factors[b * BLOCK..((b + 1) * BLOCK).min(factors.len())];
        let logs = chunk.iter().map(|f| f.eval(n_pow_neg(f.p as f64, s)).ln()).collect();
        par::pairwise_sum(logs, Complex64::new(0.0, 0.0))
    });
    (-par::pairwise_sum(partial, Complex64::new(0.0, 0.0))).exp()
}

/// `sum_{n <= N} a_n n^{-s}`, summed in fixed blocks.
pub fn dirichlet_sum(coeffs: &[i64], s: Complex64) -> Complex64 {
    let blocks = coeffs.len().div_ceil(BLOCK);
    let partial = par::map_range(blocks, |b| {
        let lo = b * BLOCK;
        let hi = ((b + 1) * BLOCK).min(coeffs.len());
        let terms = (lo..hi)
            .filter(|&i| coeffs[i] != 0)
            .map(|i| coeffs[i] as f64 * n_pow_neg((i + 1) as f64, s))
            .collect();
        par::pairwise_sum(terms, Complex64::new(0.0, 0.0))
    });
    par::pairwise_sum(partial, Complex64::new(0.0, 0.0))
}

/// Bound for `sum_{n > N} sigma_0(n) n^{1/2 - sigma}`.
///
/// With `a = sigma - 1/2` and `D(x) = sum_{n <= x} sigma_0(n) <= x (ln x + 1)`,
/// partial summation gives `a N^{1-a} ((ln N + 1)/(a-1) + 1/(a-1)^2)`.
pub fn dirichlet_tail_bound(n_max: usize, sigma: f64) -> f64 {
    let a = sigma - 0.5;
    let n = n_max.max(1) as f64;
    a * n.powf(1.0 - a) * ((n.ln() + 1.0) / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0)))
}

/// Bound for `|log prod_{p > P} L_p(s)|`.
///
/// Each factor has two roots of size at most `sqrt p`, so the log is at most
/// `2 x / (1 - x)` with `x = p^{1/2 - sigma}`; the sum over `n > P` of
/// `n^{1/2-sigma}` is compared with an integral.
pub fn euler_log_tail_bound(p_max: u64, sigma: f64) -> f64 {
    let big_p = p_max.max(2) as f64;
    let x = big_p.powf(0.5 - sigma);
    2.0 / (1.0 - x) * big_p.powf(1.5 - sigma) / (sigma - 1.5)
}

/// `L(E, s)` as the Euler product over `p <= p_max`.
pub fn eval_euler(curve: &WeierstrassCurve, s: Complex64, p_max: u64) -> Result<SeriesValue> {
    check_region(s)?;
    let (factors, _) = euler_factors(curve, p_max)?;
    Ok(eval_euler_factors(&factors, s, p_max))
}

/// Euler product from precomputed factors (all primes `<= p_max`).
pub fn eval_euler_factors(factors: &[EulerFactor], s: Complex64, p_max: u64) -> SeriesValue {
    let value = euler_product(factors, s);
    let delta = euler_log_tail_bound(p_max, s.re);
    SeriesValue { value, tail_bound: value.norm() * delta.exp_m1(), terms: factors.len() }
}

/// `L(E, s)` as the Dirichlet series truncated at `n_max`.
pub fn eval_dirichlet(curve: &WeierstrassCurve, s: Complex64, n_max: usize) -> Result<SeriesValue> {
    check_region(s)?;
    let coeffs = dirichlet_coefficients(curve, n_max)?;
    Ok(eval_dirichlet_coeffs(&coeffs, s))
}

pub fn eval_dirichlet_coeffs(coeffs: &DirichletCoefficients, s: Complex64) -> SeriesValue {
    SeriesValue {
        value: dirichlet_sum(coeffs.as_slice(), s),
        tail_bound: dirichlet_tail_bound(coeffs.n_max(), s.re),
        terms: coeffs.n_max(),
    }
}

/// `B_{2k} / (2k)!` for `k = 1..=8`.
const EM_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Riemann zeta by Euler–Maclaurin summation; any `s != 1`.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-12 {
        return Err(Error::InvalidInput("zeta has a pole at s = 1".into()));
    }
    let n = 24.0 + 2.0 * s.norm().ceil();
    let head: Complex64 = (1..n as u64).map(|k| n_pow_neg(k as f64, s)).sum();
    let n_s = n_pow_neg(n, s);
    let mut acc = head + n_s * n / (s - 1.0) + n_s * 0.5;
    // rising factorial s (s+1) ... (s+2k-2) times N^{-s-2k+1}
    let mut rising = s;
    let mut power = n_s / n;
    for (k, c) in EM_COEFFS.iter().enumerate() {
        acc += rising * power * *c;
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        power /= n * n;
    }
    Ok(acc)
}

/// `zeta_S(Q, s)`: the Riemann zeta function with the Euler factors at the
/// primes in `s_primes` removed.
pub fn zeta_s(s: Complex64, s_primes: &[u64]) -> Result<Complex64> {
    let mut z = riemann_zeta(s)?;
    for &p in s_primes {
        z *= Complex64::new(1.0, 0.0) - n_pow_neg(p as f64, s);
    }
    Ok(z)
}

/// `exp(sum_{j=1}^k N_j T^j / j)` to `O(T^{k+1})`.
pub fn weil_zeta_from_counts(counts: &[u64], k: usize) -> Vec<Rational> {
    let n: Vec<Integer> = (0..k).map(|j| Integer::from(counts.get(j).copied().unwrap_or(0))).collect();
    // Z' = F' Z with j f_j = N_j, so m z_m = sum_{j=1}^m N_j z_{m-j}
    let mut z = vec![Rational::from(1)];
    for m in 1..=k {
        let mut acc = Rational::new();
        for j in 1..=m {
            acc += Rational::from(&n[j - 1] * &z[m - j]);
        }
        z.push(acc / m as u32);
    }
    z
}

/// Power series of `num / den` to `O(T^{k+1})`; `den[0]` must be nonzero.
pub fn rational_series(num: &[i64], den: &[i64], k: usize) -> Vec<Rational> {
    let d0 = Rational::from(den[0]);
    let mut out: Vec<Rational> = Vec::with_capacity(k + 1);
    for m in 0..=k {
        let mut acc = Rational::from(num.get(m).copied().unwrap_or(0));
        for j in 1..=m.min(den.len() - 1) {
            acc -= Rational::from(den[j]) * &out[m - j];
        }
        out.push(acc / &d0);
    }
    out
}

/// Series of `(1 - a_p T + p T^2) / ((1 - T)(1 - pT))`.
pub fn local_zeta_series(p: u64, a_p: i64, k: usize) -> Vec<Rational> {
    let p = p as i64;
    rational_series(&[1, -a_p, p], &[1, -(1 + p), p], k)
}

/// Power sums `alpha^j + beta^j`, `j = 0..=k`, for the roots of
/// `X^2 - a_p X + p`.
pub fn newton_sums(p: u64, a_p: i64, k: usize) -> Vec<Integer> {
    let mut s = vec![Integer::from(2), Integer::from(a_p)];
    for j in 2..=k {
        let next = Integer::from(a_p) * &s[j - 1] - Integer::from(p) * &s[j - 2];
        s.push(next);
    }
    s.truncate(k + 1);
    s
}

/// Whether `N_{p^j} = p^j + 1 - alpha^j - beta^j` for every given count.
pub fn trace_formula_holds(p: u64, a_p: i64, counts: &[u64]) -> bool {
    let sums = newton_sums(p, a_p, counts.len());
    counts.iter().enumerate().all(|(i, &n)| {
        let j = i as u32 + 1;
        Integer::from(Integer::from(p).pow(j)) + 1u32 - &sums[j as usize] == n
    })
}

/// Whether the series built from the counts equals the local zeta function.
pub fn zeta_factorization_holds(p: u64, a_p: i64, counts: &[u64]) -> bool {
    let k = counts.len();
    weil_zeta_from_counts(counts, k) == local_zeta_series(p, a_p, k)
}

/// Minimal model, checked to have good reduction at `p`.
fn good_minimal(curve: &WeierstrassCurve, p: u64) -> Result<WeierstrassCurve> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let (min, _) = minimal_model(curve)?;
    if min.discriminant().numer().is_divisible(&Integer::from(p)) {
        return Err(Error::BadReduction(p.to_string()));
    }
    Ok(min)
}

/// `a_p` and the counts `N_{p^j}`, `j = 1..=k_max`, by enumeration.
pub fn local_counts(curve: &WeierstrassCurve, p: u64, k_max: u32) -> Result<(i64, Vec<u64>)> {
    let min = good_minimal(curve, p)?;
    let counts = (1..=k_max).map(|k| local::count_points(&min, p, k)).collect::<Result<Vec<_>>>()?;
    let a_p = local::ap(&min, p)?;
    Ok((a_p, counts))
}

pub fn trace_formula_check(curve: &WeierstrassCurve, p: u64, k_max: u32) -> Result<bool> {
    let (a_p, counts) = local_counts(curve, p, k_max)?;
    Ok(trace_formula_holds(p, a_p, &counts))
}

pub fn zeta_factorization_check(curve: &WeierstrassCurve, p: u64, k_max: u32) -> Result<bool> {
    let (a_p, counts) = local_counts(curve, p, k_max)?;
    Ok(zeta_factorization_holds(p, a_p, &counts))
}
