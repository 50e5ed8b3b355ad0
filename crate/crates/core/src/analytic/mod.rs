//! Multiprecision evaluation of the completed L-function
//! `Lambda(E, s) = N^{s/2} (2 pi)^{-s} Gamma(s) L(E, s)`.
//!
//! With `f(iy) = sum a_n e^{-2 pi n y}` and the Fricke relation
//! `f(i / (N y)) = w N y^2 f(iy)`, splitting the Mellin integral at
//! `y = t / sqrt N` gives
//!
//! ```text
//! Lambda(s) = t^s sum a_n E_{1-s}(2 pi n t / sqrt N)
//!           + w t^{s-2} sum a_n E_{s-1}(2 pi n / (t sqrt N))
//! ```
//!
//! where `E_nu` is the generalised exponential integral. At `t = 1` the
//! expression is symmetric under `s -> 2 - s` for either sign of `w`, so the
//! functional-equation residual is measured between the splits `t = 1` and
//! `t = 1.2`, which only agree when `w` and the coefficients are right.

pub mod expint;
pub mod mpc;

use rug::float::Constant;
use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::curve::WeierstrassCurve;
use crate::lseries::{dirichlet_coefficients, DirichletCoefficients};
use crate::{par, Error, Result};

use expint::{expint, expint_taylor_at_one};
use mpc::{gamma, Complex};

pub const DEFAULT_DIGITS: u32 = 30;

/// Split used for the functional-equation residual.
pub const CHECK_SPLIT: f64 = 1.2;

/// Sample points `c` for the Fricke ratio at `y = c / sqrt N`.
pub const FRICKE_SAMPLES: [f64; 3] = [1.05, 1.15, 1.3];

/// Largest split parameter (or inverse) the coefficient count is sized for.
const MAX_SPLIT: f64 = 1.3;

/// Supported real parts are `1 - SIGMA_SPAN ..= 1 + SIGMA_SPAN`.
const SIGMA_SPAN: f64 = 3.0;

/// Highest derivative order at `s = 1`.
pub const MAX_ORDER: usize = 6;

impl std::ops::Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::add(&self, &o)
    }
}

/// A multiprecision value with an error bound.
#[derive(Clone, Debug)]
pub struct MpValue {
    pub value: Complex,
    pub error_bound: f64,
    pub digits: u32,
}

impl MpValue {
    pub fn re(&self) -> f64 {
        self.value.re.to_f64()
    }

    pub fn im(&self) -> f64 {
        self.value.im.to_f64()
    }

    pub fn abs(&self) -> f64 {
        self.value.abs().to_f64()
    }

    pub fn re_string(&self) -> String {
        format_float(&self.value.re, self.digits)
    }

    pub fn im_string(&self) -> String {
        format_float(&self.value.im, self.digits)
    }
}

/// Fixed-point decimal with `digits` significant digits.
pub fn format_float(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mag = x.to_f64().abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - mag).max(0) as usize;
    let scaled = Float::with_val(x.prec(), x * Float::with_val(x.prec(), Float::u_pow_u(10, decimals as u32)));
    let int = scaled.round().to_integer().expect("finite value");
    let neg = int < 0;
    let mut s = int.abs().to_string();
    if decimals > 0 {
        while s.len() <= decimals {
            s.insert(0, '0');
        }
        s.insert(s.len() - decimals, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

impl Serialize for MpValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("MpValue", 3)?;
        st.serialize_field("re", &self.re_string())?;
        st.serialize_field("im", &self.im_string())?;
        st.serialize_field("error_bound", &self.error_bound)?;
        st.end()
    }
}

/// Everything needed to evaluate `Lambda(E, s)` at a fixed precision.
#[derive(Clone, Debug)]
pub struct AnalyticContext {
    pub curve: WeierstrassCurve,
    pub conductor: u64,
    pub coeffs: DirichletCoefficients,
    pub digits: u32,
    /// Absolute accuracy aimed for in `Lambda`.
    pub target: f64,
    prec: u32,
    w: i32,
    fricke: Vec<f64>,
}

/// Apparent order of vanishing at `s = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticRank {
    pub rank: usize,
    pub root_number: i32,
    /// `|Lambda^{(k)}(1)|` for `k = 0..=rank` (or up to the last order tried).
    #[serde(rename = "lambda_derivatives")]
    pub derivatives: Vec<f64>,
    pub tolerance: f64,
    /// `numerical` when a nonvanishing derivative was found, `lower-bound`
    /// when every order up to the cap looked like zero.
    pub confidence: &'static str,
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

impl AnalyticContext {
    pub fn new(curve: &WeierstrassCurve) -> Result<Self> {
        Self::with_digits(curve, DEFAULT_DIGITS)
    }

    pub fn with_digits(curve: &WeierstrassCurve, digits: u32) -> Result<Self> {
        if digits < 5 {
            return Err(Error::InvalidInput("at least 5 digits of precision are needed".into()));
        }
        Self::build(curve, digits, None)
    }

    /// Like [`with_digits`](Self::with_digits) but with at least `n_max`
    /// coefficients; extra terms only shrink the truncation error.
    pub fn with_terms(curve: &WeierstrassCurve, digits: u32, n_max: usize) -> Result<Self> {
        if digits < 5 {
            return Err(Error::InvalidInput("at least 5 digits of precision are needed".into()));
        }
        Self::build(curve, digits, Some(n_max))
    }

    fn build(curve: &WeierstrassCurve, digits: u32, n_max: Option<usize>) -> Result<Self> {
        let conductor = crate::local::conductor(curve)?;
        let target = 10f64.powi(-(digits as i32 - 2));
        let n_max = Self::terms_needed(conductor, target).max(n_max.unwrap_or(0));
        let coeffs = dirichlet_coefficients(curve, n_max)?;
        let prec = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 24;
        let mut ctx = AnalyticContext { curve: curve.clone(), conductor, coeffs, digits, target, prec, w: 0, fricke: Vec::new() };
        ctx.fricke = ctx.fricke_ratios()?;
        let eps = ctx.fricke[0].round();
        ctx.w = -(eps as i32);
        Ok(ctx)
    }

    /// Bound on the tail `sum_{n > m} |a_n| |E_nu(c n)| (ln u)^k`-weights.
    ///
    /// Uses `|a_n| <= 2n`, `|E_nu(x)| <= 2 e^{-x} / x` once
    /// `x >= 2 |Re nu| + 2`, `(ln u)^k <= (k/e)^k u`, and the split
    /// prefactors `<= 1.3^{|sigma| + 2}`.
    fn tail_bound(conductor: u64, m: usize) -> f64 {
        let c = 2.0 * std::f64::consts::PI / (MAX_SPLIT * (conductor as f64).sqrt());
        let k = MAX_ORDER as f64;
        let order_factor = (k / std::f64::consts::E).powf(k).max(1.0);
        let prefactor = MAX_SPLIT.powf(SIGMA_SPAN + 3.0);
        let x_min = 2.0 * (SIGMA_SPAN + 2.0) + 2.0;
        if c * (m as f64 + 1.0) < x_min {
            return f64::INFINITY;
        }
        4.0 * order_factor * prefactor / c * (-c * (m as f64 + 1.0)).exp() / (1.0 - (-c).exp())
    }

    fn terms_needed(conductor: u64, target: f64) -> usize {
        let mut m = 16usize;
        while Self::tail_bound(conductor, m) > target / 10.0 {
            m += m / 4 + 1;
        }
        // tighten
        let (mut lo, mut hi) = (m / 2, m);
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if Self::tail_bound(conductor, mid) > target / 10.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.n_max()
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    fn float(&self, x: f64) -> Float {
        Float::with_val(self.prec, x)
    }

    fn sqrt_n(&self) -> Float {
        Float::with_val(self.prec, self.conductor).sqrt()
    }

    /// `f(iy) = sum a_n e^{-2 pi n y}`.
    pub fn f_at(&self, y: &Float) -> Float {
        let p = self.prec;
        let q = Float::with_val(p, -(pi(p) * 2u32) * y).exp();
        let mut qn = q.clone();
        let mut acc = Float::new(p);
        for &a in self.coeffs.as_slice() {
            if a != 0 {
                acc += Float::with_val(p, &qn * a);
            }
            qn *= &q;
        }
        acc
    }

    /// `-f(i / (c sqrt N)) / (c^2 f(i c / sqrt N))` for each sample `c`.
    pub fn fricke_ratios(&self) -> Result<Vec<f64>> {
        let sqrt_n = self.sqrt_n();
        let mut out = Vec::new();
        for c in FRICKE_SAMPLES {
            let c = self.float(c);
            let y = Float::with_val(self.prec, &c / &sqrt_n);
            let y_dual = Float::with_val(self.prec, 1) / Float::with_val(self.prec, &c * &sqrt_n);
            let fy = self.f_at(&y);
            let fd = self.f_at(&y_dual);
            let ratio = -fd / (fy * Float::with_val(self.prec, c.square_ref()));
            let r = ratio.to_f64();
            if (r.abs() - 1.0).abs() > 1e-6 || !r.is_finite() {
                return Err(Error::PrecisionExhausted(format!("Fricke ratio {r} is not within 1e-6 of +-1")));
            }
            out.push(r);
        }
        if out.iter().any(|r| r.signum() != out[0].signum()) {
            return Err(Error::PrecisionExhausted("Fricke ratios disagree in sign".into()));
        }
        Ok(out)
    }

    /// Root number from the Fricke test, confirmed by the functional
    /// equation at `s = 1.2`.
    pub fn root_number(&self) -> Result<i32> {
        let s = Complex::from_f64(self.prec, 1.2, 0.0);
        let residual = |w: i32| -> Result<f64> {
            let a = self.lambda_split_w(&s, &self.float(1.0), w)?;
            let b = self.lambda_split_w(&Complex::from_f64(self.prec, 0.8, 0.0), &self.float(CHECK_SPLIT), w)?;
            Ok(a.value.sub(&b.value.scale(&self.float(w as f64))).abs().to_f64())
        };
        let (r_plus, r_minus) = (residual(1)?, residual(-1)?);
        let fe_w = if r_plus < r_minus { 1 } else { -1 };
        let (good, bad) = if fe_w == 1 { (r_plus, r_minus) } else { (r_minus, r_plus) };
        if good > 1e-8 || bad < 1e3 * good.max(self.target) {
            return Err(Error::PrecisionExhausted(format!(
                "functional equation does not single out a sign (residuals {r_plus:e}, {r_minus:e})"
            )));
        }
        if fe_w != self.w {
            return Err(Error::PrecisionExhausted("Fricke test and functional equation disagree".into()));
        }
        Ok(self.w)
    }

    /// Root number from the Fricke ratios alone.
    pub fn fricke_root_number(&self) -> i32 {
        self.w
    }

    pub fn fricke_samples(&self) -> &[f64] {
        &self.fricke
    }

    fn check_sigma(&self, s: &Complex) -> Result<()> {
        let sigma = s.re.to_f64();
        if (sigma - 1.0).abs() > SIGMA_SPAN {
            return Err(Error::PrecisionExhausted(format!(
                "Re(s) = {sigma} is outside the supported range [{}, {}]",
                1.0 - SIGMA_SPAN,
                1.0 + SIGMA_SPAN
            )));
        }
        Ok(())
    }

    fn lambda_split_w(&self, s: &Complex, t: &Float, w: i32) -> Result<MpValue> {
        self.check_sigma(s)?;
        let p = self.prec;
        let one = self.float(1.0);
        let two_pi_over = Float::with_val(p, pi(p) * 2u32) / self.sqrt_n();
        let step1 = Float::with_val(p, &two_pi_over * t);
        let step2 = Float::with_val(p, &two_pi_over / t);
        let nu1 = s.neg().add_real(&one);
        let nu2 = s.add_real(&-one.clone());
        let coeffs = self.coeffs.as_slice();
        let terms = par::map_range(coeffs.len(), |i| -> Result<(Complex, Complex, f64)> {
            let a = coeffs[i];
            if a == 0 {
                return Ok((Complex::zero(p), Complex::zero(p), 0.0));
            }
            let n = (i + 1) as u32;
            let x1 = Float::with_val(p, &step1 * n);
            let x2 = Float::with_val(p, &step2 * n);
            let af = Float::with_val(p, a);
            let e1 = expint(&nu1, &x1)?.scale(&af);
            let e2 = expint(&nu2, &x2)?.scale(&af);
            let mag = e1.abs().to_f64() + e2.abs().to_f64();
            Ok((e1, e2, mag))
        });
        let mut first = Vec::with_capacity(terms.len());
        let mut second = Vec::with_capacity(terms.len());
        let mut mag = 0.0;
        for t in terms {
            let (a, b, m) = t?;
            first.push(a);
            second.push(b);
            mag += m;
        }
        let s1 = par::pairwise_sum(first, Complex::zero(p));
        let s2 = par::pairwise_sum(second, Complex::zero(p));
        let two = self.float(2.0);
        let pre1 = s.pow_base(t);
        let pre2 = s.add_real(&-two).pow_base(t).scale(&self.float(w as f64));
        let value = pre1.mul(&s1).add(&pre2.mul(&s2));
        let scale = pre1.abs().to_f64().max(pre2.abs().to_f64());
        let rounding = mag * scale * (coeffs.len() as f64 + 10.0) * 2f64.powi(-(p as i32) + 8);
        let error_bound = Self::tail_bound(self.conductor, self.n_max()) + rounding;
        Ok(MpValue { value, error_bound, digits: self.digits })
    }

    /// `Lambda(s)` with the split at `y = t / sqrt N`.
    pub fn lambda_split(&self, s: &Complex, t: f64) -> Result<MpValue> {
        if !(1.0 / MAX_SPLIT..=MAX_SPLIT).contains(&t) {
            return Err(Error::InvalidInput(format!("split parameter {t} outside [1/1.3, 1.3]")));
        }
        self.lambda_split_w(s, &self.float(t), self.w)
    }

    pub fn lambda(&self, s: &Complex) -> Result<MpValue> {
        self.lambda_split(s, 1.0)
    }

    pub fn lambda_f64(&self, s: f64) -> Result<MpValue> {
        self.lambda(&Complex::from_f64(self.prec, s, 0.0))
    }

    /// `|Lambda(s) - w Lambda(2 - s)|` with the two sides evaluated at the
    /// splits `t = 1` and `t = 1.2`.
    pub fn functional_equation_residual(&self, s: &Complex) -> Result<f64> {
        let two = self.float(2.0);
        let a = self.lambda(s)?;
        let b = self.lambda_split(&s.neg().add_real(&two), CHECK_SPLIT)?;
        Ok(a.value.sub(&b.value.scale(&self.float(self.w as f64))).abs().to_f64())
    }

    /// `N^{s/2} (2 pi)^{-s} Gamma(s)`.
    fn archimedean(&self, s: &Complex) -> Result<Complex> {
        let p = self.prec;
        let base = self.sqrt_n() / Float::with_val(p, pi(p) * 2u32);
        Ok(s.pow_base(&base).mul(&gamma(s)?))
    }

    pub fn l_value(&self, s: &Complex) -> Result<MpValue> {
        let lam = self.lambda(s)?;
        let a = self.archimedean(s)?;
        let error_bound = lam.error_bound / a.abs().to_f64();
        Ok(MpValue { value: lam.value.div(&a), error_bound, digits: self.digits })
    }

    pub fn l_value_f64(&self, s: f64) -> Result<MpValue> {
        self.l_value(&Complex::from_f64(self.prec, s, 0.0))
    }

    /// Taylor coefficients `lambda_k` of `Lambda(1 + eps)`, `k = 0..=m`, with
    /// the summed magnitude of the terms of each.
    fn lambda_taylor_raw(&self, m: usize) -> Result<(Vec<Float>, Vec<f64>)> {
        if m > MAX_ORDER {
            return Err(Error::InvalidInput(format!("derivative order above {MAX_ORDER}")));
        }
        let p = self.prec;
        let two_pi_over = Float::with_val(p, pi(p) * 2u32) / self.sqrt_n();
        let coeffs = self.coeffs.as_slice();
        let per_n = par::map_range(coeffs.len(), |i| {
            let a = coeffs[i];
            if a == 0 {
                return vec![Float::new(p); m + 1];
            }
            let x = Float::with_val(p, &two_pi_over * (i as u32 + 1));
            expint_taylor_at_one(&x, m, p).into_iter().map(|c| c * a).collect()
        });
        let mut out = Vec::with_capacity(m + 1);
        let mut mags = Vec::with_capacity(m + 1);
        for k in 0..=m {
            // G(1+eps) + w G(1-eps) contributes (1 + w (-1)^k) c_k
            let factor = 1 + self.w * if k % 2 == 0 { 1 } else { -1 };
            let column: Vec<Float> = per_n.iter().map(|v| v[k].clone()).collect();
            let mag: f64 = column.iter().map(|c| c.to_f64().abs()).sum::<f64>() * factor.abs() as f64;
            let sum = par::pairwise_sum(column, Float::new(p));
            out.push(sum * factor);
            mags.push(mag);
        }
        Ok((out, mags))
    }

    fn taylor_error(&self, mag: f64, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        Self::tail_bound(self.conductor, self.n_max()) / fact
            + mag * (self.n_max() as f64 + 10.0) * 2f64.powi(-(self.prec as i32) + 8)
    }

    /// `Lambda^{(k)}(1)`.
    pub fn lambda_derivative(&self, k: usize) -> Result<MpValue> {
        let (coef, mags) = self.lambda_taylor_raw(k)?;
        let fact = Float::with_val(self.prec, Float::factorial(k as u32));
        let value = Complex::real(Float::with_val(self.prec, &coef[k] * &fact));
        let error_bound = self.taylor_error(mags[k], k) * fact.to_f64();
        Ok(MpValue { value, error_bound, digits: self.digits })
    }

    /// Taylor coefficients of `L(E, 1 + eps)` up to `eps^m`.
    pub fn l_taylor(&self, m: usize) -> Result<Vec<MpValue>> {
        let p = self.prec;
        let (lam, mags) = self.lambda_taylor_raw(m)?;
        // A(1 + eps) = (sqrt N / 2 pi) exp(eps (ln(sqrt N / 2 pi) - gamma) + sum_{i>=2} (-1)^i zeta(i) eps^i / i)
        let base = self.sqrt_n() / Float::with_val(p, pi(p) * 2u32);
        let mut log_series = vec![Float::new(p); m + 1];
        if m >= 1 {
            log_series[1] = Float::with_val(p, base.ln_ref()) - Float::with_val(p, Constant::Euler);
        }
        for (i, slot) in log_series.iter_mut().enumerate().skip(2) {
            let z = Float::with_val(p, Float::zeta_u(i as u32)) / i as u32;
            *slot = if i % 2 == 0 { z } else { -z };
        }
        let a: Vec<Float> = exp_series(&log_series).into_iter().map(|c| c * &base).collect();
        // L = Lambda / A by series division
        let mut l: Vec<Float> = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut acc = lam[k].clone();
            for j in 1..=k {
                acc -= Float::with_val(p, &a[j] * &l[k - j]);
            }
            l.push(acc / &a[0]);
        }
        // the division mixes orders; bound each by the worst Lambda error
        let worst = (0..=m).map(|k| self.taylor_error(mags[k], k)).fold(0.0, f64::max);
        let a0 = a[0].to_f64();
        Ok(l
            .into_iter()
            .map(|v| MpValue { value: Complex::real(v), error_bound: worst / a0 * 2f64.powi(m as i32), digits: self.digits })
            .collect())
    }

    /// `L^{(k)}(E, 1)`.
    pub fn l_derivative(&self, k: usize) -> Result<MpValue> {
        let t = self.l_taylor(k)?;
        let fact = Float::with_val(self.prec, Float::factorial(k as u32));
        let c = &t[k];
        Ok(MpValue {
            value: Complex::real(Float::with_val(self.prec, &c.value.re * &fact)),
            error_bound: c.error_bound * fact.to_f64(),
            digits: self.digits,
        })
    }

    /// `Lambda^{(k)}(1)` by central differences on the `t = 1.2` split;
    /// an independent check on the termwise derivatives.
    pub fn lambda_derivative_fd(&self, k: usize, h: f64) -> Result<f64> {
        let pts: Vec<f64> = (0..=k).map(|j| 1.0 + h * (j as f64 - k as f64 / 2.0)).collect();
        let mut acc = 0.0;
        let mut binom = 1.0;
        for (j, &s) in pts.iter().enumerate() {
            let v = self.lambda_split(&Complex::from_f64(self.prec, s, 0.0), CHECK_SPLIT)?.re();
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * v;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        Ok(acc / h.powi(k as i32))
    }

    /// Smallest `k` with `|Lambda^{(k)}(1)| > tol * scale_k`, where `scale_k`
    /// is the summed size of the terms of that coefficient.
    pub fn analytic_rank(&self, tol: f64) -> Result<AnalyticRank> {
        if tol <= 0.0 {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        let (coef, mags) = self.lambda_taylor_raw(MAX_ORDER)?;
        let mut derivs = Vec::new();
        for k in 0..=MAX_ORDER {
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let v = coef[k].to_f64().abs() * fact;
            derivs.push(v);
            let scale = (mags[k] * fact).max(f64::MIN_POSITIVE);
            if v > tol * scale && v > self.taylor_error(mags[k], k) * fact {
                return Ok(AnalyticRank { rank: k, root_number: self.w, derivatives: derivs, tolerance: tol, confidence: "numerical" });
            }
        }
        Ok(AnalyticRank { rank: MAX_ORDER + 1, root_number: self.w, derivatives: derivs, tolerance: tol, confidence: "lower-bound" })
    }
}

fn exp_series(a: &[Float]) -> Vec<Float> {
    let p = a[0].prec();
    let mut e = vec![Float::with_val(p, 1)];
    for n in 1..a.len() {
        let mut acc = Float::new(p);
        for j in 1..=n {
            acc += Float::with_val(p, &a[j] * &e[n - j]) * j as u32;
        }
        e.push(acc / n as u32);
    }
    e
}
