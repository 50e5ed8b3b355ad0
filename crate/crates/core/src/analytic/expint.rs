//! Generalised exponential integrals `E_nu(x) = int_1^oo e^{-xu} u^{-nu} du`
//! for real `x > 0` and complex `nu`.
//!
//! `E_nu(x) = x^{nu-1} Gamma(1-nu, x)`, so these are the termwise integrals
//! of the split Mellin transform. For `x >= 1` a continued fraction is used;
//! below that, the power series (with the logarithmic case at positive
//! integer `nu`).

use rug::float::Constant;
use rug::Float;

use super::mpc::{gamma, Complex};
use crate::{Error, Result};

/// Iteration cap for the continued fraction.
const MAX_CF_STEPS: usize = 200_000;

pub fn expint(nu: &Complex, x: &Float) -> Result<Complex> {
    if *x <= 0 {
        return Err(Error::InvalidInput("E_nu(x) needs x > 0".into()));
    }
    if *x >= 1 {
        expint_cf(nu, x)
    } else {
        expint_series(nu, x)
    }
}

/// Continued fraction, modified Lentz:
/// `E_nu(x) = e^{-x} / (x + nu - 1 nu / (x + nu + 2 - 2 (nu + 1) / (x + nu + 4 - ...)))`.
fn expint_cf(nu: &Complex, x: &Float) -> Result<Complex> {
    let p = nu.prec();
    let eps = Float::with_val(p, Float::u_exp(1, -(p as i32)));
    let two = Float::with_val(p, 2);
    let tiny = Float::with_val(p, Float::u_exp(1, -2 * p as i32));
    let guard = |z: Complex| if z.abs() < tiny { Complex::real(tiny.clone()) } else { z };
    let mut b = nu.add_real(x);
    let mut c = Complex::real(Float::with_val(p, Float::u_exp(1, 2 * p as i32)));
    let mut d = guard(b.clone()).inv();
    let mut h = d.clone();
    for i in 1..=MAX_CF_STEPS {
        // a_i = -i (nu - 1 + i)
        let a = nu.add_real(&Float::with_val(p, i as i64 - 1)).scale(&Float::with_val(p, -(i as i64)));
        b = b.add_real(&two);
        d = guard(a.mul(&d).add(&b)).inv();
        c = guard(b.add(&a.div(&c)));
        let del = c.mul(&d);
        h = h.mul(&del);
        if del.add_real(&Float::with_val(p, -1)).abs() < eps {
            let ex = Float::with_val(p, -x).exp();
            return Ok(h.scale(&ex));
        }
    }
    Err(Error::PrecisionExhausted(format!("continued fraction for E_nu({}) did not converge", x.to_f64())))
}

fn expint_series(nu: &Complex, x: &Float) -> Result<Complex> {
    let p = nu.prec();
    let eps = Float::with_val(p, Float::u_exp(1, -(p as i32) - 8));
    let neg_x = Float::with_val(p, -x);
    if let Some(n) = nu.as_integer().and_then(|n| n.to_u32()).filter(|&n| n >= 1) {
        // (-x)^{n-1}/(n-1)! (psi(n) - ln x) - sum_{k != n-1} (-x)^k / ((k - n + 1) k!)
        let n = n as usize;
        let mut psi = -Float::with_val(p, Constant::Euler);
        for m in 1..n {
            psi += Float::with_val(p, 1) / m as u32;
        }
        let mut term = Float::with_val(p, 1); // (-x)^k / k!
        let mut sum = Float::new(p);
        let mut lead = Float::new(p);
        let mut k = 0usize;
        loop {
            if k == n - 1 {
                lead = Float::with_val(p, &term * (psi.clone() - Float::with_val(p, x.ln_ref())));
            } else {
                sum += Float::with_val(p, &term / (k as i64 - n as i64 + 1));
            }
            k += 1;
            term *= &neg_x;
            term /= k as u32;
            if k > n && Float::with_val(p, term.abs_ref()) < eps {
                break;
            }
        }
        return Ok(Complex::real(lead - sum));
    }
    // Gamma(1 - nu) x^{nu - 1} - sum_k (-x)^k / ((1 - nu + k) k!)
    let one = Float::with_val(p, 1);
    let one_minus = nu.neg().add_real(&one);
    let head = gamma(&one_minus)?.mul(&nu.add_real(&-one.clone()).pow_base(x));
    let mut term = Float::with_val(p, 1);
    let mut sum = Complex::zero(p);
    let mut k = 0usize;
    loop {
        let denom = one_minus.add_real(&Float::with_val(p, k));
        sum = sum.add(&Complex::real(term.clone()).div(&denom));
        k += 1;
        term *= &neg_x;
        term /= k as u32;
        if Float::with_val(p, term.abs_ref()) < eps {
            break;
        }
    }
    Ok(head.sub(&sum))
}

/// Taylor coefficients `c_0, ..., c_m` of `eps -> E_{-eps}(x)` at `eps = 0`,
/// i.e. `int_1^oo e^{-xu} (ln u)^j / j! du`.
///
/// Uses `Gamma(1+eps) x^{-1-eps} - sum_k (-x)^k / ((1+k+eps) k!)` expanded in
/// `eps`; the alternating sum loses about `2x / ln 2` bits, which are added
/// to the working precision.
pub fn expint_taylor_at_one(x: &Float, m: usize, prec: u32) -> Vec<Float> {
    let xf = x.to_f64();
    let wp = prec + (2.9 * xf).ceil() as u32 + 16;
    let x = Float::with_val(wp, x);
    let eps = Float::with_val(wp, Float::u_exp(1, -(wp as i32)));
    // log Gamma(1+eps) - eps ln x = -(gamma + ln x) eps + sum_{i>=2} (-1)^i zeta(i) eps^i / i
    let mut log_series = vec![Float::new(wp); m + 1];
    if m >= 1 {
        log_series[1] = -(Float::with_val(wp, Constant::Euler) + Float::with_val(wp, x.ln_ref()));
    }
    for (i, slot) in log_series.iter_mut().enumerate().skip(2) {
        let z = Float::with_val(wp, Float::zeta_u(i as u32)) / i as u32;
        *slot = if i % 2 == 0 { z } else { -z };
    }
    let ex = exp_series(&log_series);
    let x_inv = Float::with_val(wp, 1) / &x;
    let mut out: Vec<Float> = ex.into_iter().map(|c| c * &x_inv).collect();
    // subtract sum_k (-x)^k/k! * (-1)^j / (1+k)^{j+1}
    let neg_x = Float::with_val(wp, -&x);
    let mut term = Float::with_val(wp, 1);
    let mut k = 0usize;
    loop {
        let inv = Float::with_val(wp, 1) / (k as u32 + 1);
        let mut w = Float::with_val(wp, &term * &inv);
        for (j, slot) in out.iter_mut().enumerate() {
            if j % 2 == 0 {
                *slot -= &w;
            } else {
                *slot += &w;
            }
            w *= &inv;
        }
        k += 1;
        term *= &neg_x;
        term /= k as u32;
        if k as f64 > xf && Float::with_val(wp, term.abs_ref()) < eps {
            break;
        }
    }
    out.into_iter().map(|c| Float::with_val(prec, c)).collect()
}

/// `exp` of a power series with zero constant term.
fn exp_series(a: &[Float]) -> Vec<Float> {
    let p = a[0].prec();
    let m = a.len() - 1;
    let mut e = vec![Float::with_val(p, 1)];
    // n e_n = sum_{j=1}^n j a_j e_{n-j}
    for n in 1..=m {
        let mut acc = Float::new(p);
        for j in 1..=n {
            acc += Float::with_val(p, &a[j] * &e[n - j]) * j as u32;
        }
        e.push(acc / n as u32);
    }
    e
}
