//! Minimal multiprecision complex arithmetic on top of MPFR floats, plus
//! the complex gamma function by Stirling's series.

use std::sync::Mutex;

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn zero(prec: u32) -> Self {
        Complex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn real(x: Float) -> Self {
        let prec = x.prec();
        Complex { re: x, im: Float::new(prec) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Complex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn from_c64(prec: u32, z: Complex64) -> Self {
        Self::from_f64(prec, z.re, z.im)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Complex { re: Float::with_val(self.prec(), &self.re + &o.re), im: Float::with_val(self.prec(), &self.im + &o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Complex { re: Float::with_val(self.prec(), &self.re - &o.re), im: Float::with_val(self.prec(), &self.im - &o.im) }
    }

    pub fn neg(&self) -> Self {
        Complex { re: Float::with_val(self.prec(), -&self.re), im: Float::with_val(self.prec(), -&self.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec();
        if self.is_real() && o.is_real() {
            return Complex::real(Float::with_val(p, &self.re * &o.re));
        }
        let rr = Float::with_val(p, &self.re * &o.re);
        let ii = Float::with_val(p, &self.im * &o.im);
        let ri = Float::with_val(p, &self.re * &o.im);
        let ir = Float::with_val(p, &self.im * &o.re);
        Complex { re: rr - ii, im: ri + ir }
    }

    pub fn scale(&self, x: &Float) -> Self {
        Complex { re: Float::with_val(self.prec(), &self.re * x), im: Float::with_val(self.prec(), &self.im * x) }
    }

    pub fn add_real(&self, x: &Float) -> Self {
        Complex { re: Float::with_val(self.prec(), &self.re + x), im: self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Complex { re: Float::with_val(self.prec(), &self.re / &n), im: -Float::with_val(self.prec(), &self.im / &n) }
    }

    pub fn div(&self, o: &Self) -> Self {
        if o.is_real() {
            return Complex {
                re: Float::with_val(self.prec(), &self.re / &o.re),
                im: Float::with_val(self.prec(), &self.im / &o.re),
            };
        }
        self.mul(&o.inv())
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let r = Float::with_val(p, self.re.exp_ref());
        if self.is_real() {
            return Complex::real(r);
        }
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Complex { re: Float::with_val(p, &r * &c), im: r * s }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        if self.is_real() && self.re > 0 {
            return Complex::real(Float::with_val(p, self.re.ln_ref()));
        }
        let modulus = self.abs().ln();
        let arg = Float::with_val(p, self.im.atan2_ref(&self.re));
        Complex { re: modulus, im: arg }
    }

    /// `x^self` for real `x > 0`.
    pub fn pow_base(&self, x: &Float) -> Self {
        let lx = Float::with_val(self.prec(), x.ln_ref());
        self.scale(&lx).exp()
    }

    /// If `self` is a real integer, that integer.
    pub fn as_integer(&self) -> Option<Integer> {
        if self.is_real() && self.re.is_integer() {
            self.re.to_integer()
        } else {
            None
        }
    }
}

static BERNOULLI: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// `B_0, ..., B_n` (with `B_1 = -1/2`), cached.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut cache = BERNOULLI.lock().expect("bernoulli cache");
    if cache.is_empty() {
        cache.push(Rational::from(1));
    }
    // sum_{k=0}^{m} C(m+1, k) B_k = 0
    while cache.len() <= n {
        let m = cache.len();
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, b) in cache.iter().enumerate() {
            acc += Rational::from(&binom * b.numer()) / b.denom();
            binom *= (m + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        cache.push(-acc / (m as u32 + 1));
    }
    cache[..=n].to_vec()
}

/// `ln Gamma(z)` by Stirling's series for `Re z` large enough; see [`gamma`].
fn ln_gamma_stirling(z: &Complex, terms: usize) -> Complex {
    let p = z.prec();
    let b = bernoulli_numbers(2 * terms);
    let half = Float::with_val(p, 0.5);
    let ln_z = z.ln();
    let mut acc = z.add_real(&-half.clone()).mul(&ln_z).sub(z);
    let ln_2pi = Float::with_val(p, Float::with_val(p, Constant::Pi) * 2u32).ln();
    acc = acc.add_real(&(ln_2pi / 2u32));
    let z_inv = z.inv();
    let z_inv2 = z_inv.mul(&z_inv);
    let mut power = z_inv;
    for k in 1..=terms {
        let coef = Float::with_val(p, &b[2 * k]) / (2 * k * (2 * k - 1)) as u32;
        acc = acc.add(&power.scale(&coef));
        power = power.mul(&z_inv2);
    }
    acc
}

/// Complex gamma function; errors at the poles.
pub fn gamma(z: &Complex) -> Result<Complex> {
    let p = z.prec();
    if let Some(n) = z.as_integer() {
        if n <= 0 {
            return Err(Error::InvalidInput(format!("Gamma has a pole at {n}")));
        }
    }
    if z.is_real() {
        return Ok(Complex::real(Float::with_val(p, z.re.gamma_ref())));
    }
    // shift so that the Stirling remainder, about exp(-2 pi |z|), is below 2^-p
    let wp = p + 32;
    let zw = Complex { re: Float::with_val(wp, &z.re), im: Float::with_val(wp, &z.im) };
    let target = 0.12 * wp as f64 + 10.0;
    let shift = (target - zw.re.to_f64()).ceil().max(0.0) as u32;
    let mut shifted = zw.clone();
    let mut denom = Complex::real(Float::with_val(wp, 1));
    for _ in 0..shift {
        denom = denom.mul(&shifted);
        shifted = shifted.add_real(&Float::with_val(wp, 1));
    }
    let terms = (std::f64::consts::PI * shifted.abs().to_f64()).ceil() as usize;
    let terms = terms.clamp(4, (wp as usize) / 2 + 8);
    let g = ln_gamma_stirling(&shifted, terms).exp().div(&denom);
    Ok(Complex { re: Float::with_val(p, &g.re), im: Float::with_val(p, &g.im) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[3], Rational::new());
        assert_eq!(b[4], Rational::from((-1, 30)));
        assert_eq!(b[12], Rational::from((-691, 2730)));
    }

    #[test]
    fn arithmetic_roundtrip() {
        let p = 128;
        let a = Complex::from_f64(p, 1.5, -2.0);
        let b = Complex::from_f64(p, -0.25, 3.0);
        let back = a.mul(&b).div(&b);
        assert!(back.sub(&a).abs() < 1e-35);
        let l = a.ln().exp();
        assert!(l.sub(&a).abs() < 1e-35);
    }

    #[test]
    fn gamma_matches_real_and_known_complex_values() {
        let p = 200;
        // Stirling path on a real argument against MPFR
        let z = Complex::from_f64(p, 0.3, 0.0);
        let stirling = {
            let zs = Complex { re: z.re.clone(), im: Float::with_val(p, Float::u_exp(1, -400)) };
            gamma(&zs).unwrap()
        };
        let exact = gamma(&z).unwrap();
        assert!(stirling.sub(&exact).abs() < 1e-50);
        // Gamma(i) = -0.15494982830181068512... - 0.49801566811835604271... i
        let g = gamma(&Complex::from_f64(p, 0.0, 1.0)).unwrap();
        let want_re = Float::with_val(p, Float::parse("-0.15494982830181068512495513048").unwrap());
        let want_im = Float::with_val(p, Float::parse("-0.49801566811835604271369111747").unwrap());
        assert!(Float::with_val(p, &g.re - &want_re).abs() < 1e-28);
        assert!(Float::with_val(p, &g.im - &want_im).abs() < 1e-28);
        assert!(gamma(&Complex::from_f64(p, -2.0, 0.0)).is_err());
    }
}
