//! Néron–Tate canonical heights.
//!
//! Normalised so that `h(P) = lim log max(|num x(2^k P)|, |den x(2^k P)|) / 4^k`.
//! The primary path sums local heights on the global minimal model: the
//! archimedean one by Tate's series in Silverman's shifted form, the
//! non-archimedean ones from the valuations of the point against the
//! reduction type. The doubling limit itself is kept as an independent
//! check with its own error estimate.

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{factor, valuation_q};
use crate::curve::{minimal_model, CurvePoint, WeierstrassCurve};
use crate::{Error, Result};

/// Working precision (bits) for the archimedean series.
const PREC: u32 = 160;

/// Decimal digits the archimedean series is truncated for.
const DIGITS: f64 = 40.0;

#[derive(Clone, Debug, Serialize)]
pub struct HeightValue {
    pub value: f64,
    pub error_bound: f64,
}

/// `log max(|a|, |b|)` for `x = a / b` in lowest terms; 0 at infinity.
pub fn naive_height(p: &CurvePoint) -> f64 {
    match p.x() {
        None => 0.0,
        Some(x) => {
            let a = x.numer().clone().abs();
            let m = if &a > x.denom() { a } else { x.denom().clone() };
            if m == 0 {
                0.0
            } else {
                Float::with_val(64, &m).ln().to_f64()
            }
        }
    }
}

/// Archimedean local height, Silverman's algorithm, without the
/// `log |Delta| / 6` term (which cancels globally).
fn lambda_infinity(curve: &WeierstrassCurve, x: &Rational) -> f64 {
    let p = PREC;
    let [b2, b4, b6, b8] = curve.b_invariants();
    let fl = |r: &Rational| Float::with_val(p, r);
    let (b2, b4, b6, b8) = (fl(&b2), fl(&b4), fl(&b6), fl(&b8));
    // invariants of the model shifted by x -> x + 1
    let b2s = Float::with_val(p, &b2 - 12u32);
    let b4s = Float::with_val(p, &b4 - &b2) + 6u32;
    let b6s = Float::with_val(p, &b6 - Float::with_val(p, &b4 * 2u32)) + &b2 - 4u32;
    let b8s = Float::with_val(p, &b8 - Float::with_val(p, &b6 * 3u32)) + Float::with_val(p, &b4 * 3u32) - &b2 + 3u32;
    let h = [b2.to_f64().abs(), 2.0 * b4.to_f64().abs(), 2.0 * b6.to_f64().abs(), b8.to_f64().abs()]
        .into_iter()
        .fold(4.0f64, f64::max);
    let n = (5.0 / 3.0 * DIGITS + 0.5 + 0.75 * (7.0 + 4.0 / 3.0 * h.ln()).ln()).ceil() as usize;
    let xf = Float::with_val(p, x);
    let (mut t, mut beta) = if Float::with_val(p, xf.abs_ref()) < 0.5 {
        (Float::with_val(p, 1) / (xf + 1u32), false)
    } else {
        (Float::with_val(p, 1) / xf, true)
    };
    let mut mu = -Float::with_val(p, t.abs_ref()).ln();
    let mut f = Float::with_val(p, 1);
    for _ in 0..=n {
        f /= 4u32;
        let (c2, c4, c6, c8) = if beta { (&b2, &b4, &b6, &b8) } else { (&b2s, &b4s, &b6s, &b8s) };
        let t2 = Float::with_val(p, t.square_ref());
        let t3 = Float::with_val(p, &t2 * &t);
        let t4 = Float::with_val(p, t2.square_ref());
        let w = Float::with_val(p, c6 * &t4) + Float::with_val(p, c4 * &t3) * 2u32 + Float::with_val(p, c2 * &t2) + Float::with_val(p, &t * 4u32);
        let z = Float::with_val(p, 1) - Float::with_val(p, c4 * &t2) - Float::with_val(p, c6 * &t3) * 2u32 - Float::with_val(p, c8 * &t4);
        let zw = if beta { Float::with_val(p, &z + &w) } else { Float::with_val(p, &z - &w) };
        if Float::with_val(p, w.abs_ref()) <= Float::with_val(p, z.abs_ref()) * 2u32 {
            mu += Float::with_val(p, &f * Float::with_val(p, z.abs_ref()).ln());
            t = w / &z;
        } else {
            mu += Float::with_val(p, &f * Float::with_val(p, zw.abs_ref()).ln());
            t = w / zw;
            beta = !beta;
        }
    }
    mu.to_f64()
}

/// Non-archimedean local height at a prime of bad reduction, in units of
/// `log p`, on a model minimal at `p`.
fn lambda_bad(curve: &WeierstrassCurve, x: &Rational, y: &Rational, p: &Integer) -> f64 {
    let [a1, a2, a3, a4, _a6] = curve.coefficients().clone();
    let [b2, b4, b6, b8] = curve.b_invariants();
    let v = |r: &Rational| -> i64 { if *r == 0 { i64::MAX / 4 } else { valuation_q(r, p) } };
    let x2 = Rational::from(x * x);
    let n = v(&curve.discriminant());
    let a = v(&(Rational::from(&x2 * 3u32) + Rational::from(&a2 * x) * 2u32 + &a4 - Rational::from(&a1 * y)));
    let b = v(&(Rational::from(y * 2u32) + Rational::from(&a1 * x) + &a3));
    let c = v(&(Rational::from(&x2 * &x2) * 3u32
        + Rational::from(&x2 * x) * &b2
        + Rational::from(&x2 * &b4) * 3u32
        + Rational::from(x * &b6) * 3u32
        + &b8));
    if a <= 0 || b <= 0 {
        return (-v(x)).max(0) as f64;
    }
    if v(&curve.c4()) == 0 {
        let m = (b as f64).min(n as f64 / 2.0);
        return m * (m - n as f64) / n as f64;
    }
    if c >= 3 * b {
        -2.0 * b as f64 / 3.0
    } else {
        -(c as f64) / 4.0
    }
}

/// `h(P)` by local heights.
pub fn canonical_height(curve: &WeierstrassCurve, pt: &CurvePoint) -> Result<HeightValue> {
    if !curve.contains(pt) {
        return Err(Error::PointNotOnCurve);
    }
    let (min, iso) = minimal_model(curve)?;
    let q = iso.map_point(pt);
    let CurvePoint::Affine(x, y) = &q else {
        return Ok(HeightValue { value: 0.0, error_bound: 0.0 });
    };
    let mut total = lambda_infinity(&min, x);
    let disc = min.discriminant();
    let mut bad: Vec<Integer> = factor(disc.numer()).into_iter().map(|(p, _)| p).collect();
    // primes dividing the denominator of x but not the discriminant contribute max(0, -v(x)) log p
    for (p, _) in factor(x.denom()) {
        if !bad.contains(&p) {
            bad.push(p);
        }
    }
    for p in &bad {
        let lp = Float::with_val(64, p).ln().to_f64();
        total += lambda_bad(&min, x, y, p) * lp;
    }
    // clamp tiny negative rounding for torsion points
    let err = 1e-25f64.max(total.abs() * 4.0 * f64::EPSILON);
    let value = if total.abs() <= err { 0.0 } else { total };
    Ok(HeightValue { value, error_bound: err })
}

/// Doubling-limit height `h(2^k P) / 4^k` with the estimate
/// `max_j |h(2^{j+1} P) - 4 h(2^j P)| / (3 * 4^k)` for the remaining error.
///
/// Stops early once the coordinates exceed `max_digits` digits.
pub fn height_by_doubling(curve: &WeierstrassCurve, pt: &CurvePoint, k: u32, max_digits: u64) -> Result<HeightValue> {
    if !curve.contains(pt) {
        return Err(Error::PointNotOnCurve);
    }
    let (min, iso) = minimal_model(curve)?;
    let mut q = iso.map_point(pt);
    let mut h = naive_height(&q);
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for _ in 0..k {
        let next = min.add(&q, &q)?;
        if next.is_infinity() {
            return Ok(HeightValue { value: 0.0, error_bound: 0.0 });
        }
        let hn = naive_height(&next);
        worst = worst.max((hn - 4.0 * h).abs());
        q = next;
        h = hn;
        steps += 1;
        let digits = q.x().map(|x| x.denom().significant_bits() as f64 * std::f64::consts::LOG10_2).unwrap_or(0.0);
        if digits as u64 > max_digits {
            break;
        }
    }
    let scale = 4f64.powi(steps);
    Ok(HeightValue { value: h / scale, error_bound: worst / (3.0 * scale) })
}

/// `<P, Q> = (h(P + Q) - h(P) - h(Q)) / 2`.
pub fn height_pairing(curve: &WeierstrassCurve, p: &CurvePoint, q: &CurvePoint) -> Result<f64> {
    let s = curve.add(p, q)?;
    Ok((canonical_height(curve, &s)?.value - canonical_height(curve, p)?.value - canonical_height(curve, q)?.value) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e37() -> WeierstrassCurve {
        WeierstrassCurve::from_ints([0, 0, 1, -1, 0]).unwrap()
    }

    #[test]
    fn e37_generator() {
        let h = canonical_height(&e37(), &CurvePoint::affine(0, 0)).unwrap();
        assert!((h.value - 0.051111408239968840235886).abs() < 1e-15, "{}", h.value);
    }

    #[test]
    fn identity_and_torsion() {
        assert_eq!(canonical_height(&e37(), &CurvePoint::Infinity).unwrap().value, 0.0);
        let e11 = WeierstrassCurve::from_ints([0, -1, 1, -10, -20]).unwrap();
        let h = canonical_height(&e11, &CurvePoint::affine(5, 5)).unwrap();
        assert!(h.value.abs() < 1e-10);
        assert_eq!(canonical_height(&e37(), &CurvePoint::affine(1, 1)).unwrap_err(), Error::PointNotOnCurve);
    }

    #[test]
    fn doubling_converges() {
        let d = height_by_doubling(&e37(), &CurvePoint::affine(0, 0), 10, 100_000).unwrap();
        assert!((d.value - 0.0511114082399688).abs() <= d.error_bound.max(1e-9));
        assert!(d.error_bound < 1e-5);
    }
}
