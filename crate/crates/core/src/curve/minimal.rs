//! Global minimal models (Laska–Kraus–Connell).
//!
//! The input is first scaled to an integral model. For every prime `p` with
//! `p^12 | Δ` the largest admissible `p^e` dividing `(c4, c6)` with weights
//! `(4, 6)` is removed, subject to Kraus' conditions at 2 and 3. The minimal
//! pair `(c4, c6)` is then realised by the reduced model with
//! `a1, a3 ∈ {0, 1}` and `a2 ∈ {-1, 0, 1}`.

use rug::ops::{Pow, RemRounding};
use rug::{Integer, Rational};

use super::{IsomorphismData, WeierstrassCurve};
use crate::arith::{factor, valuation};
use crate::{Error, Result};

/// Kraus' integrality conditions for a pair `(c4, c6)`.
fn kraus_ok(c4: &Integer, c6: &Integer) -> bool {
    // at 3
    if *c6 != 0 && valuation(c6, &Integer::from(3)) == 2 {
        return false;
    }
    // at 2
    let c6_mod4 = Integer::from(c6.mod_u(4));
    if c6_mod4 == 3 {
        return true;
    }
    let v2_c4 = if *c4 == 0 { u32::MAX } else { valuation(c4, &Integer::from(2)) };
    let c6_mod32 = c6.mod_u(32);
    v2_c4 >= 4 && (c6_mod32 == 0 || c6_mod32 == 8)
}

/// The reduced integral model with invariants `(c4, c6)`.
fn model_from_c4c6(c4: &Integer, c6: &Integer) -> Result<[Integer; 5]> {
    let mut b2 = Integer::from(-c6).rem_euc(Integer::from(12));
    if b2 > 6 {
        b2 -= 12;
    }
    let b4_num = Integer::from(&b2 * &b2) - c4;
    if !b4_num.is_divisible_u(24) {
        return Err(Error::InvalidInput("Kraus reconstruction failed (b4)".into()));
    }
    let b4 = b4_num / 24u32;
    let b6_num = -Integer::from(&b2 * &b2) * &b2 + Integer::from(&b2 * &b4) * 36u32 - c6;
    if !b6_num.is_divisible_u(216) {
        return Err(Error::InvalidInput("Kraus reconstruction failed (b6)".into()));
    }
    let b6 = b6_num / 216u32;
    let a1 = Integer::from(b2.mod_u(2));
    let a3 = Integer::from(b6.mod_u(2));
    let a2 = Integer::from(&b2 - &a1) / 4u32;
    let a4 = Integer::from(&b4 - Integer::from(&a1 * &a3)) / 2u32;
    let a6 = Integer::from(&b6 - &a3) / 4u32;
    Ok([a1, a2, a3, a4, a6])
}

fn to_int(r: Rational) -> Integer {
    debug_assert_eq!(*r.denom(), 1);
    r.into_numer_denom().0
}

/// Returns the reduced global minimal model together with the coordinate
/// change taking `curve` to it.
pub fn minimal_model(curve: &WeierstrassCurve) -> Result<(WeierstrassCurve, IsomorphismData)> {
    // Scale to an integral model with u = 1/d.
    let mut d = Integer::from(1);
    for c in curve.coefficients() {
        d.lcm_mut(c.denom());
    }
    let to_integral = IsomorphismData::scaling(Rational::from((1, d.clone())));
    let integral = if d == 1 { curve.clone() } else { curve.transform(&to_integral) };
    debug_assert!(integral.is_integral());

    let c4 = to_int(integral.c4());
    let c6 = to_int(integral.c6());
    let disc = to_int(integral.discriminant());
    if disc == 0 {
        return Err(Error::SingularCurve);
    }

    let g = match (c4 == 0, c6 == 0) {
        (true, _) => c6.clone(),
        (_, true) => c4.clone(),
        _ => Integer::from(c4.gcd_ref(&c6)),
    };
    let mut u = Integer::from(1);
    for (p, _) in factor(&g) {
        let vd = valuation(&disc, &p);
        if vd < 12 {
            continue;
        }
        let v4 = if c4 == 0 { u32::MAX } else { valuation(&c4, &p) };
        let v6 = if c6 == 0 { u32::MAX } else { valuation(&c6, &p) };
        let mut e = (v4 / 4).min(v6 / 6).min(vd / 12);
        if p == 2 || p == 3 {
            while e > 0 {
                let pe = Integer::from((&p).pow(e));
                let c4s = Integer::from(&c4 / Integer::from((&pe).pow(4)));
                let c6s = Integer::from(&c6 / Integer::from((&pe).pow(6)));
                // Kraus' conditions only involve the primes 2 and 3, so the
                // scaling at the other prime is irrelevant here.
                if kraus_ok(&c4s, &c6s) {
                    break;
                }
                e -= 1;
            }
        }
        u *= Integer::from((&p).pow(e));
    }

    let c4m = Integer::from(&c4 / Integer::from((&u).pow(4)));
    let c6m = Integer::from(&c6 / Integer::from((&u).pow(6)));
    let target = model_from_c4c6(&c4m, &c6m)?;
    let [a1, a2, a3, ..] = integral.coefficients().clone();
    let uq = Rational::from(u.clone());
    let s = (Rational::from(&uq * &target[0]) - &a1) / 2u32;
    let r = (Rational::from(&uq * &uq) * &target[1] - &a2 + Rational::from(&s * &a1)
        + Rational::from(&s * &s))
        / 3u32;
    let t = (Rational::from(&uq * &uq) * &uq * &target[2] - &a3 - Rational::from(&r * &a1)) / 2u32;
    let iso = IsomorphismData { u: uq, r, s, t };
    let minimal = integral.transform(&iso);
    let expected = WeierstrassCurve::new(target.map(Rational::from))?;
    if minimal != expected {
        return Err(Error::InvalidInput(format!(
            "minimal model reconstruction mismatch: {minimal} vs {expected}"
        )));
    }
    Ok((minimal, to_integral.compose(&iso)))
}
