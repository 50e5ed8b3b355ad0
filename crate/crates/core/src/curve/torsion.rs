//! Rational torsion by Nagell–Lutz enumeration.
//!
//! On the minimal model, `X = 36x + 3b2`, `Y = 108(2y + a1 x + a3)` gives the
//! integral short model `Y^2 = X^3 - 27c4 X - 54c6`. Torsion points there have
//! integer coordinates with `Y = 0` or `Y^2 | 4A^3 + 27B^2`. Each candidate is
//! mapped back and its order is verified by repeated addition, capped at 12.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use super::{minimal_model, CurvePoint, WeierstrassCurve};
use crate::arith::factor;
use crate::Result;

/// Mazur's bound on the order of a rational torsion point.
pub const MAX_TORSION_ORDER: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionGroup {
    /// Invariant factors, e.g. `[5]` or `[2, 4]`; empty for the trivial group.
    pub invariants: Vec<u32>,
    /// Generators with their orders, on the input model.
    pub generators: Vec<(CurvePoint, u32)>,
    /// Every torsion point, on the input model, sorted.
    pub points: Vec<CurvePoint>,
}

impl TorsionGroup {
    pub fn order(&self) -> u32 {
        self.points.len() as u32
    }
}

fn eval_cubic(x: &Integer, a: &Integer, c: &Integer) -> Integer {
    let x2 = Integer::from(x * x);
    Integer::from(&x2 * x) + Integer::from(a * x) + c
}

/// Integer root of a monotone cubic on `[lo, hi]`, if any.
fn root_in(lo: Integer, hi: Integer, increasing: bool, a: &Integer, c: &Integer) -> Option<Integer> {
    if lo > hi {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo <= hi {
        let mid = Integer::from(&lo + &hi) >> 1u32;
        let v = eval_cubic(&mid, a, c);
        if v == 0 {
            return Some(mid);
        }
        if (v < 0) == increasing {
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    None
}

/// All integer roots of `X^3 + aX + c`.
fn integer_roots(a: &Integer, c: &Integer) -> Vec<Integer> {
    let bound: Integer = Integer::from(a.abs_ref()).max(Integer::from(c.abs_ref())) + 1u32;
    let mut roots = Vec::new();
    if *a >= 0 {
        roots.extend(root_in(-bound.clone(), bound, true, a, c));
    } else {
        // critical points at ±s with s = sqrt(-a/3)
        let t = Integer::from(-a) / 3u32;
        let fs = t.clone().sqrt();
        let cs = if Integer::from(&fs * &fs) * 3u32 == Integer::from(-a) { fs.clone() } else { fs.clone() + 1 };
        roots.extend(root_in(-bound.clone(), -cs.clone(), true, a, c));
        roots.extend(root_in(-fs.clone(), fs.clone(), false, a, c));
        roots.extend(root_in(cs, bound, true, a, c));
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Nonnegative integers `y` with `y^2 | n` (n nonzero).
fn square_divisor_roots(n: &Integer) -> Vec<Integer> {
    let mut out = vec![Integer::from(1)];
    for (p, e) in factor(n) {
        let mut next = Vec::new();
        for d in &out {
            let mut pk = Integer::from(1);
            for _ in 0..=(e / 2) {
                next.push(Integer::from(d * &pk));
                pk *= &p;
            }
        }
        out = next;
    }
    out.push(Integer::from(0));
    out
}

pub fn torsion_subgroup(curve: &WeierstrassCurve) -> Result<TorsionGroup> {
    let (min, iso) = minimal_model(curve)?;
    let back = iso.inverse();
    let [b2, ..] = min.b_invariants();
    let c4 = min.c4().into_numer_denom().0;
    let c6 = min.c6().into_numer_denom().0;
    let a_short = Integer::from(-27) * &c4;
    let b_short = Integer::from(-54) * &c6;
    let disc_part = Integer::from(4) * Integer::from((&a_short).pow(3)) + Integer::from(27) * Integer::from((&b_short).pow(2));

    let mut points = vec![CurvePoint::Infinity];
    for yy in square_divisor_roots(&disc_part) {
        let c = Integer::from(&b_short - Integer::from(&yy * &yy));
        for xx in integer_roots(&a_short, &c) {
            let x = (Rational::from(xx) - Rational::from(&b2 * 3u32)) / 36u32;
            let w = Rational::from((yy.clone(), 108));
            let y_plus = (Rational::from(&w - Rational::from(min.a1() * &x)) - min.a3()) / 2u32;
            let y_minus = (-w - Rational::from(min.a1() * &x) - min.a3()) / 2u32;
            for y in [y_plus, y_minus] {
                let p = CurvePoint::Affine(x.clone(), y);
                if min.contains(&p)
                    && !points.contains(&p)
                    && min.order_up_to(&p, MAX_TORSION_ORDER)?.is_some()
                {
                    points.push(p);
                }
            }
        }
    }

    let n = points.len() as u32;
    let order_of = |p: &CurvePoint| min.order_up_to(p, MAX_TORSION_ORDER).ok().flatten().unwrap_or(0);
    let two_torsion: Vec<&CurvePoint> = points.iter().filter(|p| order_of(p) == 2).collect();
    let (invariants, generators_min) = if n == 1 {
        (Vec::new(), Vec::new())
    } else if two_torsion.len() == 3 {
        let m = n / 2;
        let p = points.iter().find(|p| order_of(p) == m).cloned().expect("element of order n/2");
        let half = min.mul_unchecked(&p, (m / 2) as i64);
        let q = two_torsion.into_iter().find(|q| **q != half).cloned().expect("second 2-torsion point");
        (vec![2, m], vec![(q, 2), (p, m)])
    } else {
        let p = points.iter().find(|p| order_of(p) == n).cloned().expect("cyclic generator");
        (vec![n], vec![(p, n)])
    };
    let mut mapped: Vec<CurvePoint> = points.iter().map(|p| back.map_point(p)).collect();
    mapped.sort();
    Ok(TorsionGroup {
        invariants,
        generators: generators_min.into_iter().map(|(p, k)| (back.map_point(&p), k)).collect(),
        points: mapped,
    })
}
