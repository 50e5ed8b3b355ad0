use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::WeierstrassCurve;
use crate::arith::parse_rational;
use crate::{Error, Result};

/// A rational point: the point at infinity or an affine pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine(Rational, Rational),
}

impl CurvePoint {
    pub fn affine(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        CurvePoint::Affine(x.into(), y.into())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, _) => Some(x),
        }
    }

    /// Parses `"x,y"` with exact rational coordinates, or `"O"` / `"inf"`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("o") || t.eq_ignore_ascii_case("inf") {
            return Ok(CurvePoint::Infinity);
        }
        let (x, y) = t
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected \"x,y\", got {t:?}")))?;
        Ok(CurvePoint::Affine(parse_rational(x)?, parse_rational(y)?))
    }
}

impl Ord for CurvePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => Ordering::Equal,
            (CurvePoint::Infinity, _) => Ordering::Less,
            (_, CurvePoint::Infinity) => Ordering::Greater,
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => {
                x1.cmp(x2).then_with(|| y1.cmp(y2))
            }
        }
    }
}

impl PartialOrd for CurvePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine(x, y) => write!(f, "({x},{y})"),
        }
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Infinity => ser.serialize_str("O"),
            CurvePoint::Affine(x, y) => ser.serialize_str(&format!("{x},{y}")),
        }
    }
}

impl<'de> Deserialize<'de> for CurvePoint {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        CurvePoint::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl WeierstrassCurve {
    fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        Ok(self.neg_unchecked(p))
    }

    pub(crate) fn neg_unchecked(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => {
                let ny = -Rational::from(y + Rational::from(self.a1() * x)) - self.a3();
                CurvePoint::Affine(x.clone(), ny)
            }
        }
    }

    /// Chord–tangent addition.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let [a1, a2, a3, a4, a6] = self.coefficients();
        let (lambda, nu) = if x1 == x2 {
            let denom = Rational::from(2 * y1) + Rational::from(a1 * x2) + a3;
            if Rational::from(y1 + y2) + Rational::from(a1 * x2) + a3 == 0 {
                return CurvePoint::Infinity;
            }
            let x1sq = Rational::from(x1 * x1);
            let lam = (Rational::from(3 * &x1sq) + Rational::from(2 * a2) * x1 + a4
                - Rational::from(a1 * y1))
                / &denom;
            let nu = (-Rational::from(&x1sq * x1) + Rational::from(a4 * x1) + Rational::from(2 * a6)
                - Rational::from(a3 * y1))
                / &denom;
            (lam, nu)
        } else {
            let dx = Rational::from(x2 - x1);
            let lam = Rational::from(y2 - y1) / &dx;
            let nu = (Rational::from(y1 * x2) - Rational::from(y2 * x1)) / &dx;
            (lam, nu)
        };
        let x3 = Rational::from(&lambda * &lambda) + Rational::from(a1 * &lambda) - a2 - x1 - x2;
        let y3 = -Rational::from(&lambda + a1) * &x3 - nu - a3;
        CurvePoint::Affine(x3, y3)
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        let nq = self.neg(q)?;
        self.add(p, &nq)
    }

    /// `n * p` by double-and-add; negative `n` multiplies `-p`.
    pub fn mul_scalar(&self, p: &CurvePoint, n: i64) -> Result<CurvePoint> {
        self.check(p)?;
        Ok(self.mul_unchecked(p, n))
    }

    pub(crate) fn mul_unchecked(&self, p: &CurvePoint, n: i64) -> CurvePoint {
        let mut base = if n < 0 { self.neg_unchecked(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    /// The order of `p` if it is at most `limit`, else `None`.
    pub fn order_up_to(&self, p: &CurvePoint, limit: u32) -> Result<Option<u32>> {
        self.check(p)?;
        let mut q = p.clone();
        for n in 1..=limit {
            if q.is_infinity() {
                return Ok(Some(n));
            }
            q = self.add_unchecked(&q, p);
        }
        Ok(None)
    }
}

/// `y` values (possibly two) with `(x, y)` on the curve.
pub(crate) fn points_with_x(curve: &WeierstrassCurve, x: &Rational) -> Vec<CurvePoint> {
    let [a1, a2, a3, a4, a6] = curve.coefficients();
    let h = Rational::from(a1 * x) + a3;
    let x2 = Rational::from(x * x);
    let g = Rational::from(&x2 * x) + Rational::from(a2 * &x2) + Rational::from(a4 * x) + a6;
    // y^2 + h y - g = 0  =>  (2y + h)^2 = h^2 + 4g
    let disc = Rational::from(&h * &h) + g * 4u32;
    if disc < 0 {
        return Vec::new();
    }
    let (num, den) = disc.into_numer_denom();
    if !num.is_perfect_square() || !den.is_perfect_square() {
        return Vec::new();
    }
    let root = Rational::from((num.sqrt(), den.sqrt()));
    let y1 = (Rational::from(&root - &h)) / 2u32;
    if root == 0 {
        return vec![CurvePoint::Affine(x.clone(), y1)];
    }
    let y2 = (-root - h) / 2u32;
    vec![CurvePoint::Affine(x.clone(), y1), CurvePoint::Affine(x.clone(), y2)]
}

/// All rational points whose x-coordinate `a/b` (lowest terms) has
/// `max(|a|, b) <= height_bound`, plus the point at infinity, sorted.
///
/// Only square denominators can occur for points on an integral model, but
/// the search does not assume integrality and tries every denominator.
pub fn point_search(curve: &WeierstrassCurve, height_bound: u64) -> Vec<CurvePoint> {
    let mut found = BTreeSet::new();
    found.insert(CurvePoint::Infinity);
    let bound = height_bound as i64;
    for den in 1..=bound {
        let d = Integer::from(den);
        for num in -bound..=bound {
            if Integer::from(num).gcd(&d) != 1 {
                continue;
            }
            let x = Rational::from((num, den));
            for p in points_with_x(curve, &x) {
                found.insert(p);
            }
        }
    }
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e37() -> WeierstrassCurve {
        WeierstrassCurve::from_ints([0, 0, 1, -1, 0]).unwrap()
    }

    #[test]
    fn chord_through_three_roots() {
        let e = e37();
        let s = e.add(&CurvePoint::affine(0, 0), &CurvePoint::affine(1, 0)).unwrap();
        assert_eq!(s, CurvePoint::affine(-1, -1));
    }

    #[test]
    fn identity_and_inverse() {
        let e = e37();
        let p = CurvePoint::affine(2, 2);
        assert_eq!(e.add(&p, &CurvePoint::Infinity).unwrap(), p);
        let np = e.neg(&p).unwrap();
        assert_eq!(np, CurvePoint::affine(2, -3));
        assert_eq!(e.add(&p, &np).unwrap(), CurvePoint::Infinity);
        assert_eq!(e.mul_scalar(&p, 0).unwrap(), CurvePoint::Infinity);
        assert_eq!(e.mul_scalar(&p, -1).unwrap(), np);
    }

    #[test]
    fn rejects_points_off_curve() {
        let e = e37();
        assert_eq!(e.add(&CurvePoint::affine(1, 1), &CurvePoint::Infinity), Err(Error::PointNotOnCurve));
    }

    #[test]
    fn multiples_of_generator() {
        // Multiples of (0,0) on 37a: x(5P) = 1/4, x(7P) = -5/9.
        let e = e37();
        let p = CurvePoint::affine(0, 0);
        assert_eq!(e.mul_scalar(&p, 5).unwrap().x().unwrap(), &Rational::from((1, 4)));
        assert_eq!(e.mul_scalar(&p, 7).unwrap().x().unwrap(), &Rational::from((-5, 9)));
        let sum = (1..=6).fold(CurvePoint::Infinity, |acc, _| e.add(&acc, &p).unwrap());
        assert_eq!(sum, e.mul_scalar(&p, 6).unwrap());
    }

    #[test]
    fn search_e37() {
        let e = e37();
        let pts = point_search(&e, 3);
        for (x, y) in [(0, 0), (1, 0), (-1, 0), (2, 2)] {
            assert!(pts.contains(&CurvePoint::affine(x, y)), "missing ({x},{y})");
        }
        assert!(pts.iter().all(|p| e.contains(p)));
        assert_eq!(point_search(&e, 0), vec![CurvePoint::Infinity]);
        let e11 = WeierstrassCurve::from_ints([0, -1, 1, -10, -20]).unwrap();
        assert!(point_search(&e11, 6).contains(&CurvePoint::affine(5, 5)));
    }

    #[test]
    fn parse_points() {
        assert_eq!(CurvePoint::parse("0,0").unwrap(), CurvePoint::affine(0, 0));
        assert_eq!(
            CurvePoint::parse("1/4,-5/8").unwrap(),
            CurvePoint::Affine(Rational::from((1, 4)), Rational::from((-5, 8)))
        );
        assert_eq!(CurvePoint::parse("O").unwrap(), CurvePoint::Infinity);
        assert!(CurvePoint::parse("3").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn group_law_axioms(i in -4i64..5, j in -4i64..5, k in -4i64..5) {
            // Small multiples of the two generators of a rank-2 curve (389a1).
            let e = WeierstrassCurve::from_ints([0, 1, 1, -2, 0]).unwrap();
            let g1 = CurvePoint::affine(-1, 1);
            let g2 = CurvePoint::affine(0, 0);
            let p = e.add(&e.mul_scalar(&g1, i).unwrap(), &e.mul_scalar(&g2, j).unwrap()).unwrap();
            let q = e.add(&e.mul_scalar(&g1, j).unwrap(), &e.mul_scalar(&g2, k).unwrap()).unwrap();
            let r = e.mul_scalar(&g1, k).unwrap();
            prop_assert!(e.contains(&p) && e.contains(&q));
            let lhs = e.add(&e.add(&p, &q).unwrap(), &r).unwrap();
            let rhs = e.add(&p, &e.add(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(e.add(&p, &q).unwrap(), e.add(&q, &p).unwrap());
            prop_assert_eq!(e.add(&p, &CurvePoint::Infinity).unwrap(), p);
        }
    }
}
