//! Exact Weierstrass models over Q.
//!
//! Conventions follow Silverman: `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
//! with the usual b- and c-invariants, and coordinate changes
//! `x = u^2 x' + r`, `y = u^3 y' + u^2 s x' + t`.

mod minimal;
mod point;
mod torsion;

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::parse_rational;
use crate::{Error, Result};

pub use minimal::minimal_model;
pub use point::{point_search, CurvePoint};
pub use torsion::{torsion_subgroup, TorsionGroup};

/// A nonsingular Weierstrass model with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    a: [Rational; 5],
}

/// The b-, c-invariants, discriminant and j-invariant of a model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub b2: Rational,
    pub b4: Rational,
    pub b6: Rational,
    pub b8: Rational,
    pub c4: Rational,
    pub c6: Rational,
    pub discriminant: Rational,
    pub j: Rational,
}

fn b_invariants(a: &[Rational; 5]) -> [Rational; 4] {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = Rational::from(a1 * a1) + Rational::from(4 * a2);
    let b4 = Rational::from(2 * a4) + Rational::from(a1 * a3);
    let b6 = Rational::from(a3 * a3) + Rational::from(4 * a6);
    let b8 = Rational::from(a1 * a1) * a6 + Rational::from(4 * a2) * a6
        - Rational::from(a1 * a3) * a4
        + Rational::from(a3 * a3) * a2
        - Rational::from(a4 * a4);
    [b2, b4, b6, b8]
}

fn discriminant_of(b: &[Rational; 4]) -> Rational {
    let [b2, b4, b6, b8] = b;
    -Rational::from(b2 * b2) * b8 - Rational::from(b4 * b4) * b4 * 8u32
        - Rational::from(b6 * b6) * 27u32
        + Rational::from(b2 * b4) * b6 * 9u32
}

impl WeierstrassCurve {
    /// Builds a curve, rejecting singular coefficient sets.
    pub fn new(a: [Rational; 5]) -> Result<Self> {
        if discriminant_of(&b_invariants(&a)) == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(Self { a })
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(Rational::from))
    }

    /// Parses five coefficients, either as whitespace/comma separated exact
    /// literals or as a JSON array of five strings (or integers).
    pub fn parse(input: &str) -> Result<Self> {
        let t = input.trim();
        let tokens: Vec<String> = if t.starts_with('[') {
            let v: serde_json::Value =
                serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Parse("expected a JSON array".into()))?;
            arr.iter()
                .map(|x| match x {
                    serde_json::Value::String(s) => Ok(s.clone()),
                    serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
                    other => Err(Error::Parse(format!("bad coefficient {other}"))),
                })
                .collect::<Result<_>>()?
        } else {
            t.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect()
        };
        Self::from_tokens(&tokens)
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        if tokens.len() != 5 {
            return Err(Error::Parse(format!(
                "expected five coefficients a1 a2 a3 a4 a6, got {}",
                tokens.len()
            )));
        }
        let mut a: [Rational; 5] = Default::default();
        for (slot, tok) in a.iter_mut().zip(tokens) {
            *slot = parse_rational(tok.as_ref())?;
        }
        Self::new(a)
    }

    pub fn coefficients(&self) -> &[Rational; 5] {
        &self.a
    }
    pub fn a1(&self) -> &Rational {
        &self.a[0]
    }
    pub fn a2(&self) -> &Rational {
        &self.a[1]
    }
    pub fn a3(&self) -> &Rational {
        &self.a[2]
    }
    pub fn a4(&self) -> &Rational {
        &self.a[3]
    }
    pub fn a6(&self) -> &Rational {
        &self.a[4]
    }

    pub fn b_invariants(&self) -> [Rational; 4] {
        b_invariants(&self.a)
    }

    pub fn c4(&self) -> Rational {
        let [b2, b4, ..] = self.b_invariants();
        Rational::from(&b2 * &b2) - b4 * 24u32
    }

    pub fn c6(&self) -> Rational {
        let [b2, b4, b6, _] = self.b_invariants();
        -Rational::from(&b2 * &b2) * &b2 + Rational::from(&b2 * &b4) * 36u32 - b6 * 216u32
    }

    pub fn discriminant(&self) -> Rational {
        discriminant_of(&self.b_invariants())
    }

    pub fn invariants(&self) -> InvariantSet {
        let [b2, b4, b6, b8] = self.b_invariants();
        let c4 = self.c4();
        let c6 = self.c6();
        let discriminant = self.discriminant();
        let j = Rational::from(&c4 * &c4) * &c4 / &discriminant;
        InvariantSet { b2, b4, b6, b8, c4, c6, discriminant, j }
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| *c.denom() == 1)
    }

    /// Integer coefficients; `None` if some coefficient is not integral.
    pub fn integer_coefficients(&self) -> Option<[Integer; 5]> {
        if !self.is_integral() {
            return None;
        }
        Some(self.a.clone().map(|c| c.into_numer_denom().0))
    }

    /// Applies a coordinate change, returning the transformed model.
    pub fn transform(&self, iso: &IsomorphismData) -> WeierstrassCurve {
        let [a1, a2, a3, a4, a6] = &self.a;
        let IsomorphismData { u, r, s, t } = iso;
        let u2 = Rational::from(u * u);
        let u3 = Rational::from(&u2 * u);
        let u4 = Rational::from(&u2 * &u2);
        let u6 = Rational::from(&u3 * &u3);
        let na1 = (Rational::from(a1 + Rational::from(2 * s))) / u;
        let na2 = (Rational::from(a2 - Rational::from(s * a1)) + Rational::from(3 * r)
            - Rational::from(s * s))
            / &u2;
        let na3 = (Rational::from(a3 + Rational::from(r * a1)) + Rational::from(2 * t)) / &u3;
        let na4 = (Rational::from(a4 - Rational::from(s * a3)) + Rational::from(2 * r) * a2
            - (Rational::from(t + Rational::from(r * s))) * a1
            + Rational::from(r * r) * 3u32
            - Rational::from(2 * s) * t)
            / &u4;
        let na6 = (Rational::from(a6 + Rational::from(r * a4))
            + Rational::from(r * r) * a2
            + Rational::from(r * r) * r
            - Rational::from(t * a3)
            - Rational::from(t * t)
            - Rational::from(r * t) * a1)
            / &u6;
        // Isomorphic to a nonsingular curve, hence nonsingular.
        WeierstrassCurve { a: [na1, na2, na3, na4, na6] }
    }

    /// Evaluates `lhs - rhs` of the Weierstrass equation at `(x, y)`.
    pub fn equation(&self, x: &Rational, y: &Rational) -> Rational {
        let [a1, a2, a3, a4, a6] = &self.a;
        let lhs = Rational::from(y * y) + Rational::from(a1 * x) * y + Rational::from(a3 * y);
        let x2 = Rational::from(x * x);
        let rhs = Rational::from(&x2 * x) + Rational::from(a2 * &x2) + Rational::from(a4 * x) + a6;
        lhs - rhs
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => self.equation(x, y) == 0,
        }
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.a.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for WeierstrassCurve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for WeierstrassCurve {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.a.iter().map(|c| c.to_string()).collect();
        v.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for WeierstrassCurve {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(de)?;
        WeierstrassCurve::from_tokens(&v).map_err(serde::de::Error::custom)
    }
}

/// A standard coordinate change `x = u^2 x' + r`, `y = u^3 y' + u^2 s x' + t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismData {
    pub u: Rational,
    pub r: Rational,
    pub s: Rational,
    pub t: Rational,
}

impl IsomorphismData {
    pub fn identity() -> Self {
        Self::new(1, 0, 0, 0)
    }

    pub fn new(
        u: impl Into<Rational>,
        r: impl Into<Rational>,
        s: impl Into<Rational>,
        t: impl Into<Rational>,
    ) -> Self {
        let u = u.into();
        assert!(u != 0, "u must be nonzero");
        Self { u, r: r.into(), s: s.into(), t: t.into() }
    }

    pub fn scaling(u: impl Into<Rational>) -> Self {
        Self::new(u, 0, 0, 0)
    }

    /// The change that undoes `self`.
    pub fn inverse(&self) -> Self {
        let Self { u, r, s, t } = self;
        let u2 = Rational::from(u * u);
        let u3 = Rational::from(&u2 * u);
        Self {
            u: Rational::from(u.recip_ref()),
            r: -Rational::from(r / &u2),
            s: -Rational::from(s / u),
            t: (Rational::from(r * s) - t) / u3,
        }
    }

    /// `self` followed by `then`: transforming by the result equals
    /// transforming by `self` and then by `then`.
    pub fn compose(&self, then: &Self) -> Self {
        let (u1, r1, s1, t1) = (&self.u, &self.r, &self.s, &self.t);
        let (u2, r2, s2, t2) = (&then.u, &then.r, &then.s, &then.t);
        let u1sq = Rational::from(u1 * u1);
        let u1cu = Rational::from(&u1sq * u1);
        Self {
            u: Rational::from(u1 * u2),
            r: Rational::from(&u1sq * r2) + r1,
            s: Rational::from(u1 * s2) + s1,
            t: Rational::from(&u1cu * t2) + Rational::from(&u1sq * r2) * s1 + t1,
        }
    }

    /// Maps a point on the source model to the target model.
    pub fn map_point(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => {
                let u2 = Rational::from(&self.u * &self.u);
                let u3 = Rational::from(&u2 * &self.u);
                let xr = Rational::from(x - &self.r);
                let nx = Rational::from(&xr / &u2);
                let ny = (Rational::from(y - Rational::from(&self.s * &xr)) - &self.t) / u3;
                CurvePoint::Affine(nx, ny)
            }
        }
    }
}

impl Serialize for IsomorphismData {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("IsomorphismData", 4)?;
        st.serialize_field("u", &self.u.to_string())?;
        st.serialize_field("r", &self.r.to_string())?;
        st.serialize_field("s", &self.s.to_string())?;
        st.serialize_field("t", &self.t.to_string())?;
        st.end()
    }
}
