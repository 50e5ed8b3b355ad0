//! Weil–Deligne representations `(phi, N)` at a prime, with the inertia
//! action recorded only through its invariant subspace.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::linalg::{poly, QMatrix, Subspace};
use crate::arith::is_prime_u64;
use crate::local::{LocalData, Reduction};
use crate::lseries::{local_euler_factor, EulerFactor};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilDeligneRep {
    pub p: u64,
    pub phi: QMatrix,
    pub n: QMatrix,
    /// `V^I`.
    pub inertia: Subspace,
}

/// JSON form: matrices as rows of rational strings; `inertia` lists
/// spanning vectors and defaults to the whole space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeilDeligneJson {
    pub p: u64,
    pub phi: QMatrix,
    #[serde(default)]
    pub n: Option<QMatrix>,
    #[serde(default)]
    pub inertia: Option<Vec<Vec<String>>>,
}

/// `1 / (c_0 + c_1 T + ... )` with `T = p^{-s}`; `denominator[0] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalFactor {
    pub p: u64,
    #[serde(serialize_with = "ser_rationals")]
    pub denominator: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl LocalFactor {
    pub fn degree(&self) -> usize {
        poly::degree(&self.denominator)
    }

    /// `L(s) = 1 / P(p^{-s})` for real `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let t = (self.p as f64).powf(-s);
        let d: f64 = self.denominator.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64());
        1.0 / d
    }

    /// Whether the denominator has integer coefficients equal to `f`.
    pub fn matches(&self, f: &EulerFactor) -> bool {
        let mut mine: Vec<Rational> = self.denominator.clone();
        mine.resize(3, Rational::new());
        self.p == f.p && mine.len() == 3 && mine.iter().zip(f.coeffs.iter()).all(|(a, &b)| *a == b)
    }
}

impl WeilDeligneRep {
    pub fn new(p: u64, phi: QMatrix, n: QMatrix, inertia: Option<Subspace>) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        let d = phi.rows();
        if !phi.is_square() || n.rows() != d || !n.is_square() {
            return Err(Error::InvalidInput("phi and N must be square of the same size".into()));
        }
        if phi.determinant() == 0 {
            return Err(Error::InvalidInput("phi is not invertible".into()));
        }
        if !n.pow(d as u32).is_zero() {
            return Err(Error::NotNilpotent);
        }
        let inertia = inertia.unwrap_or_else(|| Subspace::full(d));
        if inertia.ambient() != d {
            return Err(Error::InvalidInput("inertia subspace has the wrong ambient dimension".into()));
        }
        if !inertia.image(&n).is_subspace_of(&inertia) || inertia.image(&phi) != inertia {
            return Err(Error::InvalidInput("V^I must be stable under N and phi".into()));
        }
        Ok(WeilDeligneRep { p, phi, n, inertia })
    }

    pub fn unramified(p: u64, phi: QMatrix) -> Result<Self> {
        let d = phi.rows();
        Self::new(p, phi, QMatrix::zeros(d, d), None)
    }

    pub fn from_json(j: &WeilDeligneJson) -> Result<Self> {
        let d = j.phi.rows();
        let n = j.n.clone().unwrap_or_else(|| QMatrix::zeros(d, d));
        let inertia = match &j.inertia {
            None => None,
            Some(vs) => {
                let vecs = vs
                    .iter()
                    .map(|v| v.iter().map(|x| crate::arith::parse_rational(x)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                if vecs.iter().any(|v| v.len() != d) {
                    return Err(Error::InvalidInput("inertia vector of the wrong length".into()));
                }
                Some(Subspace::span(d, &vecs))
            }
        };
        Self::new(j.p, j.phi.clone(), n, inertia)
    }

    pub fn dim(&self) -> usize {
        self.phi.rows()
    }

    pub fn is_unramified(&self) -> bool {
        self.n.is_zero() && self.inertia.dim() == self.dim()
    }

    /// `phi N phi^{-1} = N / p`, exactly.
    pub fn check_compatibility(&self) -> bool {
        let inv = self.phi.inverse().expect("phi invertible");
        let lhs = self.phi.mul(&self.n).mul(&inv);
        lhs == self.n.scale(&Rational::from((1, self.p)))
    }

    /// `det(1 - T phi | V^I cap ker N)`.
    pub fn local_factor(&self) -> Result<LocalFactor> {
        let w = self.inertia.intersect(&self.n.kernel_space());
        let restricted = self
            .phi
            .restrict(&w)
            .ok_or_else(|| Error::InvalidInput("phi does not preserve V^I ∩ ker N (compatibility fails)".into()))?;
        // det(1 - T A) is the reversed characteristic polynomial
        let mut cp = restricted.char_poly();
        cp.reverse();
        Ok(LocalFactor { p: self.p, denominator: cp })
    }

    /// `WD(M(k))`: `phi` scaled by `p^{-k}`, so factors shift `s -> s + k`.
    pub fn tate_twist(&self, k: i32) -> Self {
        let pk = Rational::from(Integer::from(self.p).pow(k.unsigned_abs()));
        let c = if k >= 0 { pk.recip() } else { pk };
        WeilDeligneRep { phi: self.phi.scale(&c), ..self.clone() }
    }

    /// Replaces `phi` by the semisimple part of its Jordan decomposition.
    pub fn frobenius_semisimplify(&self) -> Self {
        WeilDeligneRep { phi: semisimple_part(&self.phi), ..self.clone() }
    }
}

/// Semisimple part of `a`, by Newton's iteration on the squarefree part of
/// the characteristic polynomial; exact over the rationals.
pub fn semisimple_part(a: &QMatrix) -> QMatrix {
    let f = a.char_poly();
    let g = poly::divmod(&f, &poly::gcd(&f, &poly::derivative(&f))).0;
    let dg = poly::derivative(&g);
    let mut s = a.clone();
    for _ in 0..64 {
        let gs = s.poly_eval(&g);
        if gs.is_zero() {
            break;
        }
        let inv = s.poly_eval(&dg).inverse().expect("g' is invertible on the semisimple part");
        s = s.sub(&gs.mul(&inv));
    }
    s
}

/// The Weil–Deligne encoding of `H^1` of an elliptic curve at `p`:
/// unramified with `X^2 - a_p X + p` at good primes, a Steinberg block twisted
/// by the unramified sign at multiplicative primes, and trivial inertia
/// invariants at additive primes.
pub fn wd_from_local_data(d: &LocalData) -> Result<WeilDeligneRep> {
    let p = d.p;
    let pr = Rational::from(p);
    match d.reduction {
        Reduction::Good => {
            // companion matrix of X^2 - a_p X + p
            let phi = QMatrix::from_rows(vec![
                vec![Rational::new(), -pr.clone()],
                vec![Rational::from(1), Rational::from(d.a_p)],
            ])?;
            WeilDeligneRep::unramified(p, phi)
        }
        Reduction::SplitMultiplicative | Reduction::NonsplitMultiplicative => {
            let e = Rational::from(d.a_p);
            let phi = QMatrix::diagonal(&[e.clone(), e * &pr]);
            let n = QMatrix::from_ints(&[[0, 1], [0, 0]]);
            WeilDeligneRep::new(p, phi, n, None)
        }
        Reduction::Additive => {
            WeilDeligneRep::new(p, QMatrix::identity(2), QMatrix::zeros(2, 2), Some(Subspace::zero(2)))
        }
    }
}

/// Whether the WD factor at `d.p` reproduces the Euler factor.
pub fn matches_euler_factor(d: &LocalData) -> Result<bool> {
    let wd = wd_from_local_data(d)?;
    Ok(wd.check_compatibility() && wd.local_factor()?.matches(&local_euler_factor(d)))
}
