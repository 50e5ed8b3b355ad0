//! Hodge numbers with the real-structure split of the middle slot, and the
//! archimedean gamma factor they determine.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::analytic::mpc::{gamma, Complex};
use crate::{Error, Result};

/// Bits used when evaluating gamma factors.
const PREC: u32 = 128;

/// Hodge numbers `h^{pq}` of a pure weight-`n` structure. For even `n` the
/// `(n/2, n/2)` slot is split by the eigenvalue of `F_oo`: `finf_plus` is the
/// dimension where `F_oo = +1`, `finf_minus` where `F_oo = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeData {
    pub weight: i32,
    /// `(p, q, h^{pq})`; zero entries may be omitted.
    pub hodge: Vec<(i32, i32, u32)>,
    #[serde(default)]
    pub finf_plus: u32,
    #[serde(default)]
    pub finf_minus: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GammaKind {
    R,
    C,
}

/// `Gamma_kind(s - shift)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GammaTerm {
    pub kind: GammaKind,
    pub shift: i32,
    pub exponent: u32,
}

impl fmt::Display for GammaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            GammaKind::R => "R",
            GammaKind::C => "C",
        };
        let arg = match self.shift {
            0 => "s".to_string(),
            s if s > 0 => format!("s - {s}"),
            s => format!("s + {}", -s),
        };
        write!(f, "Γ_{k}({arg})")?;
        if self.exponent != 1 {
            write!(f, "^{}", self.exponent)?;
        }
        Ok(())
    }
}

impl HodgeData {
    pub fn new(weight: i32, hodge: Vec<(i32, i32, u32)>, finf_plus: u32, finf_minus: u32) -> Result<Self> {
        let h = HodgeData { weight, hodge, finf_plus, finf_minus };
        h.validate()?;
        Ok(h.normalized())
    }

    /// The trivial structure `Q`: weight 0, `F_oo = 1`.
    pub fn trivial() -> Self {
        HodgeData { weight: 0, hodge: vec![(0, 0, 1)], finf_plus: 1, finf_minus: 0 }
    }

    /// `H^1` of an elliptic curve.
    pub fn elliptic_h1() -> Self {
        HodgeData { weight: 1, hodge: vec![(0, 1, 1), (1, 0, 1)], finf_plus: 0, finf_minus: 0 }
    }

    pub fn numbers(&self) -> BTreeMap<(i32, i32), u32> {
        let mut m = BTreeMap::new();
        for &(p, q, h) in &self.hodge {
            if h > 0 {
                *m.entry((p, q)).or_insert(0) += h;
            }
        }
        m
    }

    pub fn h(&self, p: i32, q: i32) -> u32 {
        self.numbers().get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn dimension(&self) -> u32 {
        self.numbers().values().sum()
    }

    fn normalized(&self) -> Self {
        HodgeData {
            hodge: self.numbers().into_iter().map(|((p, q), h)| (p, q, h)).collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nums = self.numbers();
        for (&(p, q), &h) in &nums {
            if p + q != self.weight {
                return Err(Error::InvalidInput(format!("Hodge type ({p},{q}) does not have weight {}", self.weight)));
            }
            if nums.get(&(q, p)).copied().unwrap_or(0) != h {
                return Err(Error::InvalidInput(format!("h^({p},{q}) != h^({q},{p})")));
            }
        }
        let middle = if self.weight % 2 == 0 { self.h(self.weight / 2, self.weight / 2) } else { 0 };
        if self.finf_plus + self.finf_minus != middle {
            return Err(Error::InvalidInput(format!(
                "F_oo split {} + {} does not match the middle Hodge number {middle}",
                self.finf_plus, self.finf_minus
            )));
        }
        Ok(())
    }

    /// `M(k)`: types shift by `(-k, -k)` and `F_oo` picks up `(-1)^k`.
    pub fn tate_twist(&self, k: i32) -> Self {
        let (plus, minus) = if k.rem_euclid(2) == 0 {
            (self.finf_plus, self.finf_minus)
        } else {
            (self.finf_minus, self.finf_plus)
        };
        HodgeData {
            weight: self.weight - 2 * k,
            hodge: self.hodge.iter().map(|&(p, q, h)| (p - k, q - k, h)).collect(),
            finf_plus: plus,
            finf_minus: minus,
        }
    }

    /// Dimensions of the middle slot where `(-1)^{n/2} F_oo` is `+1` and `-1`.
    pub fn middle_split(&self) -> (u32, u32) {
        if (self.weight / 2) % 2 == 0 {
            (self.finf_plus, self.finf_minus)
        } else {
            (self.finf_minus, self.finf_plus)
        }
    }

    /// The archimedean factor as a product of `Gamma_R` / `Gamma_C` terms.
    pub fn gamma_terms(&self) -> Vec<GammaTerm> {
        let mut out = Vec::new();
        for ((p, q), h) in self.numbers() {
            if p < q {
                out.push(GammaTerm { kind: GammaKind::C, shift: p, exponent: h });
            }
        }
        if self.weight % 2 == 0 {
            let m = self.weight / 2;
            let (plus, minus) = self.middle_split();
            if plus > 0 {
                out.push(GammaTerm { kind: GammaKind::R, shift: m, exponent: plus });
            }
            if minus > 0 {
                out.push(GammaTerm { kind: GammaKind::R, shift: m - 1, exponent: minus });
            }
        }
        out.sort();
        out
    }

    pub fn gamma_factor(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for t in self.gamma_terms() {
            let z = s - t.shift as f64;
            let g = match t.kind {
                GammaKind::R => gamma_r(z)?,
                GammaKind::C => gamma_c(z)?,
            };
            acc *= g.powu(t.exponent);
        }
        Ok(acc)
    }
}

/// `pi^{-s/2} Gamma(s/2)`.
pub fn gamma_r(s: Complex64) -> Result<Complex64> {
    let z = Complex::from_c64(PREC, s);
    let half = z.scale(&Float::with_val(PREC, 0.5));
    let pi = Float::with_val(PREC, Constant::Pi);
    let v = half.neg().pow_base(&pi).mul(&gamma(&half)?);
    Ok(v.to_c64())
}

/// `2 (2 pi)^{-s} Gamma(s)`.
pub fn gamma_c(s: Complex64) -> Result<Complex64> {
    let z = Complex::from_c64(PREC, s);
    let two_pi = Float::with_val(PREC, Constant::Pi) * 2u32;
    let v = z.neg().pow_base(&two_pi).mul(&gamma(&z)?).scale(&Float::with_val(PREC, 2));
    Ok(v.to_c64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_recipes() {
        assert_eq!(HodgeData::trivial().gamma_terms(), vec![GammaTerm { kind: GammaKind::R, shift: 0, exponent: 1 }]);
        assert_eq!(HodgeData::elliptic_h1().gamma_terms(), vec![GammaTerm { kind: GammaKind::C, shift: 0, exponent: 1 }]);
        let q_minus_1 = HodgeData::trivial().tate_twist(-1);
        assert_eq!(q_minus_1.weight, 2);
        assert_eq!(q_minus_1.h(1, 1), 1);
        assert_eq!((q_minus_1.finf_plus, q_minus_1.finf_minus), (0, 1));
        assert_eq!(q_minus_1.gamma_terms(), vec![GammaTerm { kind: GammaKind::R, shift: 1, exponent: 1 }]);
        assert_eq!(q_minus_1.gamma_terms()[0].to_string(), "Γ_R(s - 1)");
    }

    #[test]
    fn validation() {
        assert!(HodgeData::new(1, vec![(0, 1, 1)], 0, 0).is_err());
        assert!(HodgeData::new(2, vec![(0, 1, 1), (1, 0, 1)], 0, 0).is_err());
        assert!(HodgeData::new(2, vec![(1, 1, 2)], 1, 0).is_err());
        assert!(HodgeData::new(2, vec![(1, 1, 2), (0, 2, 1), (2, 0, 1)], 1, 1).is_ok());
    }

    #[test]
    fn gamma_values() {
        // Gamma_R(1) = 1, Gamma_R(2) = 1/pi, Gamma_C(1) = 1/pi
        let one = Complex64::new(1.0, 0.0);
        assert!((gamma_r(one).unwrap() - one).norm() < 1e-15);
        let pi = std::f64::consts::PI;
        assert!((gamma_r(Complex64::new(2.0, 0.0)).unwrap().re - 1.0 / pi).abs() < 1e-15);
        assert!((gamma_c(one).unwrap().re - 1.0 / pi).abs() < 1e-15);
    }
}
