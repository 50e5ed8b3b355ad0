//! Local data at a prime: point counts, `a_p`, reduction type, Tate's
//! algorithm, and the global conductor.

pub mod bsgs;
pub mod field;
mod tate;

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_prime_u64, legendre, mul_mod, primes_up_to, residue, residue_q};
use crate::curve::{minimal_model, WeierstrassCurve};
use crate::{par, Error, Result};

use field::{FiniteField, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl Reduction {
    /// `a_p` at a bad prime; `None` at good primes.
    pub fn bad_ap(self) -> Option<i64> {
        match self {
            Reduction::Good => None,
            Reduction::SplitMultiplicative => Some(1),
            Reduction::NonsplitMultiplicative => Some(-1),
            Reduction::Additive => Some(0),
        }
    }
}

/// Kodaira symbol. `I(0)` is good reduction and `IStar(0)` is `I0*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Number of geometric components of the special fibre.
    pub fn components(self) -> u32 {
        match self {
            Kodaira::I(0) => 1,
            Kodaira::I(n) => n,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::IStar(m) => m + 5,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }

    /// PARI's integer encoding (`elllocalred`), handy for comparisons.
    pub fn pari_code(self) -> i32 {
        match self {
            Kodaira::I(0) => 1,
            Kodaira::I(n) => n as i32 + 4,
            Kodaira::II => 2,
            Kodaira::III => 3,
            Kodaira::IV => 4,
            Kodaira::IStar(0) => -1,
            Kodaira::IStar(m) => -(m as i32) - 4,
            Kodaira::IVStar => -4,
            Kodaira::IIIStar => -3,
            Kodaira::IIStar => -2,
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::IStar(m) => write!(f, "I{m}*"),
            Kodaira::IVStar => f.write_str("IV*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IIStar => f.write_str("II*"),
        }
    }
}

impl std::str::FromStr for Kodaira {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown Kodaira symbol {s:?}"));
        Ok(match s {
            "II" => Kodaira::II,
            "III" => Kodaira::III,
            "IV" => Kodaira::IV,
            "IV*" => Kodaira::IVStar,
            "III*" => Kodaira::IIIStar,
            "II*" => Kodaira::IIStar,
            _ => {
                let rest = s.strip_prefix('I').ok_or_else(bad)?;
                match rest.strip_suffix('*') {
                    Some(m) => Kodaira::IStar(m.parse().map_err(|_| bad())?),
                    None => Kodaira::I(rest.parse().map_err(|_| bad())?),
                }
            }
        })
    }
}

impl Serialize for Kodaira {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Kodaira {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything known about a curve at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    pub p: u64,
    pub reduction: Reduction,
    pub kodaira: Kodaira,
    pub a_p: i64,
    pub f_p: u32,
    pub c_p: u32,
    pub m_e: u32,
}

/// Tuning for point counting.
#[derive(Clone, Copy, Debug)]
pub struct CountConfig {
    /// Fields up to this size are enumerated; larger prime fields use
    /// baby-step giant-step.
    pub exhaustive_limit: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { exhaustive_limit: 1_000_000 }
    }
}

impl CountConfig {
    /// Setting for tables over many primes, where BSGS wins early.
    pub fn bulk() -> Self {
        CountConfig { exhaustive_limit: 4096 }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Coefficients `a1..a6` reduced mod `p`.
fn reduce_mod(curve: &WeierstrassCurve, p: u64) -> Result<[u64; 5]> {
    let mut out = [0u64; 5];
    for (slot, c) in out.iter_mut().zip(curve.coefficients()) {
        *slot = residue_q(c, p).ok_or_else(|| Error::NotIntegral(p.to_string()))?;
    }
    Ok(out)
}

/// Exhaustive count over `F_p` (odd `p`) with a table of squares.
fn count_prime_field(a: &[u64; 5], p: u64) -> u64 {
    if p == 2 {
        let mut n = 1;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a[0] * x * y + a[2] * y;
                let rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
                if (lhs + rhs) % 2 == 0 {
                    n += 1;
                }
            }
        }
        return n;
    }
    let [a1, a2, a3, a4, a6] = *a;
    let b2 = (mul_mod(a1, a1, p) + 4 * a2) % p;
    let b4 = (2 * a4 + mul_mod(a1, a3, p)) % p;
    let b6 = (mul_mod(a3, a3, p) + 4 * a6) % p;
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for y in 1..=p / 2 {
        chi[mul_mod(y, y, p) as usize] = 1;
    }
    // sum of chi(4x^3 + b2 x^2 + 2 b4 x + b6) in blocks
    const BLOCK: u64 = 1 << 14;
    let blocks = p.div_ceil(BLOCK) as usize;
    let partial = par::map_range(blocks, |blk| {
        let lo = blk as u64 * BLOCK;
        let hi = (lo + BLOCK).min(p);
        let mut s = 0i64;
        for x in lo..hi {
            let mut v = (4 * x + b2) % p;
            v = (mul_mod(v, x, p) + 2 * b4) % p;
            v = (mul_mod(v, x, p) + b6) % p;
            s += chi[v as usize] as i64;
        }
        s
    });
    (p as i64 + 1 + partial.into_iter().sum::<i64>()) as u64
}

/// Count over `F_{p^k}` using log tables; also valid for `k = 1`.
pub fn count_points_field(a: &[u64; 5], f: &FiniteField) -> u64 {
    let q = f.size();
    let c: Vec<_> = a.iter().map(|&v| f.from_int(v as i64)).collect();
    let (a1, a2, a3, a4, a6) = (c[0], c[1], c[2], c[3], c[4]);
    let mut total = q as i64 + 1;
    if f.characteristic() == 2 {
        // y^2 + h y = g; h = 0 gives one y, otherwise 2 or 0 by trace of g/h^2
        total = 1;
        for idx in 0..q {
            let x = f.from_index(idx);
            let h = f.add(f.mul(a1, x), a3);
            let x2 = f.mul(x, x);
            let g = f.add(f.add(f.mul(x2, x), f.mul(a2, x2)), f.add(f.mul(a4, x), a6));
            if h == ZERO {
                total += 1;
            } else if g == ZERO {
                total += 2;
            } else {
                let h2inv = f.inv(f.mul(h, h)).expect("nonzero");
                if f.trace_bit(f.mul(g, h2inv)) == 0 {
                    total += 2;
                }
            }
        }
        return total as u64;
    }
    let four = f.from_int(4);
    let two = f.from_int(2);
    let b2 = f.add(f.mul(a1, a1), f.mul(four, a2));
    let b4 = f.add(f.mul(two, a4), f.mul(a1, a3));
    let b6 = f.add(f.mul(a3, a3), f.mul(four, a6));
    let two_b4 = f.mul(two, b4);
    for idx in 0..q {
        let x = f.from_index(idx);
        let mut v = f.add(f.mul(four, x), b2);
        v = f.add(f.mul(v, x), two_b4);
        v = f.add(f.mul(v, x), b6);
        total += f.chi(v);
    }
    total as u64
}

/// Number of projective points on the reduction of `curve` over `F_{p^k}`.
///
/// The model is reduced as given (it must be `p`-integral); at a prime of
/// bad reduction the singular point is counted.
pub fn count_points(curve: &WeierstrassCurve, p: u64, k: u32) -> Result<u64> {
    count_points_with(curve, p, k, &CountConfig::default())
}

pub fn count_points_with(curve: &WeierstrassCurve, p: u64, k: u32, cfg: &CountConfig) -> Result<u64> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::InvalidInput("extension degree must be positive".into()));
    }
    let a = reduce_mod(curve, p)?;
    if k > 1 {
        let f = FiniteField::new(p, k)?;
        return Ok(count_points_field(&a, &f));
    }
    if p <= cfg.exhaustive_limit {
        return Ok(count_prime_field(&a, p));
    }
    let modp = |r: &rug::Rational| residue_q(r, p).expect("p-integral model");
    let disc_divisible = curve.discriminant().numer().is_divisible(&Integer::from(p));
    count_large_prime(modp(&curve.c4()), modp(&curve.c6()), disc_divisible, p)
}

/// `#E(F_p)` for `p >= 5` from `c4`, `c6` mod `p`.
///
/// The short model `y^2 = x^3 - 27 c4 x - 54 c6` is isomorphic to the
/// reduction for `p >= 5`.
fn count_large_prime(c4: u64, c6: u64, disc_divisible: bool, p: u64) -> Result<u64> {
    if disc_divisible {
        // singular reduction: N = p + 1 - a_p with a_p from the tangent test
        let ap = large_prime_bad_ap(c4, c6, p);
        return Ok((p as i64 + 1 - ap) as u64);
    }
    let a_short = mul_mod(p - 27 % p, c4, p);
    let b_short = mul_mod(p - 54 % p, c6, p);
    bsgs::count_short(a_short, b_short, p)
}

/// `a_p` of a singular reduction at a prime `p >= 5`: additive if `p | c4`,
/// otherwise split iff `-c6` is a square mod `p`.
fn large_prime_bad_ap(c4: u64, c6: u64, p: u64) -> i64 {
    if c4 == 0 {
        0
    } else {
        legendre((p - c6) % p, p) as i64
    }
}

/// Trace of Frobenius at `p` on the minimal model.
pub fn ap(curve: &WeierstrassCurve, p: u64) -> Result<i64> {
    check_prime(p)?;
    let (min, _) = minimal_model(curve)?;
    ap_minimal(&min, p, &CountConfig::default())
}

/// `a_p` for a model already known to be minimal at `p`.
pub fn ap_minimal(min: &WeierstrassCurve, p: u64, cfg: &CountConfig) -> Result<i64> {
    let n = count_points_with(min, p, 1, cfg)?;
    Ok(p as i64 + 1 - n as i64)
}

/// Integral model with its invariants cached, for counting at many primes.
struct IntegralModel {
    a: [Integer; 5],
    c4: Integer,
    c6: Integer,
    disc: Integer,
}

impl IntegralModel {
    fn new(min: &WeierstrassCurve) -> Result<Self> {
        let a = min
            .integer_coefficients()
            .ok_or_else(|| Error::InvalidInput("minimal model is not integral".into()))?;
        let int = |r: Rational| r.into_numer_denom().0;
        Ok(IntegralModel { a, c4: int(min.c4()), c6: int(min.c6()), disc: int(min.discriminant()) })
    }

    fn ap(&self, p: u64, cfg: &CountConfig) -> Result<i64> {
        let n = if p <= cfg.exhaustive_limit || p < 5 {
            let mut a = [0u64; 5];
            for (slot, c) in a.iter_mut().zip(&self.a) {
                *slot = residue(c, p);
            }
            count_prime_field(&a, p)
        } else {
            let divisible = residue(&self.disc, p) == 0;
            count_large_prime(residue(&self.c4, p), residue(&self.c6, p), divisible, p)?
        };
        Ok(p as i64 + 1 - n as i64)
    }
}

/// `a_p` for every prime up to `p_max`, in order.
pub fn ap_table(curve: &WeierstrassCurve, p_max: u64) -> Result<Vec<(u64, i64)>> {
    ap_table_with(curve, p_max, &CountConfig::bulk())
}

pub fn ap_table_with(curve: &WeierstrassCurve, p_max: u64, cfg: &CountConfig) -> Result<Vec<(u64, i64)>> {
    let (min, _) = minimal_model(curve)?;
    let model = IntegralModel::new(&min)?;
    let primes = primes_up_to(p_max);
    let vals = par::map(&primes, |&p| model.ap(p, cfg));
    primes.into_iter().zip(vals).map(|(p, v)| v.map(|a| (p, a))).collect()
}

/// Reduction type at `p` of the minimal model.
pub fn reduction_type(curve: &WeierstrassCurve, p: u64) -> Result<Reduction> {
    check_prime(p)?;
    let (min, _) = minimal_model(curve)?;
    reduction_type_minimal(&min, p)
}

fn reduction_type_minimal(min: &WeierstrassCurve, p: u64) -> Result<Reduction> {
    let pz = Integer::from(p);
    let disc = min.discriminant().into_numer_denom().0;
    if !disc.is_divisible(&pz) {
        return Ok(Reduction::Good);
    }
    let c4 = min.c4().into_numer_denom().0;
    if c4.is_divisible(&pz) {
        return Ok(Reduction::Additive);
    }
    // multiplicative: a_p = p - #E_ns = p + 1 - #E
    let ap = ap_minimal(min, p, &CountConfig::default())?;
    Ok(if ap == 1 { Reduction::SplitMultiplicative } else { Reduction::NonsplitMultiplicative })
}

/// Full local data at `p` (Tate's algorithm on the minimal model).
pub fn tate_local(curve: &WeierstrassCurve, p: u64) -> Result<LocalData> {
    check_prime(p)?;
    let (min, _) = minimal_model(curve)?;
    local_data_minimal(&min, p)
}

fn local_data_minimal(min: &WeierstrassCurve, p: u64) -> Result<LocalData> {
    let t = tate::tate(min, p)?;
    let reduction = reduction_type_minimal(min, p)?;
    if t.rescaled != 0 {
        return Err(Error::InvalidInput(format!("model is not minimal at {p}")));
    }
    let consistent = match t.kodaira {
        Kodaira::I(0) => reduction == Reduction::Good,
        Kodaira::I(_) => t.reduction == reduction,
        _ => reduction == Reduction::Additive,
    };
    if !consistent {
        return Err(Error::InvalidInput(format!(
            "reduction type {reduction:?} disagrees with Kodaira symbol {} at {p}",
            t.kodaira
        )));
    }
    let a_p = match reduction.bad_ap() {
        Some(a) => a,
        None => ap_minimal(min, p, &CountConfig::default())?,
    };
    let m_e = t.kodaira.components();
    if reduction != Reduction::Good {
        let vd = crate::arith::valuation(&min.discriminant().into_numer_denom().0, &Integer::from(p));
        if t.f + m_e != vd + 1 {
            return Err(Error::InvalidInput(format!("Ogg's formula fails at {p}")));
        }
    }
    Ok(LocalData { p, reduction, kodaira: t.kodaira, a_p, f_p: t.f, c_p: t.c, m_e })
}

/// Local data at every prime dividing the minimal discriminant, sorted by `p`.
pub fn bad_primes(curve: &WeierstrassCurve) -> Result<Vec<LocalData>> {
    let (min, _) = minimal_model(curve)?;
    let disc = min.discriminant().into_numer_denom().0;
    let mut out = Vec::new();
    for (p, _) in factor(&disc) {
        let p = p
            .to_u64()
            .ok_or_else(|| Error::InvalidInput(format!("bad prime {p} exceeds 64 bits")))?;
        out.push(local_data_minimal(&min, p)?);
    }
    Ok(out)
}

/// Conductor `N_E = prod p^{f_p}`.
pub fn conductor(curve: &WeierstrassCurve) -> Result<u64> {
    conductor_from(&bad_primes(curve)?)
}

pub fn conductor_from(bad: &[LocalData]) -> Result<u64> {
    bad.iter().try_fold(1u64, |acc, l| {
        l.p.checked_pow(l.f_p)
            .and_then(|q| acc.checked_mul(q))
            .ok_or_else(|| Error::InvalidInput("conductor exceeds 64 bits".into()))
    })
}
