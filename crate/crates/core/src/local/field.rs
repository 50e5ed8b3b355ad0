//! Small finite fields `F_{p^k}` via log / Zech-log tables.
//!
//! Elements are stored in "log form": `ZERO` for 0 and otherwise the exponent
//! of a fixed primitive element `g`. Multiplication adds exponents and
//! addition uses `1 + g^i = g^{zech[i]}`. Tables are built from a primitive
//! polynomial found by search, so construction is `O(q)` per candidate.

use crate::{Error, Result};

/// Log-form element.
pub type Elt = u32;

pub const ZERO: Elt = u32::MAX;
pub const ONE: Elt = 0;

/// Largest field the tables are built for.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    /// `exp[i]` is the index (base-p digit vector) of `g^i`.
    exp: Vec<u32>,
    /// `log[idx]` for every index, `ZERO` at 0.
    log: Vec<Elt>,
    zech: Vec<Elt>,
    /// Characteristic 2 only: bit `i` set iff `Tr(x^i) = 1`.
    trace_mask: u32,
}

fn times_x(idx: u64, p: u64, k: u32, modulus: &[u64]) -> u64 {
    // digits d_0..d_{k-1}; result is x * poly reduced by monic modulus
    let mut digits = Vec::with_capacity(k as usize);
    let mut v = idx;
    for _ in 0..k {
        digits.push(v % p);
        v /= p;
    }
    let top = digits[k as usize - 1];
    let mut out = 0u64;
    let mut scale = 1u64;
    for i in 0..k as usize {
        let shifted = if i == 0 { 0 } else { digits[i - 1] };
        let d = (shifted + p * p - top * modulus[i] % p) % p;
        out += d * scale;
        scale *= p;
    }
    out
}

fn has_root(poly: &[u64], p: u64) -> bool {
    (0..p).any(|c| {
        let mut acc = 0u64;
        for coef in poly.iter().rev() {
            acc = (acc * c + coef) % p;
        }
        acc == 0
    })
}

impl FiniteField {
    /// `F_{p^k}` from the first primitive modulus in lexicographic order.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        Self::with_choice(p, k, 0)
    }

    /// Like [`FiniteField::new`] but skips the first `skip` primitive moduli,
    /// so different but isomorphic models of the field can be compared.
    pub fn with_choice(p: u64, k: u32, skip: usize) -> Result<Self> {
        if !crate::arith::is_prime_u64(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|q| *q <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::FieldTooLarge(format!("{p}^{k}")))?;
        let mut skipped = 0;
        // candidate moduli x^k + c_{k-1} x^{k-1} + ... + c_0, c_0 != 0
        for code in 0..q {
            let mut modulus = Vec::with_capacity(k as usize + 1);
            let mut v = code;
            for _ in 0..k {
                modulus.push(v % p);
                v /= p;
            }
            if modulus[0] == 0 {
                continue;
            }
            modulus.push(1);
            if k > 1 && has_root(&modulus, p) {
                continue;
            }
            let Some(exp) = Self::primitive_walk(p, k, q, &modulus) else { continue };
            if skipped < skip {
                skipped += 1;
                continue;
            }
            return Ok(Self::from_exp(p, k, q, modulus, exp));
        }
        Err(Error::InvalidInput(format!("no primitive modulus of degree {k} over F_{p}")))
    }

    /// Powers of `x` modulo `modulus` if `x` has order exactly `q - 1`.
    fn primitive_walk(p: u64, k: u32, q: u64, modulus: &[u64]) -> Option<Vec<u32>> {
        let n = (q - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut cur = 1u64;
        for i in 0..n {
            if i > 0 && cur == 1 {
                return None;
            }
            exp.push(cur as u32);
            cur = times_x(cur, p, k, modulus);
        }
        (cur == 1).then_some(exp)
    }

    fn from_exp(p: u64, k: u32, q: u64, modulus: Vec<u64>, exp: Vec<u32>) -> Self {
        let n = exp.len();
        let mut log = vec![ZERO; q as usize];
        for (i, &idx) in exp.iter().enumerate() {
            log[idx as usize] = i as Elt;
        }
        // 1 + g^i: add 1 to the constant digit
        let zech = (0..n)
            .map(|i| {
                let idx = exp[i] as u64;
                let d0 = idx % p;
                let bumped = idx - d0 + (d0 + 1) % p;
                log[bumped as usize]
            })
            .collect();
        let mut f = FiniteField { p, k, q, modulus, exp, log, zech, trace_mask: 0 };
        if p == 2 {
            let mut mask = 0u32;
            for i in 0..k {
                let xi = f.log[1usize << i];
                if f.trace(xi) == ONE {
                    mask |= 1 << i;
                }
            }
            f.trace_mask = mask;
        }
        f
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    #[inline]
    fn order(&self) -> u64 {
        self.q - 1
    }

    /// Element with index `idx` (base-p digits of the polynomial).
    #[inline]
    pub fn from_index(&self, idx: u64) -> Elt {
        self.log[idx as usize]
    }

    #[inline]
    pub fn index_of(&self, a: Elt) -> u64 {
        if a == ZERO {
            0
        } else {
            self.exp[a as usize] as u64
        }
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, c: i64) -> Elt {
        self.log[c.rem_euclid(self.p as i64) as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let s = a as u64 + b as u64;
        let n = self.order();
        (if s >= n { s - n } else { s }) as Elt
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let n = self.order();
        let d = (b as u64 + n - a as u64) % n;
        let z = self.zech[d as usize];
        if z == ZERO {
            ZERO
        } else {
            self.mul(a, z)
        }
    }

    pub fn neg(&self, a: Elt) -> Elt {
        if a == ZERO || self.p == 2 {
            return a;
        }
        self.mul(a, (self.order() / 2) as Elt)
    }

    pub fn inv(&self, a: Elt) -> Option<Elt> {
        if a == ZERO {
            return None;
        }
        Some(((self.order() - a as u64) % self.order()) as Elt)
    }

    pub fn pow(&self, a: Elt, e: u64) -> Elt {
        if a == ZERO {
            return if e == 0 { ONE } else { ZERO };
        }
        ((a as u128 * e as u128) % self.order() as u128) as Elt
    }

    /// Whether `a` is a nonzero square (odd characteristic).
    #[inline]
    pub fn is_square(&self, a: Elt) -> bool {
        a != ZERO && (self.p == 2 || a % 2 == 0)
    }

    /// Quadratic character: 0, 1 or -1 (odd characteristic).
    #[inline]
    pub fn chi(&self, a: Elt) -> i64 {
        if a == ZERO {
            0
        } else if a % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Absolute trace to the prime field, returned as an element.
    pub fn trace(&self, a: Elt) -> Elt {
        let mut acc = ZERO;
        let mut cur = a;
        for _ in 0..self.k {
            acc = self.add(acc, cur);
            cur = self.pow(cur, self.p);
        }
        acc
    }

    /// `Tr(a) mod 2` via the precomputed basis mask (characteristic 2).
    #[inline]
    pub fn trace_bit(&self, a: Elt) -> u32 {
        debug_assert_eq!(self.p, 2);
        ((self.index_of(a) as u32) & self.trace_mask).count_ones() & 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for (p, k) in [(2, 1), (2, 3), (3, 2), (5, 1), (7, 2), (2, 4)] {
            let f = FiniteField::new(p, k).unwrap();
            let q = f.size();
            for i in 0..q {
                let a = f.from_index(i);
                assert_eq!(f.index_of(a), i);
                assert_eq!(f.add(a, f.neg(a)), ZERO);
                if a != ZERO {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), ONE);
                }
                for j in 0..q.min(20) {
                    let b = f.from_index(j);
                    // digitwise addition
                    let mut want = 0u64;
                    let (mut x, mut y, mut s) = (i, j, 1u64);
                    for _ in 0..k {
                        want += ((x % p + y % p) % p) * s;
                        x /= p;
                        y /= p;
                        s *= p;
                    }
                    assert_eq!(f.index_of(f.add(a, b)), want);
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_prime_field_and_trace_lands_there() {
        let f = FiniteField::new(3, 3).unwrap();
        for c in 0..3 {
            let a = f.from_int(c);
            assert_eq!(f.pow(a, 3), a);
        }
        for i in 0..27 {
            let t = f.trace(f.from_index(i));
            assert!(f.index_of(t) < 3);
        }
        let g = FiniteField::new(2, 5).unwrap();
        for i in 0..32 {
            let a = g.from_index(i);
            assert_eq!(g.trace_bit(a) as u64, g.index_of(g.trace(a)));
        }
    }

    #[test]
    fn alternative_moduli_exist_and_differ() {
        let f0 = FiniteField::with_choice(5, 2, 0).unwrap();
        let f1 = FiniteField::with_choice(5, 2, 1).unwrap();
        assert_ne!(f0.modulus(), f1.modulus());
        assert_eq!(f0.size(), 25);
    }

    #[test]
    fn rejects_composite_and_huge() {
        assert!(matches!(FiniteField::new(4, 1), Err(Error::NotPrime(_))));
        assert!(matches!(FiniteField::new(1_000_003, 2), Err(Error::FieldTooLarge(_))));
    }
}
