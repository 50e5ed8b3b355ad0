//! Tate's algorithm over `Z_p`.
//!
//! Follows the classical sequence of coordinate changes (Silverman, Advanced
//! Topics IV.9; Cremona 3.2). Every root-finding step needed in residue
//! characteristic 2 or 3 is done by brute force over `F_p`, which keeps the
//! formulas uniform; for `p >= 5` the closed forms are used.

use rug::ops::Pow;
use rug::Integer;

use super::{Kodaira, Reduction};
use crate::arith::{inv_mod, legendre, mul_mod, residue, valuation};
use crate::curve::{IsomorphismData, WeierstrassCurve};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TateOutput {
    pub reduction: Reduction,
    pub kodaira: Kodaira,
    pub f: u32,
    pub c: u32,
    /// Times the input model was found non-minimal at `p` and rescaled.
    pub rescaled: u32,
}

fn ints(e: &WeierstrassCurve) -> Result<[Integer; 5]> {
    e.integer_coefficients()
        .ok_or_else(|| Error::NotIntegral("model passed to Tate's algorithm".into()))
}

fn rst(e: &WeierstrassCurve, r: Integer, s: Integer, t: Integer) -> WeierstrassCurve {
    e.transform(&IsomorphismData::new(1, r, s, t))
}

struct Fp {
    p: u64,
    pz: Integer,
}

impl Fp {
    fn md(&self, x: &Integer) -> u64 {
        residue(x, self.p)
    }

    fn divides(&self, x: &Integer) -> bool {
        x.is_divisible(&self.pz)
    }

    fn val(&self, x: &Integer) -> u32 {
        valuation(x, &self.pz)
    }

    fn poly(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }

    /// Whether `a X^2 + b X + c` has a root in `F_p`.
    fn quad_has_root(&self, a: &Integer, b: &Integer, c: &Integer) -> bool {
        let p = self.p;
        let (a, b, c) = (self.md(a), self.md(b), self.md(c));
        if p == 2 {
            return (0..2).any(|x| self.poly(&[c, b, a], x) == 0);
        }
        if a == 0 {
            return b != 0 || c == 0;
        }
        let disc = (mul_mod(b, b, p) + p - mul_mod(4 % p, mul_mod(a, c, p), p)) % p;
        disc == 0 || legendre(disc, p) == 1
    }

    /// Number of distinct roots in `F_p` of the squarefree cubic
    /// `X^3 + b X^2 + c X + d`.
    fn cubic_root_count(&self, b: u64, c: u64, d: u64) -> u32 {
        let p = self.p;
        if p <= 1000 {
            return (0..p).filter(|&x| self.poly(&[d, c, b, 1], x) == 0).count() as u32;
        }
        // deg gcd(X^p - X, f)
        let f = [d, c, b];
        let xp = poly_pow_x(p, &f, p);
        let mut g = xp;
        g[1] = (g[1] + p - 1) % p;
        poly_gcd_degree(g.to_vec(), vec![d, c, b, 1], p)
    }

    /// A root of `f` in `F_p` that is also a root of `f'` (a repeated root).
    fn repeated_root(&self, f: &[u64]) -> Option<u64> {
        let p = self.p;
        let df: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(i as u64 % p, c, p)).collect();
        (0..p).find(|&x| self.poly(f, x) == 0 && self.poly(&df, x) == 0)
    }

    fn inv(&self, a: u64) -> u64 {
        inv_mod(a % self.p, self.p).expect("invertible residue")
    }

    fn neg_half(&self, a: &Integer) -> u64 {
        // -a / 2 mod p, p odd
        let p = self.p;
        mul_mod((p - self.md(a)) % p, self.inv(2), p)
    }
}

/// `X^e mod f` where `f = X^3 + f[2] X^2 + f[1] X + f[0]`.
fn poly_pow_x(e: u64, f: &[u64; 3], p: u64) -> [u64; 3] {
    let mulmod = |u: [u64; 3], v: [u64; 3]| -> [u64; 3] {
        let mut prod = [0u64; 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] = (prod[i + j] + mul_mod(u[i], v[j], p)) % p;
            }
        }
        for k in (3..5).rev() {
            let top = prod[k];
            prod[k] = 0;
            for i in 0..3 {
                prod[k - 3 + i] = (prod[k - 3 + i] + p - mul_mod(top, f[i], p)) % p;
            }
        }
        [prod[0], prod[1], prod[2]]
    };
    let mut acc = [1, 0, 0];
    let mut base = [0, 1, 0];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base);
        }
        base = mulmod(base, base);
        e >>= 1;
    }
    acc
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> u32 {
    trim(&mut a);
    trim(&mut b);
    while !a.is_empty() {
        // b mod a
        while b.len() >= a.len() {
            let shift = b.len() - a.len();
            let factor = mul_mod(*b.last().unwrap(), inv_mod(*a.last().unwrap(), p).unwrap(), p);
            for (i, &c) in a.iter().enumerate() {
                b[i + shift] = (b[i + shift] + p - mul_mod(factor, c, p)) % p;
            }
            trim(&mut b);
        }
        std::mem::swap(&mut a, &mut b);
    }
    (b.len() as u32).saturating_sub(1)
}

/// Singular point of the reduction of an integral model with `p | Δ`.
fn singular_point(fp: &Fp, a: &[Integer; 5], b: &[Integer; 4], c4: &Integer, c6: &Integer) -> (Integer, Integer) {
    let p = fp.p;
    let am: Vec<u64> = a.iter().map(|x| fp.md(x)).collect();
    if p <= 3 {
        for x in 0..p {
            for y in 0..p {
                // F = y^2 + a1 xy + a3 y - x^3 - a2 x^2 - a4 x - a6
                let f = (y * y + am[0] * x * y + am[2] * y + 3 * p * p * p
                    - x * x * x
                    - am[1] * x * x
                    - am[3] * x
                    - am[4])
                    % p;
                let fx = (am[0] * y + 3 * p * p - 3 * x * x - 2 * am[1] * x - am[3]) % p;
                let fy = (2 * y + am[0] * x + am[2]) % p;
                if f == 0 && fx == 0 && fy == 0 {
                    return (Integer::from(x), Integer::from(y));
                }
            }
        }
        unreachable!("reduction mod p is singular");
    }
    let x0 = if fp.divides(c4) {
        // cusp: x0 = -b2 / 12
        mul_mod((p - fp.md(&b[0])) % p, fp.inv(12), p)
    } else {
        // node: x0 = -(c6 + b2 c4) / (12 c4)
        let num = Integer::from(c6 + Integer::from(&b[0] * c4));
        mul_mod((p - fp.md(&num)) % p, fp.inv(mul_mod(12, fp.md(c4), p)), p)
    };
    let y0 = {
        let s = (mul_mod(am[0], x0, p) + am[2]) % p;
        mul_mod((p - s) % p, fp.inv(2), p)
    };
    (Integer::from(x0), Integer::from(y0))
}

pub(crate) fn tate(curve: &WeierstrassCurve, p: u64) -> Result<TateOutput> {
    let fp = Fp { p, pz: Integer::from(p) };
    let pz = fp.pz.clone();
    let pw = |k: u32| -> Integer { Integer::from(pz.clone().pow(k)) };
    let mut e = curve.clone();
    let mut rescaled = 0;
    loop {
        let disc = ints(&e).map(|_| e.discriminant().into_numer_denom().0)?;
        let vd = fp.val(&disc);
        if vd == 0 {
            return Ok(TateOutput { reduction: Reduction::Good, kodaira: Kodaira::I(0), f: 0, c: 1, rescaled });
        }
        let a = ints(&e)?;
        let b: [Integer; 4] = e.b_invariants().map(|x| x.into_numer_denom().0);
        let c4 = e.c4().into_numer_denom().0;
        let c6 = e.c6().into_numer_denom().0;

        let (r, t) = singular_point(&fp, &a, &b, &c4, &c6);
        e = rst(&e, r, Integer::new(), t);
        let [a1, a2, a3, a4, a6] = ints(&e)?;
        if !(fp.divides(&a3) && fp.divides(&a4) && fp.divides(&a6)) {
            return Err(Error::InvalidInput(format!("failed to move singular point to origin at p = {p}")));
        }
        let b = e.b_invariants().map(|x| x.into_numer_denom().0);
        let [b2, _, b6, b8] = &b;

        if !fp.divides(b2) {
            let split = fp.quad_has_root(&Integer::from(1), &a1, &Integer::from(-&a2));
            let c = if split { vd } else if vd % 2 == 0 { 2 } else { 1 };
            let reduction = if split { Reduction::SplitMultiplicative } else { Reduction::NonsplitMultiplicative };
            return Ok(TateOutput { reduction, kodaira: Kodaira::I(vd), f: 1, c, rescaled });
        }
        let additive = |kodaira, f, c| Ok(TateOutput { reduction: Reduction::Additive, kodaira, f, c, rescaled });
        if !a6.is_divisible(&pw(2)) {
            return additive(Kodaira::II, vd, 1);
        }
        if !b8.is_divisible(&pw(3)) {
            return additive(Kodaira::III, vd - 1, 2);
        }
        if !b6.is_divisible(&pw(3)) {
            let a3t = Integer::from(&a3 / &pz);
            let a6t = Integer::from(&a6 / pw(2));
            let c = if fp.quad_has_root(&Integer::from(1), &a3t, &Integer::from(-a6t)) { 3 } else { 1 };
            return additive(Kodaira::IV, vd - 2, c);
        }

        // p | a1, a2; p^2 | a3, a4; p^3 | a6
        let (s, t) = if p == 2 {
            let s = Integer::from(fp.md(&a2));
            let t = Integer::from(2 * fp.md(&Integer::from(&a6 / 4u32)));
            (s, t)
        } else {
            let s = Integer::from(fp.neg_half(&a1));
            let t = Integer::from(fp.neg_half(&Integer::from(&a3 / &pz))) * &pz;
            (s, t)
        };
        e = rst(&e, Integer::new(), s, t);
        let [a1, a2, a3, a4, a6] = ints(&e)?;
        if !(fp.divides(&a1)
            && fp.divides(&a2)
            && a3.is_divisible(&pw(2))
            && a4.is_divisible(&pw(2))
            && a6.is_divisible(&pw(3)))
        {
            return Err(Error::InvalidInput(format!("Tate step 6 normalisation failed at p = {p}")));
        }
        let bb = Integer::from(&a2 / &pz);
        let cc = Integer::from(&a4 / pw(2));
        let dd = Integer::from(&a6 / pw(3));
        let (bm, cm, dm) = (fp.md(&bb), fp.md(&cc), fp.md(&dd));
        // discriminant of T^3 + b T^2 + c T + d and 3c - b^2
        let w = Integer::from(27) * Integer::from(&dd * &dd) - Integer::from(&bb * &bb) * Integer::from(&cc * &cc)
            + Integer::from(4) * Integer::from(&bb * &bb) * &bb * &dd
            - Integer::from(18) * Integer::from(&bb * &cc) * &dd
            + Integer::from(4) * Integer::from(&cc * &cc) * &cc;
        let x = Integer::from(3) * &cc - Integer::from(&bb * &bb);

        if !fp.divides(&w) {
            let roots = fp.cubic_root_count(bm, cm, dm);
            return additive(Kodaira::IStar(0), vd - 4, 1 + roots);
        }

        if !fp.divides(&x) {
            // double root: move it to T = 0, then the I_m* subprocedure
            let t0 = if p <= 3 {
                fp.repeated_root(&[dm, cm, bm, 1]).expect("double root exists")
            } else {
                let num = (mul_mod(bm, cm, p) + p - mul_mod(9, dm, p)) % p;
                mul_mod(num, fp.inv(mul_mod(2, fp.md(&x), p)), p)
            };
            e = rst(&e, Integer::from(t0) * &pz, Integer::new(), Integer::new());
            let (mut ix, mut iy) = (3u32, 3u32);
            let mut mx = pw(2);
            let mut my = pw(2);
            let c = loop {
                let [_, a2, a3, _, a6] = ints(&e)?;
                let a2t = Integer::from(&a2 / &pz);
                let a3t = Integer::from(&a3 / &my);
                let a6t = Integer::from(&a6 / Integer::from(&mx * &my));
                let disc_y = Integer::from(&a3t * &a3t) + Integer::from(4) * &a6t;
                if !fp.divides(&disc_y) {
                    break if fp.quad_has_root(&Integer::from(1), &a3t, &Integer::from(-&a6t)) { 4 } else { 2 };
                }
                let y0 = if p == 2 { fp.md(&a6t) } else { fp.neg_half(&a3t) };
                e = rst(&e, Integer::new(), Integer::new(), Integer::from(y0) * &my);
                my *= &pz;
                iy += 1;
                // a2 is unchanged by a y-translation
                let [_, _, _, a4, a6] = ints(&e)?;
                let a4t = Integer::from(&a4 / Integer::from(&pz * &mx));
                let a6t = Integer::from(&a6 / Integer::from(&mx * &my));
                let disc_x = Integer::from(&a4t * &a4t) - Integer::from(4) * Integer::from(&a6t * &a2t);
                if !fp.divides(&disc_x) {
                    break if fp.quad_has_root(&a2t, &a4t, &a6t) { 4 } else { 2 };
                }
                let x0 = if p == 2 {
                    mul_mod(fp.md(&a6t), fp.md(&a2t), p)
                } else {
                    mul_mod((p - fp.md(&a4t)) % p, fp.inv(mul_mod(2, fp.md(&a2t), p)), p)
                };
                e = rst(&e, Integer::from(x0) * &mx, Integer::new(), Integer::new());
                mx *= &pz;
                ix += 1;
            };
            let m = ix + iy - 5;
            return additive(Kodaira::IStar(m), vd - m - 4, c);
        }

        // triple root: move it to T = 0
        let t0 = if p <= 3 {
            fp.repeated_root(&[dm, cm, bm, 1]).expect("triple root exists")
        } else {
            mul_mod((p - bm) % p, fp.inv(3), p)
        };
        e = rst(&e, Integer::from(t0) * &pz, Integer::new(), Integer::new());
        let [_, a2, a3, a4, a6] = ints(&e)?;
        if !(a2.is_divisible(&pw(2)) && a4.is_divisible(&pw(3)) && a6.is_divisible(&pw(4))) {
            return Err(Error::InvalidInput(format!("Tate triple-root normalisation failed at p = {p}")));
        }
        let a3t = Integer::from(&a3 / pw(2));
        let a6t = Integer::from(&a6 / pw(4));
        if !fp.divides(&(Integer::from(&a3t * &a3t) + Integer::from(4) * &a6t)) {
            let c = if fp.quad_has_root(&Integer::from(1), &a3t, &Integer::from(-&a6t)) { 3 } else { 1 };
            return additive(Kodaira::IVStar, vd - 6, c);
        }
        let y0 = if p == 2 { fp.md(&a6t) } else { fp.neg_half(&a3t) };
        e = rst(&e, Integer::new(), Integer::new(), Integer::from(y0) * pw(2));
        let [_, _, _, a4, a6] = ints(&e)?;
        if !a4.is_divisible(&pw(4)) {
            return additive(Kodaira::IIIStar, vd - 7, 2);
        }
        if !a6.is_divisible(&pw(6)) {
            return additive(Kodaira::IIStar, vd - 8, 1);
        }
        // not minimal at p
        e = e.transform(&IsomorphismData::scaling(pz.clone()));
        rescaled += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(a: [i64; 5], p: u64) -> TateOutput {
        tate(&WeierstrassCurve::from_ints(a).unwrap(), p).unwrap()
    }

    #[test]
    fn reference_curves() {
        let t = run([0, 0, 1, -1, 0], 37);
        assert_eq!((t.kodaira, t.f, t.c), (Kodaira::I(1), 1, 1));
        assert_eq!(t.reduction, Reduction::NonsplitMultiplicative);
        let t = run([0, -1, 1, -10, -20], 11);
        assert_eq!((t.kodaira, t.f, t.c), (Kodaira::I(5), 1, 5));
        assert_eq!(t.reduction, Reduction::SplitMultiplicative);
        let t = run([0, 0, 0, 0, 1], 2);
        assert_eq!((t.kodaira, t.f, t.c), (Kodaira::IV, 2, 3));
        let t = run([0, 0, 0, 0, 1], 3);
        assert_eq!((t.kodaira, t.f, t.c), (Kodaira::III, 2, 2));
    }

    #[test]
    fn star_types_at_five() {
        // y^2 = x^3 + 5^k-type families
        assert_eq!(run([0, 0, 0, -25, 0], 5).kodaira, Kodaira::IStar(0));
        assert_eq!(run([0, 0, 0, -25, 0], 5).c, 4);
        assert_eq!(run([0, 0, 0, 0, 625], 5).kodaira, Kodaira::IVStar);
        assert_eq!(run([0, 0, 0, 125, 0], 5).kodaira, Kodaira::IIIStar);
        assert_eq!(run([0, 0, 0, 0, 3125], 5).kodaira, Kodaira::IIStar);
        assert_eq!(run([0, 0, 0, 0, 25], 5).kodaira, Kodaira::IV);
        assert_eq!(run([0, 0, 0, 5, 0], 5).kodaira, Kodaira::III);
        assert_eq!(run([0, 0, 0, 0, 5], 5).kodaira, Kodaira::II);
    }

    #[test]
    fn non_minimal_model_is_rescaled() {
        let t = run([0, 0, 0, 0, 15625 * 64], 5);
        assert_eq!(t.rescaled, 1);
        assert_eq!(t.reduction, Reduction::Good);
    }

    #[test]
    fn cubic_root_count_large_prime() {
        let p = 1_000_003u64;
        let fp = Fp { p, pz: Integer::from(p) };
        // (X-1)(X-2)(X-3) = X^3 - 6X^2 + 11X - 6
        assert_eq!(fp.cubic_root_count(p - 6, 11, p - 6), 3);
        for d in [2u64, 3, 5, 7] {
            let brute = (0..p).filter(|&x| (mul_mod(mul_mod(x, x, p), x, p) + d) % p == 0).count() as u32;
            assert_eq!(fp.cubic_root_count(0, 0, d), brute, "X^3 + {d}");
        }
    }
}
