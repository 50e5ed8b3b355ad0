//! Point counting for large `p` by baby-step giant-step order finding.
//!
//! Works on the short model `y^2 = x^3 + Ax + B` over `F_p`, `p >= 5`. Orders
//! of points are searched in the Hasse interval; constraints from points on
//! the curve and on its quadratic twist (`#E + #E' = 2p + 2`) are combined
//! until a single group order remains.

use std::sync::OnceLock;

use crate::arith::{inv_mod, legendre, mul_mod, primes_up_to, sqrt_mod};
use crate::{Error, Result};

type Affine = (u64, u64);

/// Jacobian coordinates `(X : Y : Z)` for `(X/Z^2, Y/Z^3)`; `Z = 0` is `O`.
#[derive(Clone, Copy, Debug)]
struct Jac {
    x: u64,
    y: u64,
    z: u64,
}

const INF: Jac = Jac { x: 1, y: 1, z: 0 };

impl Jac {
    fn from_affine((x, y): Affine) -> Self {
        Jac { x, y, z: 1 }
    }

    fn is_inf(&self) -> bool {
        self.z == 0
    }
}

#[derive(Clone, Copy, Debug)]
struct Short {
    a: u64,
    b: u64,
    p: u64,
    /// Barrett constant `floor(2^64 / p)` when `p < 2^32`, else 0.
    mu: u64,
}

fn inv(a: u64, p: u64) -> u64 {
    if p < 1 << 31 {
        let (mut r0, mut r1) = (p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        return t0.rem_euclid(p as i64) as u64;
    }
    inv_mod(a, p).expect("nonzero residue")
}

impl Short {
    fn new(a: u64, b: u64, p: u64) -> Self {
        let mu = if p >> 32 == 0 { ((1u128 << 64) / p as u128) as u64 } else { 0 };
        Short { a: a % p, b: b % p, p, mu }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.mu == 0 {
            return mul_mod(a, b, self.p);
        }
        let x = a * b;
        let q = ((x as u128 * self.mu as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (if s >= self.p as u128 { s - self.p as u128 } else { s }) as u64
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    fn dbl(&self, j: Jac) -> Jac {
        if j.is_inf() || j.y == 0 {
            return INF;
        }
        let xx = self.mul(j.x, j.x);
        let yy = self.mul(j.y, j.y);
        let zz = self.mul(j.z, j.z);
        let s = self.mul(4 % self.p, self.mul(j.x, yy));
        let m = self.add(self.mul(3, xx), self.mul(self.a, self.mul(zz, zz)));
        let x3 = self.sub(self.mul(m, m), self.add(s, s));
        let y4 = self.mul(8 % self.p, self.mul(yy, yy));
        let y3 = self.sub(self.mul(m, self.sub(s, x3)), y4);
        let z3 = self.mul(2, self.mul(j.y, j.z));
        Jac { x: x3, y: y3, z: z3 }
    }

    /// `j + q` with `q` affine.
    fn add_mixed(&self, j: Jac, q: Affine) -> Jac {
        if j.is_inf() {
            return Jac::from_affine(q);
        }
        let z1z1 = self.mul(j.z, j.z);
        let u2 = self.mul(q.0, z1z1);
        let s2 = self.mul(q.1, self.mul(j.z, z1z1));
        let h = self.sub(u2, j.x);
        let r = self.sub(s2, j.y);
        if h == 0 {
            return if r == 0 { self.dbl(j) } else { INF };
        }
        let hh = self.mul(h, h);
        let hhh = self.mul(h, hh);
        let v = self.mul(j.x, hh);
        let x3 = self.sub(self.sub(self.mul(r, r), hhh), self.add(v, v));
        let y3 = self.sub(self.mul(r, self.sub(v, x3)), self.mul(j.y, hhh));
        Jac { x: x3, y: y3, z: self.mul(j.z, h) }
    }

    fn scalar(&self, q: Affine, n: u64) -> Jac {
        let mut acc = INF;
        for bit in (0..64 - n.leading_zeros()).rev() {
            acc = self.dbl(acc);
            if (n >> bit) & 1 == 1 {
                acc = self.add_mixed(acc, q);
            }
        }
        acc
    }

    /// Affine forms of a batch with a single inversion.
    fn normalize(&self, js: &[Jac]) -> Vec<Option<Affine>> {
        let mut prefix = Vec::with_capacity(js.len());
        let mut acc = 1u64;
        for j in js {
            prefix.push(acc);
            if !j.is_inf() {
                acc = self.mul(acc, j.z);
            }
        }
        let mut inv_acc = inv(acc, self.p);
        let mut out = vec![None; js.len()];
        for (i, j) in js.iter().enumerate().rev() {
            if j.is_inf() {
                continue;
            }
            let zi = self.mul(inv_acc, prefix[i]);
            inv_acc = self.mul(inv_acc, j.z);
            let zi2 = self.mul(zi, zi);
            out[i] = Some((self.mul(j.x, zi2), self.mul(j.y, self.mul(zi2, zi))));
        }
        out
    }

    fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(self.a, x, p) + self.b) % p
    }

    /// Deterministic sequence of affine points: smallest x with a square rhs.
    fn points(&self) -> impl Iterator<Item = Affine> + '_ {
        (0..self.p).filter_map(move |x| {
            let r = self.rhs(x);
            if r == 0 {
                return None;
            }
            sqrt_mod(r, self.p).map(|y| (x, y))
        })
    }
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(1 << 16))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = small_primes().iter();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d = match rest.next() {
            Some(&q) => q,
            None => d + 1,
        };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exact order of `pt`, given some multiple `m` of it.
fn order_from_multiple(e: &Short, pt: Affine, mut m: u64) -> u64 {
    for q in prime_factors(m) {
        while m % q == 0 && e.scalar(pt, m / q).is_inf() {
            m /= q;
        }
    }
    m
}

/// Smallest multiple of `d` in `[lo, hi]`.
fn multiple_of(d: u64, lo: u64, hi: u64) -> Option<u64> {
    let n = lo.div_ceil(d) * d;
    (n <= hi).then_some(n)
}

const GIANT_BATCH: usize = 32;

/// Some `n` in `[lo, hi]` with `n * pt = O`.
fn multiple_in_interval(e: &Short, pt: Affine, lo: u64, hi: u64) -> Option<u64> {
    let width = hi - lo;
    let m = ((width as f64 / 2.0).sqrt().ceil() as u64).max(1);
    // baby steps jP, j = 1..m, sorted by x for lookup
    let mut chain = Vec::with_capacity(m as usize);
    let mut cur = Jac::from_affine(pt);
    for j in 1..=m {
        if cur.is_inf() {
            return multiple_of(j, lo, hi);
        }
        chain.push(cur);
        cur = e.add_mixed(cur, pt);
    }
    let mut baby: Vec<(u64, u64, u64)> = e
        .normalize(&chain)
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            let (x, y) = a.expect("finite baby step");
            (x, i as u64 + 1, y)
        })
        .collect();
    baby.sort_unstable();

    let step = 2 * m + 1;
    let giant = match e.normalize(&[e.scalar(pt, step)])[0] {
        Some(g) => g,
        None => return multiple_of(order_from_multiple(e, pt, step), lo, hi),
    };
    let mut centre = lo + m;
    let mut r = e.scalar(pt, centre);
    loop {
        let mut batch = Vec::with_capacity(GIANT_BATCH);
        for _ in 0..GIANT_BATCH {
            batch.push(r);
            r = e.add_mixed(r, giant);
        }
        let affine = e.normalize(&batch);
        for (k, a) in affine.iter().enumerate() {
            let c = centre + k as u64 * step;
            if c > hi + m {
                return None;
            }
            match a {
                None => return Some(c),
                Some((x, y)) => {
                    let i = baby.partition_point(|t| t.0 < *x);
                    if let Some(&(bx, j, yj)) = baby.get(i) {
                        if bx == *x {
                            // r = +-j P, so (c -+ j) P = O
                            return Some(if yj == *y { c - j } else { c + j });
                        }
                    }
                }
            }
        }
        centre += GIANT_BATCH as u64 * step;
    }
}

/// `#E(F_p)` for `y^2 = x^3 + ax + b`, `p >= 5`, nonsingular.
pub fn count_short(a: u64, b: u64, p: u64) -> Result<u64> {
    if p < 5 {
        return Err(Error::InvalidInput("baby-step giant-step needs p >= 5".into()));
    }
    let e = Short::new(a, b, p);
    let disc = (4 * mul_mod(mul_mod(e.a, e.a, p), e.a, p) % p + 27 * mul_mod(e.b, e.b, p) % p) % p;
    if disc == 0 {
        return Err(Error::BadReduction(p.to_string()));
    }
    let mut d = 2;
    while legendre(d, p) != -1 {
        d += 1;
    }
    let d2 = mul_mod(d, d, p);
    let twist = Short::new(mul_mod(e.a, d2, p), mul_mod(e.b, mul_mod(d2, d, p), p), p);

    // |a_p| <= floor(2 sqrt p) = isqrt(4p)
    let mut t = (2.0 * (p as f64).sqrt()) as u64;
    while t * t > 4 * p {
        t -= 1;
    }
    while (t + 1) * (t + 1) <= 4 * p {
        t += 1;
    }
    let (lo, hi) = (p + 1 - t, p + 1 + t);

    let (mut l1, mut l2) = (1u64, 1u64);
    let mut it1 = e.points();
    let mut it2 = twist.points();
    for round in 0..64 {
        let (curve, it, lcm) = if round % 2 == 0 { (&e, &mut it1, &mut l1) } else { (&twist, &mut it2, &mut l2) };
        let (lo_c, hi_c) = if round % 2 == 0 { (lo, hi) } else { (2 * p + 2 - hi, 2 * p + 2 - lo) };
        if let Some(pt) = it.next() {
            let m = multiple_in_interval(curve, pt, lo_c, hi_c)
                .ok_or_else(|| Error::InvalidInput(format!("no multiple in Hasse interval at p = {p}")))?;
            let ord = order_from_multiple(curve, pt, m);
            *lcm = lcm_u64(*lcm, ord);
        }
        let candidates = candidates(lo, hi, l1, l2, 2 * p + 2);
        if candidates.len() == 1 {
            return Ok(candidates[0]);
        }
    }
    Err(Error::InvalidInput(format!("group order ambiguous at p = {p}")))
}

/// Up to two `n` in `[lo, hi]` with `l1 | n` and `l2 | total - n`.
fn candidates(lo: u64, hi: u64, l1: u64, l2: u64, total: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(2);
    if l1 >= l2 {
        let mut n = lo.div_ceil(l1) * l1;
        while n <= hi && out.len() < 2 {
            if (total - n) % l2 == 0 {
                out.push(n);
            }
            n += l1;
        }
    } else {
        // walk m = total - n over multiples of l2 in [total - hi, total - lo]
        let mut m = (total - hi).div_ceil(l2) * l2;
        while m <= total - lo && out.len() < 2 {
            if (total - m) % l1 == 0 {
                out.push(total - m);
            }
            m += l2;
        }
    }
    out
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}
