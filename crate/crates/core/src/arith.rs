//! Elementary number theory shared by the other modules.

use rug::integer::IsPrime;
use rug::ops::Pow;
use rug::{Integer, Rational};

/// All primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for `0..=n` (entries 0 and 1 are 0).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if (a | b) >> 32 == 0 {
        return a * b % m;
    }
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &Integer) -> bool {
    match n.to_u64() {
        Some(small) => is_prime_u64(small),
        None => *n > 0 && n.is_probably_prime(40) != IsPrime::No,
    }
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// `p`-adic valuation of a nonzero integer. Returns `u32::MAX` for zero.
pub fn valuation(n: &Integer, p: &Integer) -> u32 {
    if *n == 0 {
        return u32::MAX;
    }
    let mut m = n.clone();
    m.remove_factor_mut(p)
}

/// `p`-adic valuation of a nonzero rational. Returns `i64::MAX` for zero.
pub fn valuation_q(r: &Rational, p: &Integer) -> i64 {
    if *r == 0 {
        return i64::MAX;
    }
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

/// `x mod p` in `[0, p)`.
pub fn residue(x: &Integer, p: u64) -> u64 {
    if p >> 32 == 0 {
        return x.mod_u(p as u32) as u64;
    }
    let mut r = Integer::from(x % p);
    if r < 0 {
        r += p;
    }
    r.to_u64().expect("residue fits u64")
}

/// Image of a `p`-integral rational in `F_p`.
pub fn residue_q(x: &Rational, p: u64) -> Option<u64> {
    let d = residue(x.denom(), p);
    inv_mod(d, p).map(|di| mul_mod(residue(x.numer(), p), di, p))
}

/// Number of divisors of `n`.
pub fn sigma0(mut n: u64) -> u64 {
    let mut count = 1;
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        count *= e + 1;
        d += 1;
    }
    if n > 1 {
        count *= 2;
    }
    count
}

fn pollard_brent(n: &Integer, c: u64) -> Option<Integer> {
    let f = |x: &Integer| -> Integer {
        let mut y = Integer::from(x * x);
        y += c;
        y %= n;
        y
    };
    let mut y = Integer::from(2);
    let mut r: u64 = 1;
    let mut q = Integer::from(1);
    let mut g = Integer::from(1);
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 128u64;
    while g == 1 {
        x.clone_from(&y);
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys.clone_from(&y);
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = Integer::from(&x - &y).abs();
                q *= diff;
                q %= n;
            }
            g = Integer::from(q.gcd_ref(n));
            k += m;
        }
        r *= 2;
        if r > (1 << 26) {
            return None;
        }
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = Integer::from(Integer::from(&x - &ys).abs().gcd_ref(n));
            if g > 1 {
                break;
            }
        }
    }
    if g == *n {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: Integer, out: &mut Vec<Integer>) {
    if n == 1 {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    if n.is_perfect_square() {
        let r = n.sqrt();
        split_composite(r.clone(), out);
        split_composite(r, out);
        return;
    }
    for c in 1u64.. {
        if let Some(d) = pollard_brent(&n, c) {
            let e = Integer::from(&n / &d);
            split_composite(d, out);
            split_composite(e, out);
            return;
        }
    }
}

/// Prime factorisation of `|n|` as sorted `(prime, exponent)` pairs.
///
/// Trial division to 10^4, then Pollard–Brent. Zero and units give an empty
/// list.
pub fn factor(n: &Integer) -> Vec<(Integer, u32)> {
    let mut m = n.clone().abs();
    let mut out: Vec<(Integer, u32)> = Vec::new();
    if m <= 1 {
        return out;
    }
    for p in primes_up_to(10_000) {
        let pi = Integer::from(p);
        let e = m.remove_factor_mut(&pi);
        if e > 0 {
            out.push((pi, e));
        }
        if m == 1 {
            return out;
        }
    }
    let mut big = Vec::new();
    split_composite(m, &mut big);
    big.sort();
    for p in big {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Parses an exact rational literal: integer, fraction `a/b`, or decimal.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(crate::Error::Parse("empty number".into()));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let neg = int_part.starts_with('-');
        let digits: String = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(crate::Error::Parse(format!("bad decimal literal {t:?}")));
        }
        let num: Integer = digits.parse().map_err(|_| crate::Error::Parse(t.into()))?;
        let den = Integer::from(10).pow(frac_part.len() as u32);
        let r = Rational::from((num, den));
        return Ok(if neg { -r } else { r });
    }
    t.parse::<Rational>()
        .map_err(|_| crate::Error::Parse(format!("bad rational literal {t:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_and_miller_rabin_agree() {
        let ps = primes_up_to(5000);
        for n in 0..5000u64 {
            assert_eq!(ps.binary_search(&n).is_ok(), is_prime_u64(n), "n = {n}");
        }
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn factor_recovers_product() {
        let n = Integer::from(2u64.pow(5)) * 3 * 3 * 1_000_003u64 * 998_244_353u64;
        let f = factor(&n);
        let back = f
            .iter()
            .fold(Integer::from(1), |acc, (p, e)| acc * Integer::from((&p).pow(*e)));
        assert_eq!(back, n);
        assert!(f.iter().all(|(p, _)| is_prime(p)));
        assert_eq!(factor(&Integer::from(-37)), vec![(Integer::from(37), 1)]);
    }

    #[test]
    fn sqrt_mod_roundtrip() {
        for p in [3u64, 5, 13, 17, 97, 1_000_000_007] {
            for a in 1..60u64 {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mul_mod(r, r, p), a % p);
                } else {
                    assert_eq!(legendre(a, p), -1);
                }
            }
        }
    }

    #[test]
    fn valuations() {
        let n = Integer::from(-432);
        assert_eq!(valuation(&n, &Integer::from(2)), 4);
        assert_eq!(valuation(&n, &Integer::from(3)), 3);
        let r = Rational::from((9, 16));
        assert_eq!(valuation_q(&r, &Integer::from(2)), -4);
        assert_eq!(sigma0(12), 6);
        assert_eq!(inv_mod(3, 7), Some(5));
    }

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("-10").unwrap(), -10);
        assert_eq!(parse_rational("3/6").unwrap(), Rational::from((1, 2)));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::from((-1, 4)));
        assert!(parse_rational("x").is_err());
    }
}
