//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use hasse_weil::lattice::IntegerMatrix;
use hasse_weil::realization::{HodgeData, QMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

pub fn random_hodge(rng: &mut ChaCha8Rng) -> HodgeData {
    let weight: i32 = rng.random_range(-3..=6);
    let mut hodge = Vec::new();
    let mut p = weight.div_euclid(2) + 1;
    // off-diagonal pairs (p, q) with p > q, then the middle slot
    while 2 * p <= weight + 6 {
        let h = rng.random_range(0..=2);
        hodge.push((p, weight - p, h));
        hodge.push((weight - p, p, h));
        p += 1;
    }
    let (mut plus, mut minus) = (0, 0);
    if weight % 2 == 0 {
        plus = rng.random_range(0..=2);
        minus = rng.random_range(0..=2);
        hodge.push((weight / 2, weight / 2, plus + minus));
    }
    HodgeData::new(weight, hodge, plus, minus).unwrap()
}

pub fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> QMatrix {
    loop {
        let rows: Vec<Vec<Rational>> =
            (0..d).map(|_| (0..d).map(|_| Rational::from(rng.random_range(-3i64..=3))).collect()).collect();
        let m = QMatrix::from_rows(rows).unwrap();
        if m.determinant() != 0 {
            return m;
        }
    }
}

/// A random nilpotent of dimension `d`, conjugated from Jordan form, along
/// with its block sizes.
pub fn random_nilpotent(rng: &mut ChaCha8Rng, d: usize) -> (QMatrix, Vec<usize>) {
    let mut blocks = Vec::new();
    let mut left = d;
    while left > 0 {
        let b = rng.random_range(1..=left);
        blocks.push(b);
        left -= b;
    }
    let mut j = QMatrix::zeros(d, d);
    let mut start = 0;
    for &b in &blocks {
        for i in start..start + b - 1 {
            j[(i, i + 1)] = Rational::from(rng.random_range(1i64..=4));
        }
        start += b;
    }
    let p = random_invertible(rng, d);
    (p.mul(&j).mul(&p.inverse().unwrap()), blocks)
}

/// A Jordan block of size `b` contributes one dimension to `gr_k` for
/// `k = b-1, b-3, ..., 1-b`.
pub fn expected_graded(blocks: &[usize], k: i32) -> usize {
    blocks
        .iter()
        .filter(|&&b| {
            let top = b as i32 - 1;
            k.abs() <= top && (top - k) % 2 == 0
        })
        .count()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, max_dim: usize, bound: i64) -> IntegerMatrix {
    let (r, c) = (rng.random_range(1..=max_dim), rng.random_range(1..=max_dim));
    let rows = (0..r).map(|_| (0..c).map(|_| Integer::from(rng.random_range(-bound..=bound))).collect()).collect();
    IntegerMatrix::from_rows(rows).unwrap()
}

/// `d_r`: gcd of the nonzero `r x r` minors, `r` the rank. Chosen so that
/// the torsion exponent divides it.
pub fn determinantal_divisor(a: &IntegerMatrix, r: usize) -> Integer {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (k - 1..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| { s.push(last); s })).collect()
    }
    let mut g = Integer::new();
    for rs in subsets(a.rows(), r) {
        for cs in subsets(a.cols(), r) {
            let minor = IntegerMatrix::from_rows(rs.iter().map(|&i| cs.iter().map(|&j| a[(i, j)].clone()).collect()).collect())
                .unwrap();
            g.gcd_mut(&minor.determinant());
        }
    }
    g
}

/// Counts the subgroup of `(Z/N)^m` generated by the columns. With the
/// torsion exponent dividing `N`, `|T| = N^rank / |L mod N|`.
pub fn torsion_by_enumeration(a: &IntegerMatrix) -> u64 {
    let r = a.to_rational().rank();
    if r == 0 {
        return 1;
    }
    let n = determinantal_divisor(a, r).to_i64().unwrap();
    let m = a.rows();
    let gens: Vec<Vec<i64>> = (0..a.cols()).map(|j| (0..m).map(|i| a[(i, j)].to_i64().unwrap().rem_euclid(n)).collect()).collect();
    let mut seen: HashSet<Vec<i64>> = HashSet::from([vec![0; m]]);
    let mut frontier = vec![vec![0; m]];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y: Vec<i64> = x.iter().zip(g).map(|(a, b)| (a + b) % n).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let total = (n as u64).pow(r as u32);
    assert_eq!(total % seen.len() as u64, 0);
    total / seen.len() as u64
}
