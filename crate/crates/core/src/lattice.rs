//! Exact integer matrices: Smith normal form, torsion orders of cokernels,
//! and indices of full-rank lattices in a rational vector space.

use std::fmt;
use std::ops::{Index, IndexMut};

use rug::{Integer, Rational};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::realization::QMatrix;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Integer>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![Integer::new(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Integer::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Integer>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(IntegerMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints<const C: usize>(rows: &[[i64; C]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| Integer::from(x))).collect();
        IntegerMatrix { rows: rows.len(), cols: C, data }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = Integer::from(e);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<Integer>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if *a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn to_rational(&self) -> QMatrix {
        let rows = self.to_rows().into_iter().map(|r| r.into_iter().map(Rational::from).collect()).collect();
        QMatrix::from_rows(rows).expect("rectangular")
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> Integer {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut sign = 1;
        let mut prev = Integer::from(1);
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| m[(i, k)] != 0) else { return Integer::new() };
            if p != k {
                m.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = Integer::from(&m[(i, j)] * &m[(k, k)]) - Integer::from(&m[(i, k)] * &m[(k, j)]);
                    m[(i, j)] = v / &prev;
                }
            }
            prev = m[(k, k)].clone();
        }
        if n == 0 {
            return Integer::from(1);
        }
        prev * sign
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs() == 1
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += c * row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, c: &Integer) {
        for j in 0..self.cols {
            let t = Integer::from(c * &self[(src, j)]);
            self[(dst, j)] += t;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &Integer) {
        for i in 0..self.rows {
            let t = Integer::from(c * &self[(i, src)]);
            self[(i, dst)] += t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self[(r, j)]);
            self[(r, j)] = -v;
        }
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = Integer;
    fn index(&self, (i, j): (usize, usize)) -> &Integer {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Integer {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "{rows:?}")
    }
}

impl Serialize for IntegerMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Text(String),
    Int(i64),
}

impl<'de> Deserialize<'de> for IntegerMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Entry>> = Vec::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| match e {
                        Entry::Int(x) => Ok(Integer::from(x)),
                        Entry::Text(t) => Integer::from_str_radix(t.trim(), 10)
                            .map_err(|_| de::Error::custom(format!("not an integer: {t:?}"))),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        IntegerMatrix::from_rows(rows).map_err(de::Error::custom)
    }
}

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal, nonnegative, each
/// entry dividing the next.
#[derive(Clone, Debug, Serialize)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    pub fn invariants(&self) -> Vec<Integer> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().iter().filter(|x| **x != 0).count()
    }
}

/// Smith normal form by row and column reduction, always pivoting on the
/// smallest nonzero entry of the remaining block.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[(i, j)] != 0 && best.is_none_or(|(bi, bj)| d[(i, j)].cmp_abs(&d[(bi, bj)]).is_lt()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, d, v);
            };
            if pi != t {
                d.swap_rows(pi, t);
                u.swap_rows(pi, t);
            }
            if pj != t {
                d.swap_cols(pj, t);
                v.swap_cols(pj, t);
            }
            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)] != 0 {
                    let q = -Integer::from(&d[(i, t)] / &pivot);
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    clean &= d[(i, t)] == 0;
                }
            }
            for j in t + 1..n {
                if d[(t, j)] != 0 {
                    let q = -Integer::from(&d[(t, j)] / &pivot);
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    clean &= d[(t, j)] == 0;
                }
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest of the block
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_divisible(&pivot)));
            match bad {
                Some(i) => {
                    let one = Integer::from(1);
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, d, v)
}

fn finish(u: IntegerMatrix, d: IntegerMatrix, v: IntegerMatrix) -> SmithForm {
    let snf = SmithForm { u, d, v };
    #[cfg(debug_assertions)]
    {
        debug_assert!(snf.u.is_unimodular() && snf.v.is_unimodular(), "transforms are not unimodular");
    }
    snf
}

/// Order of the torsion subgroup of `Z^rows / A Z^cols`.
pub fn torsion_order(presentation: &IntegerMatrix) -> Integer {
    smith_normal_form(presentation).invariants().into_iter().filter(|x| *x != 0).product()
}

/// Two full-rank lattices in `Q^n`, bases given as rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePair {
    pub first: QMatrix,
    pub second: QMatrix,
}

impl LatticePair {
    pub fn new(first: QMatrix, second: QMatrix) -> Result<Self> {
        let n = first.rows();
        if !first.is_square() || !second.is_square() || second.rows() != n {
            return Err(Error::InvalidInput("lattice bases must be square of the same size".into()));
        }
        if first.determinant() == 0 || second.determinant() == 0 {
            return Err(Error::SingularBasis);
        }
        Ok(LatticePair { first, second })
    }
}

/// `[L1 : L2] = |det B2| / |det B1|`, the group index when `L2 ⊆ L1`.
pub fn lattice_index(pair: &LatticePair) -> Result<Rational> {
    let d1 = pair.first.determinant();
    let d2 = pair.second.determinant();
    if d1 == 0 || d2 == 0 {
        return Err(Error::SingularBasis);
    }
    Ok(Rational::from(d2 / d1).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert!(w[0] != 0 && w[1].is_divisible(&w[0]) || w[1] == 0, "{inv:?}");
        }
        s
    }

    #[test]
    fn small_examples() {
        let s = check(&IntegerMatrix::diagonal(&[2, 3]));
        assert_eq!(s.invariants(), vec![Integer::from(1), Integer::from(6)]);
        let s = check(&IntegerMatrix::from_ints(&[[2, 4], [6, 8]]));
        assert_eq!(s.invariants(), vec![Integer::from(2), Integer::from(4)]);
        let s = check(&IntegerMatrix::identity(3));
        assert_eq!(s.d, IntegerMatrix::identity(3));
        let s = check(&IntegerMatrix::from_ints(&[[0, 0, 0], [0, 0, 0]]));
        assert_eq!(s.rank(), 0);
        check(&IntegerMatrix::from_ints(&[[4, 6, 10], [6, 9, 15]]));
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(torsion_order(&IntegerMatrix::diagonal(&[2, 3])), 6);
        assert_eq!(torsion_order(&IntegerMatrix::identity(2)), 1);
        assert_eq!(torsion_order(&IntegerMatrix::diagonal(&[0, 3])), 3);
        assert_eq!(torsion_order(&IntegerMatrix::zeros(2, 2)), 1);
    }

    #[test]
    fn determinant_bareiss() {
        assert_eq!(IntegerMatrix::from_ints(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]).determinant(), 18);
        assert_eq!(IntegerMatrix::from_ints(&[[0, 1], [1, 0]]).determinant(), -1);
        assert_eq!(IntegerMatrix::from_ints(&[[1, 2], [2, 4]]).determinant(), 0);
    }

    #[test]
    fn indices() {
        let z = QMatrix::from_ints(&[[1]]);
        let two = QMatrix::from_ints(&[[2]]);
        let third = QMatrix::from_rows(vec![vec![Rational::from((1, 3))]]).unwrap();
        assert_eq!(lattice_index(&LatticePair::new(z.clone(), z.clone()).unwrap()).unwrap(), 1);
        assert_eq!(lattice_index(&LatticePair::new(z.clone(), two).unwrap()).unwrap(), 2);
        assert_eq!(lattice_index(&LatticePair::new(z.clone(), third).unwrap()).unwrap(), Rational::from((1, 3)));
        assert_eq!(LatticePair::new(z, QMatrix::from_ints(&[[0]])).unwrap_err(), Error::SingularBasis);
    }

    #[test]
    fn json_roundtrip() {
        let m = IntegerMatrix::from_ints(&[[1, -2], [30000000000, 4]]);
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(j, r#"[["1","-2"],["30000000000","4"]]"#);
        assert_eq!(serde_json::from_str::<IntegerMatrix>(&j).unwrap(), m);
        assert_eq!(serde_json::from_str::<IntegerMatrix>("[[1,2],[3,4]]").unwrap(), IntegerMatrix::from_ints(&[[1, 2], [3, 4]]));
        assert!(serde_json::from_str::<IntegerMatrix>(r#"[["1"],["x"]]"#).is_err());
        assert!(serde_json::from_str::<IntegerMatrix>("[[1],[2,3]]").is_err());
    }
}
