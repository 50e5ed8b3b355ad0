//! Exact linear algebra over the rationals at desk scale: matrices,
//! subspaces in reduced row-echelon form, characteristic polynomials.

use std::fmt;

use rug::Rational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::parse_rational;
use crate::{Error, Result};

/// A dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::new(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints<const C: usize>(rows: &[[i64; C]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect())
            .expect("rectangular")
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Columns given as vectors.
    pub fn from_columns(cols: &[Vec<Rational>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if *a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    m[(i, j)] += Rational::from(a * &o[(k, j)]);
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::new();
                for (a, x) in self.row(i).iter().zip(v) {
                    acc += Rational::from(a * x);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| Rational::from(a + b)).collect();
        QMatrix { data, ..*self }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| Rational::from(a - b)).collect();
        QMatrix { data, ..*self }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let data = self.data.iter().map(|a| Rational::from(a * c)).collect();
        QMatrix { data, ..*self }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.rows), |acc, _| acc.mul(self))
    }

    fn clone_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let (rows, cols) = m.clone_shape();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| m[(i, c)] != 0) else { continue };
            m.swap_rows(p, r);
            let inv = Rational::from(m[(r, c)].recip_ref());
            for j in 0..cols {
                m[(r, j)] *= &inv;
            }
            for i in 0..rows {
                if i != r && m[(i, c)] != 0 {
                    let f = m[(i, c)].clone();
                    for j in 0..cols {
                        let t = Rational::from(&f * &m[(r, j)]);
                        m[(i, j)] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{v : A v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::new(); self.cols];
                v[f] = Rational::from(1);
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn kernel_space(&self) -> Subspace {
        Subspace::span(self.cols, &self.kernel())
    }

    pub fn image_space(&self) -> Subspace {
        let cols: Vec<Vec<Rational>> = (0..self.cols).map(|j| self.column(j)).collect();
        Subspace::span(self.rows, &cols)
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rational::from(1);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m[(i, c)] != 0) else { return Rational::new() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            det *= &m[(c, c)];
            for i in c + 1..n {
                if m[(i, c)] != 0 {
                    let f = Rational::from(&m[(i, c)] / &m[(c, c)]);
                    for j in c..n {
                        let t = Rational::from(&f * &m[(c, j)]);
                        m[(i, j)] -= t;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::from(1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// `det(X I - A)` as coefficients `[c_0, ..., c_n]` (ascending, monic),
    /// by the Faddeev–LeVerrier recursion.
    pub fn char_poly(&self) -> Vec<Rational> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![Rational::new(); n + 1];
        coeffs[n] = Rational::from(1);
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m);
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self.mul(&m);
            let tr: Rational = (0..n).map(|i| am[(i, i)].clone()).sum();
            coeffs[n - k] = -tr / k as u32;
        }
        coeffs
    }

    /// `p(A)` for ascending coefficients.
    pub fn poly_eval(&self, p: &[Rational]) -> Self {
        let mut acc = Self::zeros(self.rows, self.cols);
        for c in p.iter().rev() {
            acc = acc.mul(self);
            for i in 0..self.rows {
                acc[(i, i)] += c;
            }
        }
        acc
    }

    /// Matrix of `self` restricted to an invariant subspace, in the
    /// subspace's basis. `None` if the subspace is not invariant.
    pub fn restrict(&self, s: &Subspace) -> Option<Self> {
        let basis = s.basis();
        let k = basis.len();
        let b = Self::from_columns(basis, self.rows);
        let mut out = Self::zeros(k, k);
        for (j, v) in basis.iter().enumerate() {
            let w = self.apply(v);
            let coords = s.coordinates(&w)?;
            for i in 0..k {
                out[(i, j)] = coords[i].clone();
            }
        }
        debug_assert_eq!(b.mul(&out), Self::from_columns(&basis.iter().map(|v| self.apply(v)).collect::<Vec<_>>(), self.rows));
        Some(out)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "{rows:?}")
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(de)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        QMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// A subspace of `Q^n`, stored as the nonzero rows of a reduced
/// row-echelon basis, so equal subspaces compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient: n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self::span(n, &QMatrix::identity(n).to_rows())
    }

    pub fn span(n: usize, vectors: &[Vec<Rational>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(n);
        }
        let m = QMatrix::from_rows(vectors.to_vec()).expect("equal lengths");
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient: n, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let coords: Vec<Rational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rebuilt = vec![Rational::new(); self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (r, x) in rebuilt.iter_mut().zip(b) {
                *r += Rational::from(c * x);
            }
        }
        (rebuilt == v).then_some(coords)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, o: &Subspace) -> bool {
        self.basis.iter().all(|b| o.contains(b))
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(o.basis.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        if self.dim() == 0 || o.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        // solve sum a_i u_i = sum b_j w_j
        let k = self.dim();
        let mut cols: Vec<Vec<Rational>> = self.basis.clone();
        cols.extend(o.basis.iter().map(|w| w.iter().map(|x| -x.clone()).collect()));
        let m = QMatrix::from_columns(&cols, self.ambient);
        let vecs: Vec<Vec<Rational>> = m
            .kernel()
            .iter()
            .map(|c| {
                let mut v = vec![Rational::new(); self.ambient];
                for (a, u) in c[..k].iter().zip(&self.basis) {
                    for (x, y) in v.iter_mut().zip(u) {
                        *x += Rational::from(a * y);
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient, &vecs)
    }

    /// `A(self)`.
    pub fn image(&self, a: &QMatrix) -> Subspace {
        let vecs: Vec<Vec<Rational>> = self.basis.iter().map(|v| a.apply(v)).collect();
        Subspace::span(a.rows(), &vecs)
    }

    /// `{v in self : A v in target}`.
    pub fn preimage_within(&self, a: &QMatrix, target: &Subspace) -> Subspace {
        if self.dim() == 0 {
            return self.clone();
        }
        // coefficients c with A(sum c_i b_i) in target: kernel of the map to Q^n / target
        let comp = target.complement_projection();
        let images: Vec<Vec<Rational>> = self.basis.iter().map(|v| comp.apply(&a.apply(v))).collect();
        let m = QMatrix::from_columns(&images, comp.rows());
        let vecs: Vec<Vec<Rational>> = m
            .kernel()
            .iter()
            .map(|c| {
                let mut v = vec![Rational::new(); self.ambient];
                for (x, b) in c.iter().zip(&self.basis) {
                    for (y, z) in v.iter_mut().zip(b) {
                        *y += Rational::from(x * z);
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient, &vecs)
    }

    /// A linear map `Q^n -> Q^m` whose kernel is exactly `self`.
    fn complement_projection(&self) -> QMatrix {
        if self.dim() == 0 {
            return QMatrix::identity(self.ambient);
        }
        let m = QMatrix::from_rows(self.basis.clone()).expect("rectangular");
        // rows spanning the annihilator of self
        let ann = m.kernel();
        if ann.is_empty() {
            return QMatrix::zeros(1, self.ambient);
        }
        QMatrix::from_rows(ann).expect("rectangular")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "Subspace{rows:?}")
    }
}

/// Polynomial helpers on ascending rational coefficient vectors.
pub mod poly {
    use rug::Rational;

    pub fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.len() > 1 && p.last().is_some_and(|c| *c == 0) {
            p.pop();
        }
        if p.is_empty() {
            p.push(Rational::new());
        }
        p
    }

    pub fn degree(p: &[Rational]) -> usize {
        trim(p.to_vec()).len() - 1
    }

    pub fn derivative(p: &[Rational]) -> Vec<Rational> {
        if p.len() <= 1 {
            return vec![Rational::new()];
        }
        p.iter().enumerate().skip(1).map(|(i, c)| Rational::from(c * i as u32)).collect()
    }

    /// Quotient and remainder.
    pub fn divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let b = trim(b.to_vec());
        assert!(!(b.len() == 1 && b[0] == 0), "division by zero polynomial");
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        if r.len() < b.len() {
            return (vec![Rational::new()], r);
        }
        let mut q = vec![Rational::new(); r.len() - db];
        let lead = b[db].clone();
        while r.len() >= b.len() && !(r.len() == 1 && r[0] == 0) {
            let shift = r.len() - b.len();
            let c = Rational::from(r.last().unwrap() / &lead);
            for (i, bc) in b.iter().enumerate() {
                let t = Rational::from(&c * bc);
                r[shift + i] -= t;
            }
            q[shift] = c;
            r.pop();
            r = trim(r);
            if r.len() < b.len() {
                break;
            }
        }
        (q, r)
    }

    pub fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !(b.len() == 1 && b[0] == 0) {
            let (_, r) = divmod(&a, &b);
            a = b;
            b = r;
        }
        let lead = a.last().unwrap().clone();
        a.into_iter().map(|c| c / &lead).collect()
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::new(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += Rational::from(x * y);
            }
        }
        trim(out)
    }
}
