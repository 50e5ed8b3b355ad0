//! The monodromy filtration of a nilpotent operator, and Frobenius weight
//! checks against it.

use num_complex::Complex64;
use rug::Rational;
use serde::Serialize;

use super::linalg::{poly, QMatrix, Subspace};
use super::wd::WeilDeligneRep;
use crate::{Error, Result};

/// Default tolerance for eigenvalue magnitudes.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// `M_k` for `k = lowest ..= lowest + steps.len() - 1`; below the range the
/// filtration is 0 and above it the whole space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyFiltration {
    pub lowest: i32,
    pub steps: Vec<Subspace>,
    dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationSummary {
    /// `(k, dim gr_k)` for nonzero graded pieces.
    pub graded_dims: Vec<(i32, usize)>,
}

impl MonodromyFiltration {
    fn from_fn(dim: usize, m: i32, f: impl Fn(i32) -> Subspace) -> Self {
        MonodromyFiltration { lowest: -m - 1, steps: (-m - 1..=m).map(f).collect(), dim }
    }

    pub fn step(&self, k: i32) -> Subspace {
        if k < self.lowest {
            Subspace::zero(self.dim)
        } else if k >= self.lowest + self.steps.len() as i32 {
            Subspace::full(self.dim)
        } else {
            self.steps[(k - self.lowest) as usize].clone()
        }
    }

    /// Largest `|k|` with a possibly nonzero graded piece.
    pub fn width(&self) -> i32 {
        -self.lowest - 1
    }

    pub fn graded_dim(&self, k: i32) -> usize {
        self.step(k).dim() - self.step(k - 1).dim()
    }

    pub fn summary(&self) -> FiltrationSummary {
        let w = self.width();
        FiltrationSummary { graded_dims: (-w..=w).map(|k| (k, self.graded_dim(k))).filter(|&(_, d)| d > 0).collect() }
    }

    /// `N(M_k) ⊆ M_{k-2}` for all `k`.
    pub fn shifts_by_two(&self, n: &QMatrix) -> bool {
        let w = self.width();
        (-w - 1..=w + 2).all(|k| self.step(k).image(n).is_subspace_of(&self.step(k - 2)))
    }

    /// `N^k : gr_k -> gr_{-k}` is an isomorphism for every `k >= 1`.
    pub fn graded_isomorphisms(&self, n: &QMatrix) -> bool {
        let w = self.width();
        (1..=w + 1).all(|k| {
            let nk = n.pow(k as u32);
            let (top, below) = (self.step(k), self.step(k - 1));
            let (target, target_below) = (self.step(-k), self.step(-k - 1));
            // well defined, injective and surjective on the graded pieces
            top.image(&nk).is_subspace_of(&target)
                && below.image(&nk).is_subspace_of(&target_below)
                && top.preimage_within(&nk, &target_below) == below
                && top.image(&nk).sum(&target_below) == target
        })
    }
}

fn nilpotency_index(n: &QMatrix) -> Result<i32> {
    let d = n.rows();
    if !n.is_square() {
        return Err(Error::InvalidInput("N must be square".into()));
    }
    let mut p = QMatrix::identity(d);
    for m in 0..=d {
        if p.is_zero() {
            return Ok(m as i32);
        }
        p = p.mul(n);
    }
    Err(Error::NotNilpotent)
}

/// `M_k = sum_{j >= max(0, -k)} ker N^{j+k+1} ∩ im N^j`.
pub fn monodromy_filtration(n: &QMatrix) -> Result<MonodromyFiltration> {
    let e = nilpotency_index(n)?;
    let d = n.rows();
    let m = (e - 1).max(0);
    let kers: Vec<Subspace> = (0..=2 * m + 2).map(|i| n.pow(i as u32).kernel_space()).collect();
    let ims: Vec<Subspace> = (0..=2 * m + 2).map(|i| n.pow(i as u32).image_space()).collect();
    Ok(MonodromyFiltration::from_fn(d, m, |k| {
        let mut acc = Subspace::zero(d);
        for j in (-k).max(0)..=m {
            let ki = (j + k + 1) as usize;
            if ki < kers.len() {
                acc = acc.sum(&kers[ki].intersect(&ims[j as usize]));
            }
        }
        acc
    }))
}

/// Deligne's recursive construction on nested subquotients `A ⊇ B`: with
/// `N^{m+1} A ⊆ B` and `m` minimal, set `M_m = A`, `M_{-m-1} = B`,
/// `M_{m-1} = {a : N^m a ∈ B}`, `M_{-m} = N^m A + B`, and recurse inside.
pub fn monodromy_filtration_recursive(n: &QMatrix) -> Result<MonodromyFiltration> {
    let e = nilpotency_index(n)?;
    let d = n.rows();
    let m = (e - 1).max(0);
    let mut steps = vec![None; (2 * m + 2) as usize];
    let idx = |k: i32| (k + m + 1) as usize;
    let (mut a, mut b) = (Subspace::full(d), Subspace::zero(d));
    let mut level = m;
    loop {
        steps[idx(level)] = Some(a.clone());
        steps[idx(-level - 1)] = Some(b.clone());
        if level == 0 {
            break;
        }
        let nm = n.pow(level as u32);
        let upper = a.preimage_within(&nm, &b);
        let lower = a.image(&nm).sum(&b);
        a = upper;
        b = lower;
        level -= 1;
    }
    let steps = steps.into_iter().map(|s| s.expect("every level filled")).collect();
    Ok(MonodromyFiltration { lowest: -m - 1, steps, dim: d })
}

/// Roots of a polynomial with ascending real coefficients by the
/// Aberth–Ehrlich iteration, with inclusion radii: every root lies in the
/// union of the disks, and each isolated disk holds exactly one.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<(Complex64, f64)> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let a: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &ai in a.iter().rev().skip(1) {
            dp = dp * z + p;
            p = p * z + ai;
        }
        (p, dp)
    };
    // Cauchy bound for the initial circle
    let r = 1.0 + a[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    // inclusion radii n |p(z_i)| / |prod_{j != i} (z_i - z_j)|
    z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            let (p, _) = eval(zi);
            let denom: Complex64 = (0..n).filter(|&j| j != i).map(|j| zi - z[j]).product();
            (zi, n as f64 * p.norm() / denom.norm().max(1e-300))
        })
        .collect()
}

fn magnitudes_match(char_poly: &[Rational], target: f64, tol: f64) -> bool {
    let c: Vec<f64> = char_poly.iter().map(Rational::to_f64).collect();
    polynomial_roots(&c).into_iter().all(|(z, rad)| (z.norm() - target).abs() + rad <= tol * target.max(1.0))
}

/// All Frobenius eigenvalues have absolute value `p^{n/2}`; needs `N = 0`
/// and trivial inertia, otherwise `false`.
pub fn check_weight(wd: &WeilDeligneRep, n: i32, tol: f64) -> bool {
    if !wd.is_unramified() {
        return false;
    }
    let target = (wd.p as f64).powf(n as f64 / 2.0);
    magnitudes_match(&wd.phi.char_poly(), target, tol)
}

/// Frobenius eigenvalues on `gr_k` of the monodromy filtration have
/// absolute value `p^{(n+k)/2}`; `false` when compatibility fails.
pub fn check_purity(wd: &WeilDeligneRep, n: i32, tol: f64) -> bool {
    if !wd.check_compatibility() {
        return false;
    }
    let Ok(filt) = monodromy_filtration(&wd.n) else { return false };
    let w = filt.width();
    for k in -w..=w {
        if filt.graded_dim(k) == 0 {
            continue;
        }
        let (Some(top), Some(below)) = (wd.phi.restrict(&filt.step(k)), wd.phi.restrict(&filt.step(k - 1))) else {
            return false;
        };
        let (q, r) = poly::divmod(&top.char_poly(), &below.char_poly());
        debug_assert!(r.iter().all(|c| *c == 0));
        let target = (wd.p as f64).powf((n + k) as f64 / 2.0);
        if !magnitudes_match(&q, target, tol) {
            return false;
        }
    }
    true
}
