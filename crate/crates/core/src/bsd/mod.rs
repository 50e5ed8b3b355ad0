//! The arithmetic side of the Birch–Swinnerton-Dyer formula and a report
//! comparing it with the analytic side.

pub mod height;
pub mod period;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analytic::AnalyticContext;
use crate::curve::{point_search, torsion_subgroup, CurvePoint, WeierstrassCurve};
use crate::local::bad_primes;
use crate::{par, Error, Result};

pub use height::{canonical_height, height_by_doubling, height_pairing, naive_height, HeightValue};
pub use period::{period_of_model, real_period, RealPeriod};

/// Relative size of the Gram determinant (against the product of the
/// diagonal) below which generators count as dependent.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-12;

/// Default tolerance for the apparent order of vanishing.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Distance to the nearest square below which predicted Sha is flagged as square.
pub const SQUARE_TOLERANCE: f64 = 1e-3;

/// A value with an absolute error bound.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Gram matrix of the height pairing.
pub fn gram_matrix(curve: &WeierstrassCurve, gens: &[CurvePoint]) -> Result<Vec<Vec<f64>>> {
    let heights: Vec<f64> = par::map(gens, |p| canonical_height(curve, p).map(|h| h.value))
        .into_iter()
        .collect::<Result<_>>()?;
    let n = gens.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        g[i][i] = heights[i];
        for j in i + 1..n {
            let s = curve.add(&gens[i], &gens[j])?;
            let hs = canonical_height(curve, &s)?.value;
            let v = (hs - heights[i] - heights[j]) / 2.0;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    det
}

/// `|det <P_i, P_j>|`; 1 for no generators.
pub fn regulator(curve: &WeierstrassCurve, gens: &[CurvePoint]) -> Result<f64> {
    for p in gens {
        if !curve.contains(p) {
            return Err(Error::PointNotOnCurve);
        }
    }
    if gens.is_empty() {
        return Ok(1.0);
    }
    let g = gram_matrix(curve, gens)?;
    let diag: f64 = (0..g.len()).map(|i| g[i][i]).product();
    let det = determinant(g).abs();
    if diag <= 0.0 || det <= DEPENDENCE_TOLERANCE * diag {
        return Err(Error::DependentGenerators(det));
    }
    Ok(det)
}

/// Up to `count` points of naive height at most `bound`, chosen greedily by
/// height so that the regulator stays nonsingular. They are independent but
/// need not generate the free part.
pub fn search_generators(curve: &WeierstrassCurve, count: usize, bound: u64) -> Result<Vec<CurvePoint>> {
    let mut pts: Vec<(f64, CurvePoint)> = Vec::new();
    for p in point_search(curve, bound) {
        let h = canonical_height(curve, &p)?.value;
        if h > 1e-8 {
            pts.push((h, p));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut chosen = Vec::new();
    for (_, p) in pts {
        if chosen.len() == count {
            break;
        }
        chosen.push(p);
        if regulator(curve, &chosen).is_err() {
            chosen.pop();
        }
    }
    Ok(chosen)
}

#[derive(Clone, Debug, Serialize)]
pub struct BsdReport {
    pub curve: String,
    #[serde(rename = "N")]
    pub conductor: u64,
    pub w: i32,
    pub rank_analytic: usize,
    /// `L^{(r)}(E, 1) / r!`.
    #[serde(rename = "L_leading")]
    pub l_leading: Estimate,
    pub omega: Estimate,
    /// `None` when the supplied generators are dependent.
    pub regulator: Option<Estimate>,
    pub torsion: u32,
    pub tamagawa: BTreeMap<u64, u32>,
    pub sha_predicted: Option<Estimate>,
    pub flags: Vec<String>,
}

impl BsdReport {
    pub fn tamagawa_product(&self) -> u64 {
        self.tamagawa.values().map(|&c| c as u64).product()
    }

    pub fn has_flag(&self, f: &str) -> bool {
        self.flags.iter().any(|x| x == f)
    }
}

/// Assembles the report; degenerate situations become flags.
pub fn bsd_report(curve: &WeierstrassCurve, gens: &[CurvePoint]) -> Result<BsdReport> {
    let ctx = AnalyticContext::new(curve)?;
    bsd_report_with(&ctx, gens, RANK_TOLERANCE)
}

pub fn bsd_report_with(ctx: &AnalyticContext, gens: &[CurvePoint], rank_tol: f64) -> Result<BsdReport> {
    let curve = &ctx.curve;
    let mut flags = Vec::new();
    let rank = ctx.analytic_rank(rank_tol)?;
    if rank.confidence != "numerical" {
        flags.push("rank_lower_bound".to_string());
    }
    let w = ctx.fricke_root_number();
    let parity_ok = (rank.rank % 2 == 1) == (w == -1);
    flags.push(if parity_ok { "parity_consistent" } else { "parity_inconsistent" }.to_string());

    let order = rank.rank.min(crate::analytic::MAX_ORDER);
    let taylor = ctx.l_taylor(order)?;
    let lead = &taylor[order];
    let l_leading = Estimate { value: lead.re(), error: lead.error_bound };

    let per = real_period(curve)?;
    let omega = Estimate { value: per.omega, error: per.error_bound };

    if gens.len() != rank.rank {
        flags.push("rank_mismatch".to_string());
    }
    let regulator = match regulator(curve, gens) {
        Ok(r) => Some(Estimate { value: r, error: r * 1e-12 }),
        Err(Error::DependentGenerators(_)) => {
            flags.push("dependent_generators".to_string());
            None
        }
        Err(e) => return Err(e),
    };

    let torsion = torsion_subgroup(curve)?.order();
    let tamagawa: BTreeMap<u64, u32> = bad_primes(curve)?.into_iter().map(|d| (d.p, d.c_p)).collect();
    let cprod: f64 = tamagawa.values().map(|&c| c as f64).product();

    let sha_predicted = regulator.map(|reg| {
        let t2 = (torsion as f64).powi(2);
        let value = l_leading.value * t2 / (omega.value * reg.value * cprod);
        let rel = l_leading.error / l_leading.value.abs().max(f64::MIN_POSITIVE)
            + omega.error / omega.value
            + reg.error / reg.value;
        Estimate { value, error: value.abs() * rel + 1e-12 }
    });
    if let Some(sha) = sha_predicted {
        let root = sha.value.max(0.0).sqrt().round();
        if root >= 1.0 && (sha.value - root * root).abs() < SQUARE_TOLERANCE.max(sha.error) {
            flags.push("sha_near_square".to_string());
        } else {
            flags.push("sha_not_square".to_string());
        }
    }

    Ok(BsdReport {
        curve: curve.to_string(),
        conductor: ctx.conductor,
        w,
        rank_analytic: rank.rank,
        l_leading,
        omega,
        regulator,
        torsion,
        tamagawa,
        sha_predicted,
        flags,
    })
}
