use std::fmt::Write as _;
use std::fs;

use hasse_weil::analytic::mpc::Complex;
use hasse_weil::analytic::{AnalyticContext, AnalyticRank, MpValue, DEFAULT_DIGITS};
use hasse_weil::bsd::{bsd_report_with, BsdReport, RANK_TOLERANCE};
use hasse_weil::curve::{minimal_model, torsion_subgroup, CurvePoint, IsomorphismData, WeierstrassCurve};
use hasse_weil::lattice::{lattice_index, smith_normal_form, torsion_order, IntegerMatrix, LatticePair};
use hasse_weil::local::{bad_primes, conductor, reduction_type, LocalData, Reduction};
use hasse_weil::lseries::{eval_euler, local_counts, trace_formula_holds, zeta_factorization_holds, SeriesValue};
use hasse_weil::realization::{
    check_purity, check_weight, monodromy_filtration, GammaTerm, HodgeData, QMatrix, WeilDeligneJson,
    WeilDeligneRep, WEIGHT_TOLERANCE,
};
use hasse_weil::{Error, Result};
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::{CurveArgs, Flags, MotiveArgs, SnfArgs};

type Out = Result<String>;

fn render<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn parse_curve(c: &CurveArgs) -> Result<WeierstrassCurve> {
    match c.coeffs.len() {
        2 => WeierstrassCurve::from_tokens(&["0", "0", "0", &c.coeffs[0], &c.coeffs[1]]),
        _ => WeierstrassCurve::from_tokens(&c.coeffs),
    }
}

fn digits(f: &Flags) -> u32 {
    f.prec.unwrap_or(DEFAULT_DIGITS)
}

fn context(curve: &WeierstrassCurve, f: &Flags) -> Result<AnalyticContext> {
    match f.nmax {
        Some(n) => AnalyticContext::with_terms(curve, digits(f), n),
        None => AnalyticContext::with_digits(curve, digits(f)),
    }
}

fn read_file(f: &Flags) -> Result<String> {
    let path = f.file.as_ref().ok_or_else(|| Error::InvalidInput("--file is required".into()))?;
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_float(prec: u32, s: &str) -> Result<Float> {
    let t = s.trim();
    let t = match t {
        "" | "+" => "1",
        "-" => "-1",
        _ => t,
    };
    Float::parse(t).map(|v| Float::with_val(prec, v)).map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

/// `a`, `bi`, `a+bi`, `a-bi`; exponents such as `1e-3` are accepted.
pub fn parse_complex(prec: u32, s: &str) -> Result<Complex> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex { re: parse_float(prec, &t)?, im: Float::new(prec) });
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_float(prec, &body[..i])?, parse_float(prec, &body[i..])?),
        None => (Float::new(prec), parse_float(prec, body)?),
    };
    Ok(Complex { re, im })
}

fn s_values(f: &Flags, prec: u32) -> Result<Vec<(String, Complex)>> {
    if f.s.is_empty() {
        return Ok(vec![("1".into(), Complex::from_f64(prec, 1.0, 0.0))]);
    }
    f.s.iter().map(|s| Ok((s.clone(), parse_complex(prec, s)?))).collect()
}

fn bound(e: f64) -> String {
    format!("{e:.1e}")
}

fn mp_text(v: &MpValue) -> String {
    if v.value.im.is_zero() {
        format!("{} ± {}", v.re_string(), bound(v.error_bound))
    } else {
        let im = v.im_string();
        let (sign, mag) = match im.strip_prefix('-') {
            Some(m) => ('-', m.to_string()),
            None => ('+', im),
        };
        format!("{} {sign} {mag}i ± {}", v.re_string(), bound(v.error_bound))
    }
}

fn reduction_name(r: Reduction) -> &'static str {
    match r {
        Reduction::Good => "good",
        Reduction::SplitMultiplicative => "split multiplicative",
        Reduction::NonsplitMultiplicative => "non-split multiplicative",
        Reduction::Additive => "additive",
    }
}

#[derive(Serialize)]
struct Invariants {
    b2: String,
    b4: String,
    b6: String,
    b8: String,
    c4: String,
    c6: String,
    discriminant: String,
    j: String,
}

#[derive(Serialize)]
struct TorsionReport {
    order: u32,
    invariants: Vec<u32>,
    points: Vec<CurvePoint>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    curve: WeierstrassCurve,
    invariants: Invariants,
    minimal_model: WeierstrassCurve,
    isomorphism: IsomorphismData,
    minimal_discriminant: String,
    conductor: u64,
    bad_primes: Vec<LocalData>,
    torsion: TorsionReport,
}

pub fn analyze(c: &CurveArgs, f: &Flags) -> Out {
    let curve = parse_curve(c)?;
    let inv = curve.invariants();
    let (min, iso) = minimal_model(&curve)?;
    let bad = bad_primes(&curve)?;
    let tors = torsion_subgroup(&curve)?;
    let report = AnalyzeReport {
        invariants: Invariants {
            b2: inv.b2.to_string(),
            b4: inv.b4.to_string(),
            b6: inv.b6.to_string(),
            b8: inv.b8.to_string(),
            c4: inv.c4.to_string(),
            c6: inv.c6.to_string(),
            discriminant: inv.discriminant.to_string(),
            j: inv.j.to_string(),
        },
        minimal_discriminant: min.discriminant().to_string(),
        minimal_model: min,
        isomorphism: iso,
        conductor: conductor(&curve)?,
        bad_primes: bad,
        torsion: TorsionReport { order: tors.order(), invariants: tors.invariants.clone(), points: tors.points.clone() },
        curve,
    };
    if f.json {
        return Ok(render(&report));
    }
    let mut s = String::new();
    let r = &report;
    writeln!(s, "curve          {}", r.curve).unwrap();
    writeln!(s, "discriminant   {}", r.invariants.discriminant).unwrap();
    writeln!(s, "j-invariant    {}", r.invariants.j).unwrap();
    writeln!(s, "c4, c6         {}, {}", r.invariants.c4, r.invariants.c6).unwrap();
    writeln!(s, "minimal model  {}  (minimal discriminant {})", r.minimal_model, r.minimal_discriminant).unwrap();
    writeln!(s, "conductor      N = {}", r.conductor).unwrap();
    for d in &r.bad_primes {
        writeln!(
            s,
            "  p = {}: {}, Kodaira {}, f = {}, c = {}, a_p = {}",
            d.p,
            reduction_name(d.reduction),
            d.kodaira,
            d.f_p,
            d.c_p,
            d.a_p
        )
        .unwrap();
    }
    let group = if r.torsion.invariants.is_empty() {
        "trivial".to_string()
    } else {
        r.torsion.invariants.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join(" x ")
    };
    write!(s, "torsion        {group} (order {})", r.torsion.order).unwrap();
    Ok(s)
}

#[derive(Serialize)]
struct ValueAt {
    s: String,
    value: MpValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    euler_product: Option<SeriesValue>,
}

#[derive(Serialize)]
struct LvalueReport {
    curve: WeierstrassCurve,
    conductor: u64,
    digits: u32,
    n_max: usize,
    values: Vec<ValueAt>,
}

pub fn lvalue(c: &CurveArgs, f: &Flags) -> Out {
    let curve = parse_curve(c)?;
    let ctx = context(&curve, f)?;
    let mut values = Vec::new();
    for (label, s) in s_values(f, ctx.precision_bits())? {
        let value = ctx.l_value(&s)?;
        let euler_product = match f.pmax {
            Some(p) if s.re.to_f64() > 1.5 => Some(eval_euler(&curve, s.to_c64(), p)?),
            _ => None,
        };
        values.push(ValueAt { s: label, value, euler_product });
    }
    let report = LvalueReport { conductor: ctx.conductor, digits: ctx.digits, n_max: ctx.n_max(), values, curve };
    if f.json {
        return Ok(render(&report));
    }
    let mut out = String::new();
    for v in &report.values {
        writeln!(out, "L(E, {}) = {}", v.s, mp_text(&v.value)).unwrap();
        if let Some(e) = &v.euler_product {
            let value = if e.value.im.abs() <= e.tail_bound {
                format!("{:.15}", e.value.re)
            } else {
                format!("{:.15} {:+.15}i", e.value.re, e.value.im)
            };
            writeln!(out, "  Euler product over {} primes: {value} ± {}", e.terms, bound(e.tail_bound)).unwrap();
        }
    }
    Ok(out.trim_end().to_string())
}

#[derive(Serialize)]
struct LambdaAt {
    s: String,
    lambda: MpValue,
    functional_equation_residual: f64,
}

#[derive(Serialize)]
struct LambdaReport {
    curve: WeierstrassCurve,
    conductor: u64,
    root_number: i32,
    digits: u32,
    n_max: usize,
    values: Vec<LambdaAt>,
}

pub fn lambda(c: &CurveArgs, f: &Flags) -> Out {
    let curve = parse_curve(c)?;
    let ctx = context(&curve, f)?;
    let w = ctx.root_number()?;
    let mut values = Vec::new();
    for (label, s) in s_values(f, ctx.precision_bits())? {
        values.push(LambdaAt { lambda: ctx.lambda(&s)?, functional_equation_residual: ctx.functional_equation_residual(&s)?, s: label });
    }
    let report = LambdaReport { conductor: ctx.conductor, root_number: w, digits: ctx.digits, n_max: ctx.n_max(), values, curve };
    if f.json {
        return Ok(render(&report));
    }
    let mut out = format!("N = {}, w = {:+}\n", report.conductor, report.root_number);
    for v in &report.values {
        writeln!(out, "Λ(E, {}) = {}", v.s, mp_text(&v.lambda)).unwrap();
        writeln!(out, "  |Λ(s) - w Λ(2 - s)| = {}", bound(v.functional_equation_residual)).unwrap();
    }
    Ok(out.trim_end().to_string())
}

#[derive(Serialize)]
struct RankReport {
    curve: WeierstrassCurve,
    conductor: u64,
    #[serde(flatten)]
    rank: AnalyticRank,
    leading_derivative: MpValue,
}

pub fn rank(c: &CurveArgs, f: &Flags) -> Out {
    let curve = parse_curve(c)?;
    let ctx = context(&curve, f)?;
    let rank = ctx.analytic_rank(RANK_TOLERANCE)?;
    let leading_derivative = ctx.l_derivative(rank.rank)?;
    let report = RankReport { conductor: ctx.conductor, rank, leading_derivative, curve };
    if f.json {
        return Ok(render(&report));
    }
    let r = &report.rank;
    Ok(format!(
        "N = {}, w = {:+}\nanalytic rank {} ({})\nL^({})(E, 1) = {}",
        report.conductor,
        r.root_number,
        r.rank,
        r.confidence,
        r.rank,
        mp_text(&report.leading_derivative)
    ))
}

fn estimate_text(e: &hasse_weil::bsd::Estimate) -> String {
    format!("{:.12} ± {}", e.value, bound(e.error))
}

pub fn bsd(c: &CurveArgs, f: &Flags) -> Out {
    let curve = parse_curve(c)?;
    let gens = f.gens.iter().map(|g| CurvePoint::parse(g)).collect::<Result<Vec<_>>>()?;
    let ctx = context(&curve, f)?;
    let report: BsdReport = bsd_report_with(&ctx, &gens, RANK_TOLERANCE)?;
    if f.json {
        return Ok(render(&report));
    }
    let r = &report;
    let mut s = String::new();
    writeln!(s, "curve          {}", r.curve).unwrap();
    writeln!(s, "N = {}, w = {:+}, analytic rank {}", r.conductor, r.w, r.rank_analytic).unwrap();
    writeln!(s, "L^(r)(1)/r!    {}", estimate_text(&r.l_leading)).unwrap();
    writeln!(s, "Omega          {}", estimate_text(&r.omega)).unwrap();
    match &r.regulator {
        Some(e) => writeln!(s, "regulator      {}", estimate_text(e)).unwrap(),
        None => writeln!(s, "regulator      unavailable").unwrap(),
    }
    writeln!(s, "torsion        {}", r.torsion).unwrap();
    let tam: Vec<String> = r.tamagawa.iter().map(|(p, c)| format!("c_{p} = {c}")).collect();
    writeln!(s, "tamagawa       {}", if tam.is_empty() { "none".into() } else { tam.join(", ") }).unwrap();
    match &r.sha_predicted {
        Some(e) => writeln!(s, "Sha predicted  {}", estimate_text(e)).unwrap(),
        None => writeln!(s, "Sha predicted  unavailable").unwrap(),
    }
    write!(s, "flags          {}", r.flags.join(", ")).unwrap();
    Ok(s)
}

#[derive(Serialize)]
struct PrimeCheck {
    p: u64,
    a_p: i64,
    counts: Vec<u64>,
    trace_formula: bool,
    zeta_factorization: bool,
}

#[derive(Serialize)]
struct ZetaReport {
    curve: WeierstrassCurve,
    p_max: u64,
    k_max: u32,
    all_hold: bool,
    primes: Vec<PrimeCheck>,
}

pub fn zetacheck(c: &CurveArgs, f: &Flags) -> Out {
    let curve = parse_curve(c)?;
    let p_max = f.pmax.unwrap_or(20);
    let k_max = f.kmax.unwrap_or(3);
    if k_max == 0 {
        return Err(Error::InvalidInput("--kmax must be at least 1".into()));
    }
    let mut primes = Vec::new();
    for p in hasse_weil::arith::primes_up_to(p_max) {
        if reduction_type(&curve, p)? != Reduction::Good {
            continue;
        }
        let (a_p, counts) = local_counts(&curve, p, k_max)?;
        primes.push(PrimeCheck {
            p,
            a_p,
            trace_formula: trace_formula_holds(p, a_p, &counts),
            zeta_factorization: zeta_factorization_holds(p, a_p, &counts),
            counts,
        });
    }
    let all_hold = primes.iter().all(|c| c.trace_formula && c.zeta_factorization);
    let report = ZetaReport { curve, p_max, k_max, all_hold, primes };
    if f.json {
        return Ok(render(&report));
    }
    let mut s = String::new();
    for c in &report.primes {
        let ok = |b: bool| if b { "ok" } else { "FAIL" };
        writeln!(
            s,
            "p = {:>5}  a_p = {:>4}  N_p^k = {:?}  trace {}  zeta {}",
            c.p,
            c.a_p,
            c.counts,
            ok(c.trace_formula),
            ok(c.zeta_factorization)
        )
        .unwrap();
    }
    write!(
        s,
        "{} good primes up to {}, k <= {}: {}",
        report.primes.len(),
        report.p_max,
        report.k_max,
        if report.all_hold { "all identities hold" } else { "FAILURES" }
    )
    .unwrap();
    Ok(s)
}

/// Input schema for `motive`.
#[derive(Deserialize)]
struct MotiveInput {
    #[serde(default)]
    hodge: Option<HodgeData>,
    #[serde(default)]
    weight: Option<i32>,
    #[serde(default)]
    wd: Vec<WeilDeligneJson>,
}

#[derive(Serialize)]
struct GammaReport {
    gamma: Vec<(String, i32, u32)>,
    gamma_text: String,
}

#[derive(Serialize)]
struct LocalReport {
    p: u64,
    dim: usize,
    local_factor: Vec<String>,
    compatible: bool,
    unramified: bool,
    /// `(k, dim gr_k)` of the monodromy filtration.
    graded_dims: Vec<(i32, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pure: Option<bool>,
}

#[derive(Serialize)]
struct MotiveReport {
    weight: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hodge: Option<HodgeData>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    gamma: Option<GammaReport>,
    local: Vec<LocalReport>,
}

fn gamma_report(h: &HodgeData) -> GammaReport {
    let terms = h.gamma_terms();
    let gamma = terms
        .iter()
        .map(|t: &GammaTerm| (format!("{:?}", t.kind), t.shift, t.exponent))
        .collect();
    let gamma_text = if terms.is_empty() { "1".into() } else { terms.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ") };
    GammaReport { gamma, gamma_text }
}

fn factor_text(p: u64, c: &[String]) -> String {
    let mut terms = Vec::new();
    for (i, x) in c.iter().enumerate() {
        if x == "0" {
            continue;
        }
        let t = match i {
            0 => x.clone(),
            1 => format!("{x}·{p}^-s"),
            _ => format!("{x}·{p}^-{i}s"),
        };
        terms.push(t);
    }
    format!("1/({})", terms.join(" + ").replace("+ -", "- "))
}

pub fn motive(m: &MotiveArgs, f: &Flags) -> Out {
    let input: MotiveInput = parse_json(&read_file(f)?)?;
    let hodge = match input.hodge {
        Some(h) => {
            h.validate()?;
            Some(h.tate_twist(m.twist))
        }
        None => None,
    };
    let weight = input.weight.map(|w| w - 2 * m.twist).or(hodge.as_ref().map(|h| h.weight));
    if m.gamma {
        let h = hodge.ok_or_else(|| Error::InvalidInput("--gamma needs Hodge data in the input".into()))?;
        let g = gamma_report(&h);
        if f.json {
            return Ok(render(&g));
        }
        let triples: Vec<String> = g.gamma.iter().map(|(k, s, e)| format!("({k}, {s}, {e})")).collect();
        return Ok(format!("{}\n[{}]", g.gamma_text, triples.join(", ")));
    }
    let mut local = Vec::new();
    for j in &input.wd {
        let wd: WeilDeligneRep = WeilDeligneRep::from_json(j)?.tate_twist(m.twist);
        let compatible = wd.check_compatibility();
        let factor = if compatible {
            wd.local_factor()?.denominator.iter().map(ToString::to_string).collect()
        } else {
            Vec::new()
        };
        let filt = monodromy_filtration(&wd.n)?;
        let pure = weight.map(|n| {
            if wd.is_unramified() {
                check_weight(&wd, n, WEIGHT_TOLERANCE)
            } else {
                check_purity(&wd, n, WEIGHT_TOLERANCE)
            }
        });
        local.push(LocalReport {
            p: wd.p,
            dim: wd.dim(),
            local_factor: factor,
            compatible,
            unramified: wd.is_unramified(),
            graded_dims: filt.summary().graded_dims,
            pure,
        });
    }
    let report = MotiveReport { weight, gamma: hodge.as_ref().map(gamma_report), hodge, local };
    if f.json {
        return Ok(render(&report));
    }
    let mut s = String::new();
    if let Some(w) = report.weight {
        writeln!(s, "weight {w}").unwrap();
    }
    if let Some(g) = &report.gamma {
        writeln!(s, "L_oo(s) = {}", g.gamma_text).unwrap();
    }
    for l in &report.local {
        let factor = if l.compatible { factor_text(l.p, &l.local_factor) } else { "undefined (phi N phi^-1 != N/p)".into() };
        write!(s, "p = {}: L_p(s) = {factor}, gr dims {:?}", l.p, l.graded_dims).unwrap();
        if let Some(p) = l.pure {
            write!(s, ", {}", if p { "pure" } else { "NOT pure" }).unwrap();
        }
        writeln!(s).unwrap();
    }
    Ok(s.trim_end().to_string())
}

#[derive(Serialize)]
struct SnfReport {
    rows: usize,
    cols: usize,
    #[serde(rename = "U")]
    u: IntegerMatrix,
    #[serde(rename = "D")]
    d: IntegerMatrix,
    #[serde(rename = "V")]
    v: IntegerMatrix,
    invariants: Vec<String>,
    rank: usize,
    torsion_order: String,
}

#[derive(Deserialize)]
struct IndexInput {
    first: QMatrix,
    second: QMatrix,
}

pub fn snf(a: &SnfArgs, f: &Flags) -> Out {
    let text = read_file(f)?;
    if a.index {
        let input: IndexInput = parse_json(&text)?;
        let idx = lattice_index(&LatticePair::new(input.first, input.second)?)?;
        return Ok(if f.json { render(&serde_json::json!({ "index": idx.to_string() })) } else { format!("index {idx}") });
    }
    let m: IntegerMatrix = parse_json(&text)?;
    let s = smith_normal_form(&m);
    let report = SnfReport {
        rows: m.rows(),
        cols: m.cols(),
        invariants: s.invariants().iter().map(ToString::to_string).collect(),
        rank: s.rank(),
        torsion_order: torsion_order(&m).to_string(),
        u: s.u,
        d: s.d,
        v: s.v,
    };
    if f.json {
        return Ok(render(&report));
    }
    Ok(format!(
        "elementary divisors [{}]\nrank {}, torsion order {}\nU = {:?}\nD = {:?}\nV = {:?}",
        report.invariants.join(", "),
        report.rank,
        report.torsion_order,
        report.u,
        report.d,
        report.v
    ))
}
