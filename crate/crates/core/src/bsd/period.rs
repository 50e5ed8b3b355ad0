//! The real period `Omega = int_{E(R)} |dx / (2y + a1 x + a3)|`.
//!
//! With `f(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 = (2y + a1 x + a3)^2`, each real
//! component contributes one full real period. The AGM gives
//! `pi / AGM(sqrt(e1 - e3), sqrt(e1 - e2))` per component; quadrature
//! integrates each component separately after substitutions that remove the
//! endpoint singularities.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::curve::{minimal_model, WeierstrassCurve};
use crate::{Error, Result};

const PREC: u32 = 192;

/// Agreement demanded between the two methods.
pub const PERIOD_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct RealPeriod {
    /// Integral over all of `E(R)`.
    pub omega: f64,
    /// Number of real components (2 when the discriminant is positive).
    pub components: u32,
    pub agm: f64,
    pub quadrature: f64,
    pub error_bound: f64,
}

/// Roots of `f`, as `Real([e1 > e2 > e3])` or `Complex(e1, u, v)` with the
/// conjugate pair `u +- iv`.
#[derive(Clone, Debug)]
enum Roots {
    Real([Float; 3]),
    Complex(Float, Float, Float),
}

fn cubic_roots(curve: &WeierstrassCurve) -> Result<Roots> {
    let p = PREC;
    let [b2, b4, b6, _] = curve.b_invariants();
    let fl = |r: &rug::Rational| Float::with_val(p, r);
    // f / 4 = x^3 + B x^2 + C x + D
    let big_b = fl(&b2) / 4u32;
    let c = fl(&b4) / 2u32;
    let d = fl(&b6) / 4u32;
    // x = t - B/3: t^3 + P t + Q
    let b3 = Float::with_val(p, &big_b / 3u32);
    let pp = Float::with_val(p, &c - Float::with_val(p, big_b.square_ref()) / 3u32);
    let qq = Float::with_val(p, big_b.clone().pow(3u32) * 2u32 / 27u32) - Float::with_val(p, &big_b * &c) / 3u32 + &d;
    let disc = curve.discriminant();
    let polish = |mut x: Float| {
        for _ in 0..4 {
            let fx = Float::with_val(p, x.clone().pow(3u32)) + Float::with_val(p, &big_b * x.clone().square())
                + Float::with_val(p, &c * &x)
                + &d;
            let dfx = Float::with_val(p, x.clone().square() * 3u32) + Float::with_val(p, &big_b * &x) * 2u32 + &c;
            if dfx.is_zero() {
                break;
            }
            x -= fx / dfx;
        }
        x
    };
    if disc > 0 {
        let r = ((-Float::with_val(p, &pp)) / 3u32).sqrt();
        let arg = Float::with_val(p, &qq * 3u32) / Float::with_val(p, &pp * 2u32) * Float::with_val(p, Float::with_val(p, -3) / &pp).sqrt();
        let arg = arg.clamp(&-1, &1);
        let theta = arg.acos() / 3u32;
        let two_pi_3 = Float::with_val(p, Constant::Pi) * 2u32 / 3u32;
        let mut roots: Vec<Float> = (0..3)
            .map(|k| {
                let ang = Float::with_val(p, &theta - Float::with_val(p, &two_pi_3 * k as u32));
                polish(Float::with_val(p, &r * 2u32) * ang.cos() - &b3)
            })
            .collect();
        roots.sort_by(|a, b| b.partial_cmp(a).expect("finite roots"));
        let [e1, e2, e3]: [Float; 3] = roots.try_into().expect("three roots");
        if e1 <= e2 || e2 <= e3 {
            return Err(Error::PrecisionExhausted("real roots of the period cubic are not separated".into()));
        }
        Ok(Roots::Real([e1, e2, e3]))
    } else {
        let t = if pp.is_zero() {
            Float::with_val(p, -&qq).cbrt()
        } else if pp < 0 {
            let r = ((-Float::with_val(p, &pp)) / 3u32).sqrt();
            let arg = Float::with_val(p, qq.abs_ref()) * 3u32 / ((-Float::with_val(p, &pp)) * 2u32) / &r;
            let t = Float::with_val(p, &r * 2u32) * (arg.acosh() / 3u32).cosh();
            if qq > 0 {
                -t
            } else {
                t
            }
        } else {
            let r = Float::with_val(p, &pp / 3u32).sqrt();
            let arg = Float::with_val(p, &qq * 3u32) / Float::with_val(p, &pp * 2u32) / &r;
            -Float::with_val(p, &r * 2u32) * (arg.asinh() / 3u32).sinh()
        };
        let e1 = polish(t - &b3);
        // deflate: x^2 + (B + e1) x + (e1^2 + B e1 + C)
        let u = -Float::with_val(p, &big_b + &e1) / 2u32;
        let k = Float::with_val(p, e1.square_ref()) + Float::with_val(p, &big_b * &e1) + &c;
        let v2 = k - Float::with_val(p, u.square_ref());
        if v2 <= 0 {
            return Err(Error::PrecisionExhausted("complex roots of the period cubic collapsed".into()));
        }
        Ok(Roots::Complex(e1, u, v2.sqrt()))
    }
}

fn agm(a: &Float, b: &Float) -> Float {
    let p = a.prec();
    let (mut a, mut b) = (a.clone(), b.clone());
    let eps = Float::with_val(p, Float::u_exp(1, -(p as i32) + 4));
    for _ in 0..200 {
        let na = Float::with_val(p, &a + &b) / 2u32;
        let nb = Float::with_val(p, &a * &b).sqrt();
        a = na;
        b = nb;
        if Float::with_val(p, &a - &b).abs() <= Float::with_val(p, &eps * &a) {
            break;
        }
    }
    a
}

/// Period per component by the AGM.
fn agm_period(roots: &Roots) -> Float {
    let p = PREC;
    let pi = Float::with_val(p, Constant::Pi);
    match roots {
        Roots::Real([e1, e2, e3]) => {
            let a = Float::with_val(p, e1 - e3).sqrt();
            let b = Float::with_val(p, e1 - e2).sqrt();
            pi / agm(&a, &b)
        }
        Roots::Complex(e1, u, v) => {
            // sqrt(e1 - e2) and its conjugate: one AGM step gives (Re, modulus)
            let dx = Float::with_val(p, e1 - u);
            let modulus = Float::with_val(p, dx.hypot_ref(v));
            let re = (Float::with_val(p, &modulus + &dx) / 2u32).sqrt();
            pi / agm(&re, &modulus.sqrt())
        }
    }
}

/// Adaptive Gauss–Kronrod (7, 15) on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const XK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
    fn rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut k = WK[7] * fc;
        let mut g = WG[3] * fc;
        for i in 0..7 {
            let x = h * XK[i];
            let s = f(c - x) + f(c + x);
            k += WK[i] * s;
            if i % 2 == 1 {
                g += WG[i / 2] * s;
            }
        }
        (k * h, ((k - g) * h).abs())
    }
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (v, err) = rule(f, lo, hi);
        if err <= t || depth >= 50 {
            if depth >= 50 && err > t {
                return Err(Error::PrecisionExhausted("adaptive quadrature did not converge".into()));
            }
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, t / 2.0, depth + 1));
            stack.push((mid, hi, t / 2.0, depth + 1));
        }
    }
    Ok(total)
}

/// `int_0^oo g(t) dt` via `t = s / (1 - s)`.
fn integrate_half_line<F: Fn(f64) -> f64>(g: F, tol: f64) -> Result<f64> {
    let h = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let t = s / (1.0 - s);
        g(t) / ((1.0 - s) * (1.0 - s))
    };
    integrate(&h, 0.0, 1.0, tol)
}

/// Integral over `E(R)`, one component at a time.
fn quadrature_total(roots: &Roots) -> Result<f64> {
    let tol = 1e-14;
    match roots {
        Roots::Real([e1, e2, e3]) => {
            let d2 = Float::with_val(PREC, e1 - e2).to_f64();
            let d3 = Float::with_val(PREC, e1 - e3).to_f64();
            // identity component: x = e1 + t^2
            let scale = d2.sqrt();
            let unbounded = integrate_half_line(
                |t| {
                    let t = t * scale;
                    2.0 * scale / ((t * t + d2) * (t * t + d3)).sqrt()
                },
                tol,
            )?;
            // oval: x = e3 + (e2 - e3) sin^2 phi
            let span = d3 - d2;
            let oval = integrate(
                &|phi: f64| {
                    let s = phi.sin();
                    2.0 / (d3 - span * s * s).sqrt()
                },
                0.0,
                std::f64::consts::FRAC_PI_2,
                tol,
            )?;
            Ok(unbounded + oval)
        }
        Roots::Complex(e1, u, v) => {
            let a = Float::with_val(PREC, e1 - u).to_f64();
            let v = v.to_f64();
            let scale = a.hypot(v).sqrt();
            integrate_half_line(
                |t| {
                    let t = t * scale;
                    let q = t * t + a;
                    2.0 * scale / (q * q + v * v).sqrt()
                },
                tol,
            )
        }
    }
}

/// Real period of the model as given (no minimisation).
pub fn period_of_model(curve: &WeierstrassCurve) -> Result<RealPeriod> {
    let roots = cubic_roots(curve)?;
    let components = if matches!(roots, Roots::Real(_)) { 2 } else { 1 };
    let agm_total = agm_period(&roots).to_f64() * components as f64;
    let quad = quadrature_total(&roots)?;
    let gap = (agm_total - quad).abs();
    if gap > PERIOD_TOLERANCE * agm_total.max(1.0) {
        return Err(Error::PrecisionExhausted(format!("AGM ({agm_total}) and quadrature ({quad}) periods disagree")));
    }
    Ok(RealPeriod {
        omega: agm_total,
        components,
        agm: agm_total,
        quadrature: quad,
        error_bound: gap.max(agm_total * 1e-15),
    })
}

/// Real period of the minimal model, over all real components.
pub fn real_period(curve: &WeierstrassCurve) -> Result<RealPeriod> {
    let (min, _) = minimal_model(curve)?;
    period_of_model(&min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega(a: [i64; 5]) -> RealPeriod {
        real_period(&WeierstrassCurve::from_ints(a).unwrap()).unwrap()
    }

    #[test]
    fn one_component() {
        // PARI E.omega[1]
        let w = omega([0, -1, 1, -10, -20]);
        assert_eq!(w.components, 1);
        assert!((w.omega - 1.2692093042795534217).abs() < 1e-13);
        assert!((w.agm - w.quadrature).abs() < 1e-12);
    }

    #[test]
    fn two_components() {
        let w = omega([0, 0, 1, -1, 0]);
        assert_eq!(w.components, 2);
        assert!((w.omega - 2.0 * 2.993458646231959630).abs() < 1e-13);
        assert!((w.agm - w.quadrature).abs() < 1e-12);
    }

    #[test]
    fn gauss_kronrod_polynomial() {
        let v = integrate(&|x: f64| x.powi(5) - 3.0 * x, -1.0, 2.0, 1e-14).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 4.5)).abs() < 1e-13);
    }
}
