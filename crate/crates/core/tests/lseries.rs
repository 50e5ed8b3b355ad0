use hasse_weil::arith::{primes_up_to, sigma0};
use hasse_weil::curve::WeierstrassCurve;
use hasse_weil::lseries::*;
use num_complex::Complex64;
use proptest::prelude::*;

const E37: [i64; 5] = [0, 0, 1, -1, 0];
const E11: [i64; 5] = [0, -1, 1, -10, -20];
const E36: [i64; 5] = [0, 0, 0, 0, 1];

fn curve(a: [i64; 5]) -> WeierstrassCurve {
    WeierstrassCurve::from_ints(a).unwrap()
}

// q-expansions from PARI's ellan
const AN_E37: [i64; 60] = [
    1, -2, -3, 2, -2, 6, -1, 0, 6, 4, -5, -6, -2, 2, 6, -4, 0, -12, 0, -4, 3, 10, 2, 0, -1, 4, -9, -2, 6, -12, -4, 8,
    15, 0, 2, 12, -1, 0, 6, 0, -9, -6, 2, -10, -12, -4, -9, 12, -6, 2, 0, -4, 1, 18, 10, 0, 0, -12, 8, 12,
];
const AN_E11: [i64; 60] = [
    1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4, 4, -1, -4, -2, 4, 0, 2, 2, -2, -1, 0, -4, -8, 5, -4, 0, 2, 7, 8, -1,
    4, -2, -4, 3, 0, -4, 0, -8, -4, -6, 2, -2, 2, 8, 4, -3, 8, 2, 8, -6, -10, 1, 0, 0, 0, 5, -2,
];
const AN_E36: [i64; 60] = [
    1, 0, 0, 0, 0, 0, -4, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 8, 0, 0, 0, 0, 0, -5, 0, 0, 0, 0, 0, -4, 0, 0, 0, 0, 0,
    -10, 0, 0, 0, 0, 0, 8, 0, 0, 0, 0, 0, 9, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
];

#[test]
fn coefficients_match_reference_expansions() {
    for (a, want) in [(E37, AN_E37), (E11, AN_E11), (E36, AN_E36)] {
        let c = dirichlet_coefficients(&curve(a), 60).unwrap();
        assert_eq!(c.as_slice(), &want[..], "{a:?}");
    }
}

#[test]
fn ramanujan_bound_holds_exactly() {
    for a in [E37, E11, E36] {
        let c = dirichlet_coefficients(&curve(a), 20_000).unwrap();
        for n in 1..=c.n_max() {
            let an = c.get(n) as i128;
            let d = sigma0(n as u64) as i128;
            assert!(an * an <= d * d * n as i128, "{a:?} n={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplicative_on_coprime_pairs(m in 1u64..=10_000, n in 1u64..=10_000) {
        fn gcd(a: u64, b: u64) -> u64 { if b == 0 { a } else { gcd(b, a % b) } }
        prop_assume!(gcd(m, n) == 1);
        let e = curve(E37);
        let table = table_e37();
        let direct = coefficient(&e, m * n).unwrap();
        prop_assert_eq!(direct, table.get(m as usize) * table.get(n as usize));
    }
}

fn table_e37() -> &'static DirichletCoefficients {
    use std::sync::OnceLock;
    static T: OnceLock<DirichletCoefficients> = OnceLock::new();
    T.get_or_init(|| dirichlet_coefficients(&curve(E37), 10_000).unwrap())
}

#[test]
fn euler_and_dirichlet_agree_at_two_and_a_half() {
    let e = curve(E37);
    let s = Complex64::new(2.5, 0.0);
    let eu = eval_euler(&e, s, 100_000).unwrap();
    let di = eval_dirichlet(&e, s, 100_000).unwrap();
    assert!((eu.value - di.value).norm() < 1e-6);
    // PARI lfun(E37, 5/2)
    let oracle = 0.5517923380726109006;
    assert!((di.value.re - oracle).abs() <= di.tail_bound);
    assert!((eu.value.re - oracle).abs() <= eu.tail_bound);
    assert!((eu.value.re - oracle).abs() < 1e-8);
}

#[test]
fn agreement_improves_with_truncation() {
    let e = curve(E37);
    let s = Complex64::new(2.5, 0.0);
    let gaps: Vec<f64> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let eu = eval_euler(&e, s, n).unwrap().value;
            let di = eval_dirichlet(&e, s, n as usize).unwrap().value;
            (eu - di).norm()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn dirichlet_values_against_reference() {
    // PARI lfun at s = 2, 5/2, 3
    let cases = [
        (E37, [0.3815754082607112113, 0.5517923380726109006, 0.6834342901105152958]),
        (E11, [0.5460480362150135184, 0.6617508977092972548, 0.7527231473890513439]),
        (E36, [0.9400130073882257815, 0.9750546294922916640, 0.9899295170494334588]),
    ];
    for (a, want) in cases {
        let c = dirichlet_coefficients(&curve(a), 50_000).unwrap();
        for (s, w) in [2.0, 2.5, 3.0].into_iter().zip(want) {
            let v = eval_dirichlet_coeffs(&c, Complex64::new(s, 0.0));
            assert!((v.value.re - w).abs() <= v.tail_bound, "{a:?} s={s}");
            assert!(v.value.im.abs() < 1e-14);
        }
    }
}

#[test]
fn closure_at_small_good_primes() {
    for a in [E37, E11, E36] {
        let e = curve(a);
        for p in primes_up_to(20) {
            match trace_formula_check(&e, p, 3) {
                Ok(ok) => {
                    assert!(ok, "{a:?} p={p}");
                    assert!(zeta_factorization_check(&e, p, 3).unwrap(), "{a:?} p={p}");
                }
                Err(hasse_weil::Error::BadReduction(_)) => {
                    assert!(zeta_factorization_check(&e, p, 3).is_err());
                }
                Err(err) => panic!("{err}"),
            }
        }
    }
}

#[test]
fn local_factors_from_bad_primes() {
    let e = curve(E11);
    let (factors, bad) = euler_factors(&e, 50).unwrap();
    assert_eq!(bad.len(), 1);
    let f11 = factors.iter().find(|f| f.p == 11).unwrap();
    assert_eq!(f11.to_string(), "1 - T");
    let f2 = factors.iter().find(|f| f.p == 2).unwrap();
    assert_eq!(f2.to_string(), "1 + 2T + 2T^2");
}
