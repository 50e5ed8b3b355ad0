use hasse_weil::lattice::*;
use hasse_weil::realization::QMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

mod common;
use common::*;

#[test]
fn random_smith_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a1f);
    for trial in 0..100 {
        let a = random_matrix(&mut rng, 6, 9);
        let s = smith_normal_form(&a);
        assert!(s.u.is_unimodular() && s.v.is_unimodular(), "trial {trial}");
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d, "trial {trial}");
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
        let inv = s.invariants();
        assert!(inv.iter().all(|x| *x >= 0));
        for w in inv.windows(2) {
            assert!(w[1].is_divisible(&w[0]) || w[0] == 0 && w[1] == 0, "trial {trial}: {inv:?}");
        }
        if a.rows() == a.cols() {
            let prod: Integer = inv.iter().product();
            assert_eq!(prod, a.determinant().abs(), "trial {trial}");
        }
        assert_eq!(s.rank(), a.to_rational().rank());
    }
}

#[test]
fn torsion_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x70c5);
    for trial in 0..150 {
        let a = random_matrix(&mut rng, 3, 4);
        assert_eq!(torsion_order(&a), torsion_by_enumeration(&a), "trial {trial}: {a:?}");
    }
    // Z^2 / (2Z x 3Z) has 6 elements
    assert_eq!(torsion_by_enumeration(&IntegerMatrix::diagonal(&[2, 3])), 6);
    assert_eq!(torsion_by_enumeration(&IntegerMatrix::diagonal(&[0, 3])), 3);
}

fn qmat(entries: &[i64], n: usize, den: i64) -> QMatrix {
    let rows = entries.chunks(n).map(|r| r.iter().map(|&x| Rational::from((x, den))).collect()).collect();
    QMatrix::from_rows(rows).unwrap()
}

#[test]
fn index_of_sublattice_is_group_index() {
    // L2 = A L1 for an integer matrix A: the index is |det A|
    let l1 = qmat(&[1, 1, 0, 0, 1, 1, 1, 0, 2], 3, 2);
    let a = qmat(&[2, 0, 1, 0, 3, 0, 0, 1, 1], 3, 1);
    let l2 = a.mul(&l1);
    let idx = lattice_index(&LatticePair::new(l1, l2).unwrap()).unwrap();
    assert_eq!(idx, Rational::from(a.determinant()).abs());
    assert_eq!(idx, 6);
}

proptest! {
    #[test]
    fn index_is_multiplicative(
        a in proptest::collection::vec(-5i64..=5, 4),
        b in proptest::collection::vec(-5i64..=5, 4),
        c in proptest::collection::vec(-5i64..=5, 4),
        da in 1i64..=4, db in 1i64..=4, dc in 1i64..=4,
    ) {
        let (l1, l2, l3) = (qmat(&a, 2, da), qmat(&b, 2, db), qmat(&c, 2, dc));
        prop_assume!(l1.determinant() != 0 && l2.determinant() != 0 && l3.determinant() != 0);
        let i13 = lattice_index(&LatticePair::new(l1.clone(), l3.clone()).unwrap()).unwrap();
        let i12 = lattice_index(&LatticePair::new(l1, l2.clone()).unwrap()).unwrap();
        let i23 = lattice_index(&LatticePair::new(l2, l3).unwrap()).unwrap();
        prop_assert!(i13 > 0);
        prop_assert_eq!(i13, i12 * i23);
    }

    #[test]
    fn snf_of_diagonal_is_gcd_lcm(x in -30i64..=30, y in -30i64..=30) {
        let s = smith_normal_form(&IntegerMatrix::diagonal(&[x, y]));
        let (x, y) = (Integer::from(x), Integer::from(y));
        let g = x.clone().gcd(&y);
        let l = x.lcm(&y);
        prop_assert_eq!(s.invariants(), vec![g, l]);
    }
}
