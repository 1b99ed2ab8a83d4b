use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use toric_manin::polycore::matrix::to_rational;
use toric_manin::polycore::{dual_cone, hermite_normal_form, smith_normal_form, ConeData, IntMatrix};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-9i64..=9, cols), rows)
        .prop_map(move |r| IntMatrix::from_rows(cols, &r))
}

fn same_row_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    hermite_normal_form(a) == hermite_normal_form(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_identities((r, c) in (1usize..=4, 1usize..=4), seed in any::<u64>()) {
        let m = {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            IntMatrix::from_rows(c, &rows)
        };
        let snf = smith_normal_form(&m);
        prop_assert_eq!(&(&snf.u * &m) * &snf.v, snf.s.clone());
        prop_assert!(snf.u.determinant().abs().is_one());
        prop_assert!(snf.v.determinant().abs().is_one());
        let d = snf.invariant_factors();
        for i in 0..snf.s.rows() {
            for j in 0..snf.s.cols() {
                if i != j {
                    prop_assert!(snf.s.get(i, j).is_zero());
                }
            }
        }
        for w in d.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert!(d.iter().all(|x| x.is_positive()));
    }

    #[test]
    fn hermite_form_is_canonical(m in matrix(3, 3), k in -3i64..=3) {
        // Adding a multiple of one row to another keeps the row lattice.
        let mut rows: Vec<Vec<BigInt>> = (0..3).map(|i| m.row(i).to_vec()).collect();
        let add: Vec<BigInt> = rows[1].iter().map(|x| x * k).collect();
        for (x, y) in rows[0].iter_mut().zip(add) {
            *x += y;
        }
        let n = IntMatrix::from_rows(3, &rows);
        prop_assert!(same_row_lattice(&m, &n));
    }

    #[test]
    fn dual_of_dual(gens in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 3..7)) {
        let g: Vec<Vec<BigInt>> = gens.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        prop_assume!(g.iter().all(|v| v.iter().any(|x| !x.is_zero())));
        let c = ConeData::new(3, g.clone()).unwrap();
        prop_assume!(c.is_full_dimensional() && c.is_pointed());
        let dd = dual_cone(&dual_cone(&c));
        for v in &g {
            prop_assert!(dd.contains(&to_rational(v)));
        }
        for v in dd.generators() {
            prop_assert!(c.contains(&to_rational(v)));
        }
    }
}

#[test]
fn orthant_is_self_dual() {
    let c = ConeData::orthant(3);
    let d = dual_cone(&c);
    let e: Vec<BigRational> = vec![BigRational::one(), BigRational::zero(), BigRational::zero()];
    assert!(d.contains(&e));
    assert_eq!(d.generators().len(), 3);
}
