use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use toric_manin::analytic::{cone_x_function, x_pole_order, x_pole_order_by_face, RationalConeFunction};
use toric_manin::polycore::{ConeData, IntMatrix};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Random simplicial full-dimensional cone of rank n.
fn simplicial(n: usize, rng: &mut impl Rng) -> ConeData {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        if IntMatrix::from_rows(n, &rows).determinant().is_zero() {
            continue;
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        return ConeData::from_i64(n, &refs).unwrap();
    }
}

fn combo(c: &ConeData, coefs: &[BigRational]) -> Vec<BigRational> {
    let n = c.ambient_rank();
    let mut v = vec![BigRational::zero(); n];
    for (g, k) in c.generators().iter().zip(coefs) {
        for (x, y) in v.iter_mut().zip(g) {
            *x += k * BigRational::from_integer(y.clone());
        }
    }
    v
}

#[test]
fn orthant_closed_form() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        let c = ConeData::orthant(n);
        for _ in 0..5 {
            let s: Vec<BigRational> = (0..n).map(|_| q(rng.gen_range(1..40), rng.gen_range(1..9))).collect();
            let expect = s.iter().fold(BigRational::one(), |acc, x| acc / x);
            assert_eq!(cone_x_function(&c, &s).unwrap(), expect);
        }
    }
}

#[test]
fn homogeneity_on_random_simplicial_cones() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for i in 0..20 {
        let n = 1 + i % 4;
        let c = simplicial(n, &mut rng);
        // X lives on the dual side; an interior point of the cone pairs positively with the
        // dual generators.
        let coefs: Vec<BigRational> = (0..n).map(|_| q(rng.gen_range(1..20), rng.gen_range(1..5))).collect();
        let a = combo(&c, &coefs);
        let x = RationalConeFunction::of_cone(&c, &BigInt::one()).unwrap();
        let s = q(rng.gen_range(1..30), rng.gen_range(1..7));
        let scaled: Vec<BigRational> = a.iter().map(|v| v * &s).collect();
        let mut sn = BigRational::one();
        for _ in 0..n {
            sn *= &s;
        }
        assert_eq!(sn * x.eval(&scaled).unwrap(), x.eval(&a).unwrap());
    }
}

#[test]
fn pole_order_matches_face_codimension() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let n = 1 + i % 4;
        let c = simplicial(n, &mut rng);
        let interior = combo(&c, &vec![BigRational::one(); n]);
        let coefs: Vec<BigRational> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { BigRational::zero() } else { q(rng.gen_range(1..9), 1) })
            .collect();
        let ell = combo(&c, &coefs);
        let by_poles = x_pole_order(&c, &ell, &interior).unwrap();
        let by_face = x_pole_order_by_face(&c, &ell).unwrap();
        assert_eq!(by_poles, by_face);
        assert_eq!(by_face, coefs.iter().filter(|x| x.is_zero()).count());
    }
}

#[test]
fn triangulation_independence_on_a_square_pyramid() {
    let c = ConeData::from_i64(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]).unwrap();
    let orders: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 2, 3, 0], [3, 1, 0, 2], [2, 0, 3, 1]];
    let fs: Vec<RationalConeFunction> = orders
        .iter()
        .map(|o| RationalConeFunction::with_order(&c, &BigInt::one(), o).unwrap())
        .collect();
    for s in [[q(1, 3), q(1, 5), q(2, 1)], [q(0, 1), q(0, 1), q(1, 1)], [q(-1, 7), q(1, 2), q(3, 1)]] {
        let v0 = fs[0].eval(&s).unwrap();
        for f in &fs[1..] {
            assert_eq!(f.eval(&s).unwrap(), v0);
        }
    }
    // The dual is also non-simplicial, so both triangulations are nontrivial.
    let d = toric_manin::polycore::dual_cone(&c);
    assert_eq!(d.generators().len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scaling_any_simplicial_cone(seed in any::<u64>(), n in 1usize..=4, num in 1i64..50, den in 1i64..10) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = simplicial(n, &mut rng);
        let a = combo(&c, &vec![BigRational::one(); n]);
        let s = q(num, den);
        let x = RationalConeFunction::of_cone(&c, &BigInt::one()).unwrap();
        let scaled: Vec<BigRational> = a.iter().map(|v| v * &s).collect();
        let mut sn = BigRational::one();
        for _ in 0..n {
            sn *= &s;
        }
        prop_assert_eq!(sn * x.eval(&scaled).unwrap(), x.eval(&a).unwrap());
    }
}
