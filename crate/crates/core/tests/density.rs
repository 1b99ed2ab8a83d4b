use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use toric_manin::analytic::{denef_density, euler_product, LocalDensityQuery};
use toric_manin::fan::Fan;
use toric_manin::fixtures;

const TRUNCATION: u32 = 60;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sum over valuation vectors k with entries in 0..=TRUNCATION whose support is a cone of the
/// fan of q^(-sum_rho k_rho (2 + z_rho)).
fn truncated_series(fan: &Fan, p: u64, z: f64) -> f64 {
    let w = (p as f64).powf(-(2.0 + z));
    let mut total = 0.0;
    for cone in fan.cones() {
        let mut acc = 0.0;
        let mut ks = vec![1u32; cone.len()];
        loop {
            let deg: u32 = ks.iter().sum();
            acc += w.powi(deg as i32);
            let mut i = 0;
            loop {
                if i == ks.len() {
                    break;
                }
                if ks[i] < TRUNCATION {
                    ks[i] += 1;
                    break;
                }
                ks[i] = 1;
                i += 1;
            }
            if i == ks.len() {
                break;
            }
        }
        total += acc;
    }
    total
}

#[test]
fn closed_form_matches_truncated_series() {
    for name in ["p1", "p2", "a2", "bl2p2"] {
        let fan = fixtures::fan(name).unwrap().fan;
        for p in [2u64, 3, 5] {
            for (zn, zd) in [(-1, 2), (0, 1), (1, 2)] {
                let z = q(zn, zd);
                let qry = LocalDensityQuery {
                    fan: fan.clone(),
                    action: None,
                    q: p,
                    z: vec![z; fan.ray_count()],
                };
                let closed = denef_density(&qry).unwrap().to_f64();
                let series = truncated_series(&fan, p, zn as f64 / zd as f64);
                assert!(
                    (closed - series).abs() < 1e-12,
                    "{name} p={p} z={zn}/{zd}: {closed} vs {series}"
                );
            }
        }
    }
}

#[test]
fn projective_line_sums_exactly() {
    let fan = fixtures::fan("p1").unwrap().fan;
    for p in [2u64, 3, 5, 7] {
        for z in [q(0, 1), q(1, 1), q(-1, 1)] {
            // Empty cone plus two geometric series sum_{k >= 1} x^k, x = p^(-(2 + z)).
            let e: u32 = (BigRational::from_integer(BigInt::from(2)) + &z).to_integer().try_into().unwrap();
            let x = BigRational::one() / Pow::pow(BigRational::from_integer(BigInt::from(p)), e);
            let series = BigRational::one() + BigRational::from_integer(BigInt::from(2)) * &x / (BigRational::one() - &x);
            let qry = LocalDensityQuery {
                fan: fan.clone(),
                action: None,
                q: p,
                z: vec![z.clone(); 2],
            };
            assert_eq!(denef_density(&qry).unwrap().exact().unwrap(), series);
        }
    }
}

#[test]
fn euler_product_tail_is_stable() {
    let fan = fixtures::fan("p2").unwrap().fan;
    let z = vec![BigRational::zero(); 3];
    let a = euler_product(&fan, None, &z, 2000).unwrap();
    let b = euler_product(&fan, None, &z, 4000).unwrap();
    assert!((a.normalized - b.normalized).abs() < 1e-6, "{a:?} {b:?}");
    assert!(euler_product(&fan, None, &[q(-1, 2), q(0, 1), q(0, 1)], 10).is_err());
}
