use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use toric_manin::clemens::{adelic_picard, analytic_obstruction, clemens_complex, pic_u_rank, AdelicFaceSpec};
use toric_manin::fan::{PlaceDoc, PlaceKind};
use toric_manin::fixtures;
use toric_manin::invariants::{fujita_a, fujita_a_facets, predict_growth};
use toric_manin::picard::{group_h1, small_groups};
use toric_manin::polycore::IntMatrix;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn blowup_face_suite() {
    let f = fixtures::fan("bl2p2").unwrap().fan;
    let boundary = [2, 3, 4];
    let faces: Vec<Vec<usize>> = clemens_complex(&f, &boundary)
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| c.rays)
        .collect();
    assert_eq!(faces, vec![vec![2], vec![3], vec![4], vec![2, 3], vec![3, 4]]);
    let (ey, d, ex) = (2, 3, 4);
    for (face, obstructed) in [(vec![ex], true), (vec![ey], true), (vec![d], false), (vec![ex, d], false), (vec![ey, d], false)] {
        let spec = AdelicFaceSpec::single(PlaceKind::Real, &face);
        let rep = analytic_obstruction(&f, &boundary, &spec).unwrap();
        assert_eq!(rep.obstructed, obstructed, "{face:?}");
        assert_eq!(rep.witness.is_some(), obstructed);
        let p = predict_growth(&f, &boundary, &spec, None).unwrap();
        if !obstructed {
            let expect_b = if face.len() == 2 { 2 } else { 1 };
            assert_eq!((p.a.as_deref(), p.b), (Some("1"), Some(expect_b)), "{face:?}");
        }
    }
}

/// All (fan, boundary, face) combinations over the fixture gallery where U has no
/// nonconstant units.
fn rank_cases() -> Vec<(String, Vec<usize>, AdelicFaceSpec)> {
    let mut out = Vec::new();
    for (name, _) in fixtures::FANS {
        let f = fixtures::fan(name).unwrap().fan;
        let r = f.ray_count();
        for mask in 0u32..(1 << r) {
            let boundary: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
            if pic_u_rank(&f, &boundary).is_err() {
                continue;
            }
            let faces = clemens_complex(&f, &boundary);
            for face in &faces {
                out.push((name.to_string(), boundary.clone(), AdelicFaceSpec::single(PlaceKind::Real, &face.rays)));
            }
            if let (Some(a), Some(b)) = (faces.last(), faces.get(1)) {
                out.push((
                    name.to_string(),
                    boundary.clone(),
                    AdelicFaceSpec {
                        places: vec![
                            PlaceDoc { name: "v1".into(), kind: PlaceKind::Real, face_rays: a.rays.clone() },
                            PlaceDoc { name: "v2".into(), kind: PlaceKind::Complex, face_rays: b.rays.clone() },
                        ],
                    },
                ));
            }
        }
    }
    out
}

#[test]
fn rank_formula() {
    let cases = rank_cases();
    assert!(cases.len() >= 15, "{}", cases.len());
    for (name, boundary, spec) in &cases {
        let f = fixtures::fan(name).unwrap().fan;
        let direct = adelic_picard(&f, boundary, spec).unwrap().free_rank() as isize;
        let formula = pic_u_rank(&f, boundary).unwrap() as isize + spec.dim() + 1;
        assert_eq!(direct, formula, "{name} {boundary:?} {spec:?}");
    }
}

#[test]
fn permutation_modules_have_no_h1() {
    let mut checked = 0;
    for g in small_groups().iter().filter(|g| g.order() <= 8) {
        let gens: Vec<usize> = (0..g.order()).collect();
        for h in g.subgroups() {
            assert!(group_h1(g, &gens, &g.coset_module(&h)).unwrap().is_empty(), "{} {h:?}", g.name);
            checked += 1;
        }
    }
    assert!(checked > 30);
    let c2 = small_groups().into_iter().find(|g| g.name == "C2").unwrap();
    let sign = IntMatrix::from_i64(&[&[-1]]);
    assert_eq!(group_h1(&c2, &[1], &[sign]).unwrap(), vec![BigInt::from(2)]);
}

#[test]
fn product_of_lines_with_unbalanced_class() {
    let f = fixtures::fan("p1xp1").unwrap().fan;
    let p = predict_growth(&f, &[], &AdelicFaceSpec::empty(), Some(&ints(&[2, 0, 1, 0]))).unwrap();
    assert_eq!((p.a.as_deref(), p.b, p.rigid), (Some("2"), Some(1), Some(false)));
}

#[test]
fn anticanonical_on_every_complete_fixture() {
    for (name, _) in fixtures::FANS {
        let file = fixtures::fan(name).unwrap();
        if !file.fan.is_complete() {
            continue;
        }
        let spec = AdelicFaceSpec { places: file.places.clone() };
        let p = predict_growth(&file.fan, &file.boundary_rays, &spec, None).unwrap();
        assert_eq!(p.a.as_deref(), Some("1"), "{name}");
        assert_eq!(p.b, Some(p.rank), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fujita_scales_inversely(i in 1i64..6, j in 1i64..6, k in 1i64..5) {
        let file = fixtures::fan("bl2p2").unwrap();
        let spec = AdelicFaceSpec { places: file.places.clone() };
        let ap = adelic_picard(&file.fan, &file.boundary_rays, &spec).unwrap();
        let l = ap.class_of_i64(&[i, j, 0, 0, 0]).unwrap();
        let kl = ap.class_of_i64(&[k * i, k * j, 0, 0, 0]).unwrap();
        let a = fujita_a(&ap, &l).unwrap();
        prop_assert!(a > BigRational::zero());
        prop_assert_eq!(fujita_a(&ap, &kl).unwrap(), &a / BigRational::from_integer(BigInt::from(k)));
        prop_assert_eq!(fujita_a_facets(&ap, &l).unwrap(), a);
    }
}
