//! Fujita a-invariant, b-invariant, adjoint decomposition and growth predictions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::clemens::{adelic_picard, analytic_obstruction, archimedean_constant, AdelicFaceSpec, AdelicPicard, ArchimedeanConstant, ClemensError, Generator};
use crate::fan::Fan;
use crate::picard::DivisorClass;
use crate::polycore::lp::{feasible_point, maximize, minimize, LpOutcome};
use crate::polycore::matrix::{dot_rat, rank, to_rational};
use crate::polycore::{minimal_face_containing, ConeData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("the class is not big")]
    NotBig,
    #[error("the effective cone is not pointed (obstructed face)")]
    NotPointed,
    #[error("the effective cone is trivial; the infimum is not finite")]
    Degenerate,
    #[error("the adjoint class is not effective")]
    NotEffective,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Clemens(#[from] ClemensError),
}

fn axpy(k: &[BigRational], t: &BigRational, l: &[BigRational]) -> Vec<BigRational> {
    k.iter().zip(l).map(|(a, b)| a + t * b).collect()
}

/// inf { t : K + t L in Eff }, by exact linear programming over the generators of Eff.
pub fn fujita_a(ap: &AdelicPicard, l: &DivisorClass) -> Result<BigRational, InvariantError> {
    let eff = &ap.eff;
    if eff.ambient_rank() == 0 {
        return Err(InvariantError::Degenerate);
    }
    if !eff.is_pointed() {
        return Err(InvariantError::NotPointed);
    }
    let lv = l.free_rational();
    if !eff.contains_in_interior(&lv) {
        return Err(InvariantError::NotBig);
    }
    let kv = ap.k_class.free_rational();
    let gens = eff.generators();
    let f = eff.ambient_rank();
    let nvar = gens.len() + 2;
    // sum c_i g_i - (t+ - t-) L = K
    let rows: Vec<Vec<BigRational>> = (0..f)
        .map(|k| {
            let mut row: Vec<BigRational> = gens.iter().map(|g| BigRational::from_integer(g[k].clone())).collect();
            row.push(-lv[k].clone());
            row.push(lv[k].clone());
            row
        })
        .collect();
    let mut cost = vec![BigRational::zero(); nvar];
    cost[nvar - 2] = BigRational::one();
    cost[nvar - 1] = -BigRational::one();
    let a = match minimize(&rows, &kv, &cost) {
        LpOutcome::Optimal { value, .. } => value,
        LpOutcome::Unbounded => return Err(InvariantError::Inconsistent("unbounded with a pointed cone".into())),
        LpOutcome::Infeasible => return Err(InvariantError::Inconsistent("infeasible with a big class".into())),
    };
    let at = axpy(&kv, &a, &lv);
    let below = axpy(&kv, &(&a - BigRational::new(BigInt::one(), BigInt::from(1000))), &lv);
    if !eff.contains(&at) || eff.contains(&below) {
        return Err(InvariantError::Inconsistent("a fails the membership checks".into()));
    }
    Ok(a)
}

/// The same infimum read off the facet inequalities: max_j -f_j(K) / f_j(L).
pub fn fujita_a_facets(ap: &AdelicPicard, l: &DivisorClass) -> Result<BigRational, InvariantError> {
    let eff = &ap.eff;
    if eff.ambient_rank() == 0 {
        return Err(InvariantError::Degenerate);
    }
    if !eff.is_pointed() {
        return Err(InvariantError::NotPointed);
    }
    let lv = l.free_rational();
    if !eff.contains_in_interior(&lv) {
        return Err(InvariantError::NotBig);
    }
    let kv = ap.k_class.free_rational();
    let h = eff.h_rep();
    h.inequalities
        .iter()
        .map(|fj| -dot_rat(&kv, fj) / dot_rat(&lv, fj))
        .max()
        .ok_or(InvariantError::Degenerate)
}

fn adjoint_vector(ap: &AdelicPicard, l: &DivisorClass, a: &BigRational) -> Vec<BigRational> {
    axpy(&ap.k_class.free_rational(), a, &l.free_rational())
}

/// Codimension of the minimal face of Eff containing K + a L.
pub fn b_invariant(ap: &AdelicPicard, l: &DivisorClass, a: &BigRational) -> Result<usize, InvariantError> {
    let adj = adjoint_vector(ap, l, a);
    let face = minimal_face_containing(&ap.eff, &adj).map_err(|_| InvariantError::NotEffective)?;
    Ok(face.codim)
}

#[derive(Debug, Clone)]
pub struct AdjointData {
    pub a: BigRational,
    /// Free coordinates of K + a L.
    pub adjoint_class: Vec<BigRational>,
    pub minimal_face: ConeData,
    pub b: usize,
    /// Non-boundary rays whose classes lie in the minimal face.
    pub d_adj: Vec<usize>,
    /// Per place, face rays whose classes lie in the minimal face.
    pub a_adj: Vec<Vec<usize>>,
    pub e: Vec<usize>,
    pub b_v: Vec<Vec<usize>>,
    pub rigid: bool,
    pub decomposition_polytope_dim: usize,
    /// A nonnegative decomposition of the adjoint class over the generators.
    pub decomposition: Vec<(Generator, BigRational)>,
}

/// Splits the generators by the minimal face of the adjoint class and decides rigidity from
/// the dimension of {c >= 0 : sum c_g [g] = K + a L}.
pub fn adjoint_decomposition(ap: &AdelicPicard, l: &DivisorClass, a: &BigRational) -> Result<AdjointData, InvariantError> {
    let adj = adjoint_vector(ap, l, a);
    let face = minimal_face_containing(&ap.eff, &adj).map_err(|_| InvariantError::NotEffective)?;
    let f = ap.free_rank();
    let classes: Vec<Vec<BigRational>> = ap.generator_classes.iter().map(|c| c.free_rational()).collect();
    let g = classes.len();
    let rows: Vec<Vec<BigRational>> = (0..f).map(|k| classes.iter().map(|c| c[k].clone()).collect()).collect();
    let point = feasible_point(&rows, &adj, g).ok_or(InvariantError::NotEffective)?;

    let mut support = Vec::new();
    for j in 0..g {
        let mut cost = vec![BigRational::zero(); g];
        cost[j] = BigRational::one();
        match maximize(&rows, &adj, &cost) {
            LpOutcome::Optimal { value, .. } if value.is_positive() => support.push(j),
            LpOutcome::Unbounded => support.push(j),
            _ => {}
        }
    }
    let sub: Vec<Vec<BigInt>> = support.iter().map(|&j| ap.generator_classes[j].free.clone()).collect();
    let dim = support.len() - rank(&sub);

    let in_face: Vec<bool> = classes.iter().map(|c| face.cone.contains(c)).collect();
    let mut d_adj = Vec::new();
    let mut e = Vec::new();
    let mut a_adj = vec![Vec::new(); ap.spec.places.len()];
    let mut b_v = vec![Vec::new(); ap.spec.places.len()];
    for (j, gen) in ap.generators.iter().enumerate() {
        match *gen {
            Generator::Ray(i) => {
                if in_face[j] {
                    d_adj.push(i)
                } else {
                    e.push(i)
                }
            }
            Generator::Place { place, ray } => {
                if in_face[j] {
                    a_adj[place].push(ray)
                } else {
                    b_v[place].push(ray)
                }
            }
        }
    }
    let decomposition = ap
        .generators
        .iter()
        .zip(point)
        .filter(|(_, c)| !c.is_zero())
        .map(|(g, c)| (*g, c))
        .collect();
    Ok(AdjointData {
        a: a.clone(),
        adjoint_class: adj,
        b: face.codim,
        minimal_face: face.cone,
        d_adj,
        a_adj,
        e,
        b_v,
        rigid: dim == 0,
        decomposition_polytope_dim: dim,
        decomposition,
    })
}

/// Composite report for one face specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthPrediction {
    pub obstructed: bool,
    pub witness: Option<Vec<BigInt>>,
    /// a as "num/den".
    pub a: Option<String>,
    pub b: Option<usize>,
    pub rigid: Option<bool>,
    pub adjoint_class: Option<Vec<String>>,
    pub rank: usize,
    pub c_a: ArchimedeanConstant,
}

impl GrowthPrediction {
    pub fn a_rational(&self) -> Option<BigRational> {
        self.a.as_deref().and_then(crate::polycore::parse_rational)
    }
}

/// Predicted growth for the class `lambda` (ray coefficients); the log-anticanonical class
/// when `lambda` is `None`.
pub fn predict_growth(
    f: &Fan,
    boundary: &[usize],
    spec: &AdelicFaceSpec,
    lambda: Option<&[BigInt]>,
) -> Result<GrowthPrediction, InvariantError> {
    let obstruction = analytic_obstruction(f, boundary, spec)?;
    let ap = adelic_picard(f, boundary, spec)?;
    let c_a = archimedean_constant(spec);
    if obstruction.obstructed {
        return Ok(GrowthPrediction {
            obstructed: true,
            witness: obstruction.witness,
            a: None,
            b: None,
            rigid: None,
            adjoint_class: None,
            rank: ap.free_rank(),
            c_a,
        });
    }
    let l = match lambda {
        Some(v) => ap.class_of_lambda(v).map_err(ClemensError::from)?,
        None => ap.minus_k(),
    };
    let a = fujita_a(&ap, &l)?;
    let adj = adjoint_decomposition(&ap, &l, &a)?;
    Ok(GrowthPrediction {
        obstructed: false,
        witness: None,
        a: Some(a.to_string()),
        b: Some(adj.b),
        rigid: Some(adj.rigid),
        adjoint_class: Some(adj.adjoint_class.iter().map(|x| x.to_string()).collect()),
        rank: ap.free_rank(),
        c_a,
    })
}

/// Sum of a decomposition's classes, for reassembly checks.
pub fn reassemble(ap: &AdelicPicard, parts: &[(Generator, BigRational)]) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); ap.free_rank()];
    for (g, c) in parts {
        let j = ap.generators.iter().position(|x| x == g).expect("known generator");
        let cls = to_rational(&ap.generator_classes[j].free);
        for (x, y) in acc.iter_mut().zip(cls) {
            *x += c * y;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::PlaceKind;

    fn rat(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn p1xp1() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
        )
        .unwrap()
    }

    fn bl2p2() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 0]],
        )
        .unwrap()
    }

    #[test]
    fn p1xp1_two_one() {
        let ap = adelic_picard(&p1xp1(), &[], &AdelicFaceSpec::empty()).unwrap();
        let l = ap.class_of_i64(&[2, 0, 1, 0]).unwrap();
        let a = fujita_a(&ap, &l).unwrap();
        assert_eq!(a, rat(2));
        assert_eq!(fujita_a_facets(&ap, &l).unwrap(), a);
        assert_eq!(b_invariant(&ap, &l, &a).unwrap(), 1);
        let adj = adjoint_decomposition(&ap, &l, &a).unwrap();
        assert!(!adj.rigid);
        assert_eq!(adj.decomposition_polytope_dim, 1);
        assert_eq!(reassemble(&ap, &adj.decomposition), adj.adjoint_class);
    }

    #[test]
    fn anticanonical_is_rigid() {
        let ap = adelic_picard(&p1xp1(), &[], &AdelicFaceSpec::empty()).unwrap();
        let l = ap.minus_k();
        let a = fujita_a(&ap, &l).unwrap();
        assert_eq!(a, rat(1));
        let adj = adjoint_decomposition(&ap, &l, &a).unwrap();
        assert!(adj.rigid);
        assert!(adj.decomposition.is_empty());
        assert_eq!(adj.b, 2);
    }

    #[test]
    fn bl2p2_faces() {
        let f = bl2p2();
        let b = [2, 3, 4];
        let p = predict_growth(&f, &b, &AdelicFaceSpec::single(PlaceKind::Real, &[4, 3]), None).unwrap();
        assert_eq!((p.a.as_deref(), p.b), (Some("1"), Some(2)));
        assert_eq!(p.rigid, Some(true));
        let p = predict_growth(&f, &b, &AdelicFaceSpec::single(PlaceKind::Real, &[3]), None).unwrap();
        assert_eq!((p.a.as_deref(), p.b), (Some("1"), Some(1)));
        let p = predict_growth(&f, &b, &AdelicFaceSpec::single(PlaceKind::Real, &[4]), None).unwrap();
        assert!(p.obstructed);
        assert!(p.a.is_none());
    }

    #[test]
    fn p1_point_at_infinity() {
        let f = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let lambda = [BigInt::from(1), BigInt::from(0)];
        let p = predict_growth(&f, &[1], &AdelicFaceSpec::single(PlaceKind::Real, &[1]), Some(&lambda)).unwrap();
        assert_eq!((p.a.as_deref(), p.b), (Some("1"), Some(1)));
    }

    #[test]
    fn not_big_is_an_error() {
        let ap = adelic_picard(&p1xp1(), &[], &AdelicFaceSpec::empty()).unwrap();
        let l = ap.class_of_i64(&[1, 0, 0, 0]).unwrap();
        assert_eq!(fujita_a(&ap, &l), Err(InvariantError::NotBig));
    }
}
