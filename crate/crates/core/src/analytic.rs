//! Characteristic functions of cones, local densities at good primes and truncated Euler
//! products.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fan::{Fan, GroupAction};
use crate::polycore::matrix::dot_rat;
use crate::polycore::{dual_cone, lattice_index, minimal_face_containing, rational_to_f64, triangulate, triangulate_with_order, ConeData, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticError {
    #[error("pole: the linear form {0:?} vanishes at the evaluation point")]
    Pole(Vec<BigInt>),
    #[error("the cone must be pointed and full dimensional")]
    BadCone,
    #[error("the point is not in the cone")]
    NotInCone,
    #[error("q^(f(2+z)) = 1 for ray orbit {0}")]
    DensityPole(usize),
    #[error("expected {expected} shifts, got {got}")]
    ShiftCount { expected: usize, got: usize },
    #[error("z must exceed {0} for convergence")]
    Divergent(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One simplicial piece: `index / prod <s, form>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialTerm {
    pub lattice_index: BigInt,
    pub forms: Vec<Vec<BigInt>>,
}

/// The characteristic function of a cone as a sum over a triangulation of its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalConeFunction {
    pub rank: usize,
    pub terms: Vec<SimplicialTerm>,
    pub torsion_order: BigInt,
}

impl RationalConeFunction {
    /// X_Lambda for a pointed full-dimensional cone, with the measure normalized by the size
    /// of the torsion subgroup of the ambient group.
    pub fn of_cone(c: &ConeData, torsion_order: &BigInt) -> Result<Self, AnalyticError> {
        Self::from_dual_triangulation(c, torsion_order, None)
    }

    /// As [`RationalConeFunction::of_cone`], triangulating the dual with a given insertion order.
    pub fn with_order(c: &ConeData, torsion_order: &BigInt, order: &[usize]) -> Result<Self, AnalyticError> {
        Self::from_dual_triangulation(c, torsion_order, Some(order))
    }

    fn from_dual_triangulation(c: &ConeData, torsion_order: &BigInt, order: Option<&[usize]>) -> Result<Self, AnalyticError> {
        if !c.is_pointed() || !c.is_full_dimensional() {
            return Err(AnalyticError::BadCone);
        }
        let dual = dual_cone(c);
        let pieces = match order {
            Some(o) => triangulate_with_order(&dual, o)?,
            None => triangulate(&dual)?,
        };
        let terms = pieces
            .iter()
            .map(|p| {
                Ok(SimplicialTerm {
                    lattice_index: lattice_index(p)?,
                    forms: p.generators().to_vec(),
                })
            })
            .collect::<Result<Vec<_>, PolyError>>()?;
        Ok(RationalConeFunction {
            rank: c.ambient_rank(),
            terms,
            torsion_order: torsion_order.clone(),
        })
    }

    /// Exact value at `s`; a vanishing form is a pole.
    pub fn eval(&self, s: &[BigRational]) -> Result<BigRational, AnalyticError> {
        let mut total = BigRational::zero();
        for t in &self.terms {
            let mut den = BigRational::one();
            for f in &t.forms {
                let v = dot_rat(s, f);
                if v.is_zero() {
                    return Err(AnalyticError::Pole(f.clone()));
                }
                den *= v;
            }
            total += BigRational::from_integer(t.lattice_index.clone()) / den;
        }
        Ok(total / BigRational::from_integer(self.torsion_order.clone()))
    }

    /// Order of the pole of `t -> X(ell + t a)` at `t = 0`: the largest number of forms of a
    /// single term vanishing at `ell`. No cancellation occurs, since the leading coefficients
    /// are all positive on the interior direction `a`.
    pub fn pole_order_at(&self, ell: &[BigRational]) -> usize {
        self.terms
            .iter()
            .map(|t| t.forms.iter().filter(|f| dot_rat(ell, f).is_zero()).count())
            .max()
            .unwrap_or(0)
    }
}

/// X_Lambda(s) for a cone with torsion-free ambient group.
pub fn cone_x_function(c: &ConeData, s: &[BigRational]) -> Result<BigRational, AnalyticError> {
    RationalConeFunction::of_cone(c, &BigInt::one())?.eval(s)
}

/// Pole order of `t -> X(ell + t a_dir)` at 0 for `ell` in the cone.
pub fn x_pole_order(c: &ConeData, ell: &[BigRational], a_dir: &[BigRational]) -> Result<usize, AnalyticError> {
    if !c.contains(ell) {
        return Err(AnalyticError::NotInCone);
    }
    if !c.contains_in_interior(a_dir) {
        return Err(AnalyticError::BadCone);
    }
    let x = RationalConeFunction::of_cone(c, &BigInt::one())?;
    Ok(x.pole_order_at(ell))
}

/// Codimension of the minimal face containing `ell`, the geometric side of the pole law.
pub fn x_pole_order_by_face(c: &ConeData, ell: &[BigRational]) -> Result<usize, AnalyticError> {
    minimal_face_containing(c, ell).map(|f| f.codim).map_err(|_| AnalyticError::NotInCone)
}

/// A local density query at a good prime power q.
#[derive(Debug, Clone)]
pub struct LocalDensityQuery {
    pub fan: Fan,
    pub action: Option<GroupAction>,
    pub q: u64,
    /// One shift per ray orbit (per ray in the split case).
    pub z: Vec<BigRational>,
}

/// Exact when every exponent f(2 + z) is an integer, otherwise a float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DensityValue {
    Exact(String),
    Approx(f64),
}

impl DensityValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            DensityValue::Exact(s) => rational_to_f64(&crate::polycore::parse_rational(s).expect("stored rational")),
            DensityValue::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<BigRational> {
        match self {
            DensityValue::Exact(s) => crate::polycore::parse_rational(s),
            DensityValue::Approx(_) => None,
        }
    }
}

fn orbits_of(fan: &Fan, action: Option<&GroupAction>) -> Vec<Vec<usize>> {
    match action {
        Some(a) => a.ray_orbits(),
        None => (0..fan.ray_count()).map(|i| vec![i]).collect(),
    }
}

fn fixed_cones(fan: &Fan, action: Option<&GroupAction>) -> Vec<Vec<usize>> {
    match action {
        Some(a) => a.fixed_cones(fan),
        None => fan.cones().to_vec(),
    }
}

/// q^e for a rational exponent; exact when e is an integer.
enum Power {
    Exact(BigRational),
    Approx(f64),
}

fn q_power(q: u64, e: &BigRational) -> Power {
    if e.is_integer() {
        let k = e.to_integer();
        let base = BigRational::from_integer(BigInt::from(q));
        let mag: u32 = k.abs().try_into().expect("exponent fits in u32");
        let p = Pow::pow(&base, mag);
        Power::Exact(if k.is_negative() { p.recip() } else { p })
    } else {
        Power::Approx((q as f64).powf(rational_to_f64(e)))
    }
}

/// Sum over fixed cones of the product over the ray orbits in the cone of (q^(f(2+z)) - 1)^(-1).
pub fn denef_density(qry: &LocalDensityQuery) -> Result<DensityValue, AnalyticError> {
    let orbits = orbits_of(&qry.fan, qry.action.as_ref());
    if qry.z.len() != orbits.len() {
        return Err(AnalyticError::ShiftCount {
            expected: orbits.len(),
            got: qry.z.len(),
        });
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut exact_factors: Vec<Option<BigRational>> = Vec::with_capacity(orbits.len());
    let mut float_factors: Vec<f64> = Vec::with_capacity(orbits.len());
    for (k, (o, z)) in orbits.iter().zip(&qry.z).enumerate() {
        let e = BigRational::from_integer(BigInt::from(o.len())) * (&two + z);
        match q_power(qry.q, &e) {
            Power::Exact(v) => {
                let d = v - BigRational::one();
                if d.is_zero() {
                    return Err(AnalyticError::DensityPole(k));
                }
                float_factors.push(rational_to_f64(&d.recip()));
                exact_factors.push(Some(d.recip()));
            }
            Power::Approx(v) => {
                if v == 1.0 {
                    return Err(AnalyticError::DensityPole(k));
                }
                float_factors.push(1.0 / (v - 1.0));
                exact_factors.push(None);
            }
        }
    }
    let orbit_of: Vec<usize> = {
        let mut m = vec![0; qry.fan.ray_count()];
        for (k, o) in orbits.iter().enumerate() {
            for &i in o {
                m[i] = k;
            }
        }
        m
    };
    let cones = fixed_cones(&qry.fan, qry.action.as_ref());
    let cone_orbits: Vec<Vec<usize>> = cones
        .iter()
        .map(|c| {
            let mut v: Vec<usize> = c.iter().map(|&i| orbit_of[i]).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let all_exact = exact_factors.iter().all(Option::is_some);
    if all_exact {
        let mut total = BigRational::zero();
        for os in &cone_orbits {
            let mut term = BigRational::one();
            for &k in os {
                term *= exact_factors[k].as_ref().expect("exact");
            }
            total += term;
        }
        Ok(DensityValue::Exact(total.to_string()))
    } else {
        let total: f64 = cone_orbits.iter().map(|os| os.iter().map(|&k| float_factors[k]).product::<f64>()).sum();
        Ok(DensityValue::Approx(total))
    }
}

/// Primes up to `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    pub raw: f64,
    pub normalized: f64,
}

enum LocalFactor {
    Exact(BigRational, BigRational),
    Approx(f64, f64),
}

/// Product over primes p <= bound of the local density, and of the density times the inverse
/// local L-factors prod_rho (1 - p^(-f(2+z))). Exact per prime; rounded once at the end when
/// every factor is rational.
pub fn euler_product(f: &Fan, action: Option<&GroupAction>, z: &[BigRational], bound: u64) -> Result<EulerProduct, AnalyticError> {
    let orbits = orbits_of(f, action);
    let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    if let Some(bad) = z.iter().find(|x| **x <= half) {
        return Err(AnalyticError::Divergent(format!("-1/2 (got {bad})")));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let primes = primes_up_to(bound);
    let factors: Vec<LocalFactor> = primes
        .par_iter()
        .map(|&p| {
            let d = denef_density(&LocalDensityQuery {
                fan: f.clone(),
                action: action.cloned(),
                q: p,
                z: z.to_vec(),
            })?;
            let mut lfac_exact = Some(BigRational::one());
            let mut lfac_float = 1.0f64;
            for (o, zi) in orbits.iter().zip(z) {
                let e = -(BigRational::from_integer(BigInt::from(o.len())) * (&two + zi));
                match q_power(p, &e) {
                    Power::Exact(v) => {
                        lfac_float *= 1.0 - rational_to_f64(&v);
                        if let Some(acc) = lfac_exact.as_mut() {
                            *acc *= BigRational::one() - v;
                        }
                    }
                    Power::Approx(v) => {
                        lfac_float *= 1.0 - v;
                        lfac_exact = None;
                    }
                }
            }
            Ok(match (d.exact(), lfac_exact) {
                (Some(dx), Some(lx)) => {
                    let n = &dx * &lx;
                    LocalFactor::Exact(dx, n)
                }
                _ => {
                    let dv = d.to_f64();
                    LocalFactor::Approx(dv, dv * lfac_float)
                }
            })
        })
        .collect::<Result<Vec<_>, AnalyticError>>()?;
    if factors.iter().all(|x| matches!(x, LocalFactor::Exact(..))) {
        let (raw, norm) = factors
            .into_par_iter()
            .map(|x| match x {
                LocalFactor::Exact(a, b) => (a, b),
                LocalFactor::Approx(..) => unreachable!(),
            })
            .reduce(|| (BigRational::one(), BigRational::one()), |a, b| (a.0 * b.0, a.1 * b.1));
        Ok(EulerProduct {
            raw: rational_to_f64(&raw),
            normalized: rational_to_f64(&norm),
        })
    } else {
        let mut raw = 1.0;
        let mut norm = 1.0;
        for x in factors {
            match x {
                LocalFactor::Exact(a, b) => {
                    raw *= rational_to_f64(&a);
                    norm *= rational_to_f64(&b);
                }
                LocalFactor::Approx(a, b) => {
                    raw *= a;
                    norm *= b;
                }
            }
        }
        Ok(EulerProduct { raw, normalized: norm })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn orthant_values() {
        let c = ConeData::orthant(2);
        assert_eq!(cone_x_function(&c, &[r(1, 1), r(1, 1)]).unwrap(), r(1, 1));
        assert_eq!(cone_x_function(&c, &[r(2, 1), r(3, 1)]).unwrap(), r(1, 6));
        assert!(matches!(cone_x_function(&c, &[r(0, 1), r(1, 1)]), Err(AnalyticError::Pole(_))));
    }

    #[test]
    fn pole_orders() {
        let c = ConeData::orthant(2);
        let a = [r(1, 1), r(1, 1)];
        assert_eq!(x_pole_order(&c, &[r(0, 1), r(0, 1)], &a).unwrap(), 2);
        assert_eq!(x_pole_order(&c, &[r(1, 1), r(0, 1)], &a).unwrap(), 1);
        assert_eq!(x_pole_order(&c, &[r(1, 1), r(2, 1)], &a).unwrap(), 0);
        assert!(x_pole_order(&c, &[r(-1, 1), r(0, 1)], &a).is_err());
    }

    #[test]
    fn densities() {
        let p1 = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let q = 5u64;
        let v = denef_density(&LocalDensityQuery {
            fan: p1.clone(),
            action: None,
            q,
            z: vec![r(0, 1), r(0, 1)],
        })
        .unwrap();
        assert_eq!(v.exact().unwrap(), r(1, 1) + r(2, 24));
        let a2 = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        let v = denef_density(&LocalDensityQuery {
            fan: a2,
            action: None,
            q,
            z: vec![r(0, 1), r(0, 1)],
        })
        .unwrap();
        assert_eq!(v.exact().unwrap(), r(1, 1) + r(2, 24) + r(1, 576));
        let trivial = Fan::trivial(2);
        let v = denef_density(&LocalDensityQuery {
            fan: trivial,
            action: None,
            q,
            z: vec![],
        })
        .unwrap();
        assert_eq!(v.exact().unwrap(), r(1, 1));
    }

    #[test]
    fn euler_product_of_p1() {
        let p1 = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let e = euler_product(&p1, None, &[r(0, 1), r(0, 1)], 100).unwrap();
        let direct: f64 = primes_up_to(100).iter().map(|&p| 1.0 + 2.0 / ((p * p) as f64 - 1.0)).product();
        assert!((e.raw - direct).abs() < 1e-12);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
