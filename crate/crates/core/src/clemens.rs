//! Clemens complexes of toric boundaries, adelic face specifications, the adelic Picard
//! group Pic(X; A) with its effective cone, the analytic obstruction test and the
//! archimedean constant.
//!
//! Pic(X; A) is presented as the quotient of `Z^rays + sum_v Z^{A_v}` by the characters
//! `(<m, n_rho>)_rho` and, for each boundary ray `alpha`, by `e_alpha - sum_{v : alpha in A_v} e_{alpha, v}`.
//! Boundary components outside every face therefore become trivial, and a boundary component
//! in `A_v` is identified with its copy at `v`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::fan::{subfan, Fan, PlaceDoc, PlaceKind};
use crate::picard::{picard_group, Cokernel, DivisorClass, PicardError};
use crate::polycore::matrix::rank;
use crate::polycore::{dual_cone, ConeData, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClemensError {
    #[error("face {rays:?} at place {place} is not a face of the Clemens complex")]
    InvalidFace { place: String, rays: Vec<usize> },
    #[error("boundary ray {0} does not exist")]
    BadBoundary(usize),
    #[error(transparent)]
    Picard(#[from] PicardError),
}

/// A face of the Clemens complex: the ray set of a cone supported on the boundary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClemensFace {
    pub rays: Vec<usize>,
}

impl ClemensFace {
    /// |A| - 1; the empty face has dimension -1.
    pub fn dim(&self) -> isize {
        self.rays.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn contains(&self, other: &ClemensFace) -> bool {
        other.rays.iter().all(|r| self.rays.contains(r))
    }
}

/// All faces, the empty face first, ordered by dimension then lexicographically.
pub fn clemens_complex(f: &Fan, boundary: &[usize]) -> Vec<ClemensFace> {
    f.cones()
        .iter()
        .filter(|c| c.iter().all(|i| boundary.contains(i)))
        .map(|c| ClemensFace { rays: c.clone() })
        .collect()
}

/// One Clemens face per archimedean place.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdelicFaceSpec {
    pub places: Vec<PlaceDoc>,
}

impl AdelicFaceSpec {
    pub fn empty() -> Self {
        AdelicFaceSpec { places: Vec::new() }
    }

    pub fn single(kind: PlaceKind, face_rays: &[usize]) -> Self {
        let mut rays = face_rays.to_vec();
        rays.sort_unstable();
        AdelicFaceSpec {
            places: vec![PlaceDoc {
                name: match kind {
                    PlaceKind::Real => "R".into(),
                    PlaceKind::Complex => "C".into(),
                },
                kind,
                face_rays: rays,
            }],
        }
    }

    /// sum_v |A_v| - 1.
    pub fn dim(&self) -> isize {
        self.places.iter().map(|p| p.face_rays.len() as isize).sum::<isize>() - 1
    }

    /// Boundary rays occurring in some face.
    pub fn support(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.places.iter().flat_map(|p| p.face_rays.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// A generator of the effective cone of Pic(X; A).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    /// A non-boundary ray.
    Ray(usize),
    /// The copy of boundary ray `ray` at place `place`.
    Place { place: usize, ray: usize },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Ray(i) => write!(f, "D{i}"),
            Generator::Place { place, ray } => write!(f, "D{ray}@{place}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdelicPicard {
    pub fan: Fan,
    pub boundary: Vec<usize>,
    pub spec: AdelicFaceSpec,
    pub coker: Cokernel,
    /// Offset of each place's block in the ambient coordinates.
    pub place_offsets: Vec<usize>,
    pub generators: Vec<Generator>,
    pub generator_classes: Vec<DivisorClass>,
    pub eff: ConeData,
    /// K_X + D, the class of minus the non-boundary rays.
    pub k_class: DivisorClass,
}

impl AdelicPicard {
    pub fn free_rank(&self) -> usize {
        self.coker.free_rank()
    }

    pub fn torsion(&self) -> &[BigInt] {
        self.coker.torsion()
    }

    /// Class of a ray-coefficient vector of X.
    pub fn class_of_lambda(&self, lambda: &[BigInt]) -> Result<DivisorClass, PicardError> {
        let r = self.fan.ray_count();
        if lambda.len() != r {
            return Err(PicardError::Length(lambda.len(), r));
        }
        let mut v = lambda.to_vec();
        v.resize(self.coker.ambient(), BigInt::zero());
        let mut c = self.coker.class_of(&v)?;
        c.lambda = Some(lambda.to_vec());
        Ok(c)
    }

    pub fn class_of_i64(&self, lambda: &[i64]) -> Result<DivisorClass, PicardError> {
        let v: Vec<BigInt> = lambda.iter().map(|&x| BigInt::from(x)).collect();
        self.class_of_lambda(&v)
    }

    /// The log-anticanonical vector: 1 on non-boundary rays, 0 on the boundary.
    pub fn log_anticanonical_lambda(&self) -> Vec<BigInt> {
        (0..self.fan.ray_count())
            .map(|i| if self.boundary.contains(&i) { BigInt::zero() } else { BigInt::one() })
            .collect()
    }

    pub fn minus_k(&self) -> DivisorClass {
        self.class_of_lambda(&self.log_anticanonical_lambda()).expect("length matches")
    }

    pub fn ambient_index(&self, g: Generator) -> usize {
        match g {
            Generator::Ray(i) => i,
            Generator::Place { place, ray } => {
                let k = self.spec.places[place]
                    .face_rays
                    .iter()
                    .position(|&x| x == ray)
                    .expect("generator ray lies in the face");
                self.place_offsets[place] + k
            }
        }
    }
}

fn validate(f: &Fan, boundary: &[usize], spec: &AdelicFaceSpec) -> Result<(), ClemensError> {
    if let Some(&b) = boundary.iter().find(|&&b| b >= f.ray_count()) {
        return Err(ClemensError::BadBoundary(b));
    }
    for p in &spec.places {
        if !p.face_rays.iter().all(|r| boundary.contains(r)) || !f.is_cone(&p.face_rays) {
            return Err(ClemensError::InvalidFace {
                place: p.name.clone(),
                rays: p.face_rays.clone(),
            });
        }
    }
    Ok(())
}

fn normalized(boundary: &[usize], spec: &AdelicFaceSpec) -> (Vec<usize>, AdelicFaceSpec) {
    let mut b = boundary.to_vec();
    b.sort_unstable();
    b.dedup();
    let mut s = spec.clone();
    for p in &mut s.places {
        p.face_rays.sort_unstable();
        p.face_rays.dedup();
    }
    (b, s)
}

pub fn adelic_picard(f: &Fan, boundary: &[usize], spec: &AdelicFaceSpec) -> Result<AdelicPicard, ClemensError> {
    let (boundary, spec) = normalized(boundary, spec);
    validate(f, &boundary, &spec)?;
    let r = f.ray_count();
    let n = f.lattice_rank();
    let open: Vec<Vec<BigInt>> = (0..r).filter(|i| !boundary.contains(i)).map(|i| f.ray_big(i)).collect();
    if rank(&open) != n {
        return Err(PicardError::GlobalUnits.into());
    }
    let mut place_offsets = Vec::with_capacity(spec.places.len());
    let mut ambient = r;
    for p in &spec.places {
        place_offsets.push(ambient);
        ambient += p.face_rays.len();
    }
    let mut rel = IntMatrix::zeros(ambient, n + boundary.len());
    for i in 0..r {
        for j in 0..n {
            rel.set(i, j, BigInt::from(f.rays()[i][j]));
        }
    }
    for (k, &alpha) in boundary.iter().enumerate() {
        rel.set(alpha, n + k, BigInt::one());
        for (v, p) in spec.places.iter().enumerate() {
            if let Some(pos) = p.face_rays.iter().position(|&x| x == alpha) {
                rel.set(place_offsets[v] + pos, n + k, -BigInt::one());
            }
        }
    }
    let coker = Cokernel::new(&rel);
    let mut generators: Vec<Generator> = (0..r).filter(|i| !boundary.contains(i)).map(Generator::Ray).collect();
    for (v, p) in spec.places.iter().enumerate() {
        for &ray in &p.face_rays {
            generators.push(Generator::Place { place: v, ray });
        }
    }
    let mut ap = AdelicPicard {
        fan: f.clone(),
        boundary,
        spec,
        coker,
        place_offsets,
        generators,
        generator_classes: Vec::new(),
        eff: ConeData::orthant(0),
        k_class: DivisorClass {
            free: Vec::new(),
            torsion: Vec::new(),
            lambda: None,
        },
    };
    ap.generator_classes = ap
        .generators
        .iter()
        .map(|&g| ap.coker.class_of_basis(ap.ambient_index(g)))
        .collect();
    // Boundary ray classes are sums of place classes, so these generators span Eff.
    ap.eff = ConeData::new(ap.free_rank(), ap.generator_classes.iter().map(|c| c.free.clone()).collect())
        .expect("classes have the free rank");
    let k_lambda: Vec<BigInt> = ap.log_anticanonical_lambda().into_iter().map(|x| -x).collect();
    ap.k_class = ap.class_of_lambda(&k_lambda).expect("length matches");
    Ok(ap)
}

/// Rank of Pic U computed from the subfan of non-boundary rays.
pub fn pic_u_rank(f: &Fan, boundary: &[usize]) -> Result<usize, ClemensError> {
    let allowed: Vec<usize> = (0..f.ray_count()).filter(|i| !boundary.contains(i)).collect();
    let u = subfan(f, &allowed);
    Ok(picard_group(&u.fan)?.free_rank())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub obstructed: bool,
    /// A nonzero character nonnegative on all relevant rays, when obstructed.
    pub witness: Option<Vec<BigInt>>,
}

/// Looks for a nonzero character that is regular on U and on every chosen stratum's
/// neighbourhood, i.e. nonnegative on the open rays and on every ray of every face.
pub fn analytic_obstruction(f: &Fan, boundary: &[usize], spec: &AdelicFaceSpec) -> Result<ObstructionReport, ClemensError> {
    let (boundary, spec) = normalized(boundary, spec);
    validate(f, &boundary, &spec)?;
    let support = spec.support();
    let gens: Vec<Vec<BigInt>> = (0..f.ray_count())
        .filter(|i| !boundary.contains(i) || support.contains(i))
        .map(|i| f.ray_big(i))
        .collect();
    let cone = ConeData::new(f.lattice_rank(), gens).expect("rays have the lattice rank");
    let dual = dual_cone(&cone);
    let witness = dual.generators().first().cloned();
    Ok(ObstructionReport {
        obstructed: witness.is_some(),
        witness,
    })
}

/// c_A = 2^(number of real and complex face rays) * pi^(number of complex face rays), times a
/// rational factor that is 1 in the split case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchimedeanConstant {
    pub pow2: u32,
    pub pow_pi: u32,
    pub rational: String,
}

impl ArchimedeanConstant {
    pub fn value(&self) -> f64 {
        let q: BigRational = crate::polycore::parse_rational(&self.rational).unwrap_or_else(BigRational::one);
        crate::polycore::rational_to_f64(&q) * 2f64.powi(self.pow2 as i32) * std::f64::consts::PI.powi(self.pow_pi as i32)
    }
}

impl fmt::Display for ArchimedeanConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rational != "1" || (self.pow2 == 0 && self.pow_pi == 0) {
            parts.push(self.rational.clone());
        }
        if self.pow2 > 0 {
            parts.push(format!("2^{}", self.pow2));
        }
        if self.pow_pi > 0 {
            parts.push(format!("pi^{}", self.pow_pi));
        }
        write!(f, "{}", parts.join("*"))
    }
}

pub fn archimedean_constant(spec: &AdelicFaceSpec) -> ArchimedeanConstant {
    let mut pow2 = 0;
    let mut pow_pi = 0;
    for p in &spec.places {
        let k = p.face_rays.len() as u32;
        pow2 += k;
        if p.kind == PlaceKind::Complex {
            pow_pi += k;
        }
    }
    ArchimedeanConstant {
        pow2,
        pow_pi,
        rational: "1".into(),
    }
}
