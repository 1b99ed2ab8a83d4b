//! Rational polyhedral cones: double description, faces and placing triangulations.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{dot, dot_rat, invariant_factors, primitive, rank, row_reduce, to_rational, IntMatrix};
use super::PolyError;

/// A cone given by generators, i.e. the nonnegative hull of `generators` in Z^ambient_rank.
///
/// `lattice` is a basis (as columns) of the full-rank lattice the cone is measured
/// against; it defaults to the standard lattice. Generators are stored primitive,
/// deduplicated and sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeData {
    ambient_rank: usize,
    generators: Vec<Vec<BigInt>>,
    lattice: IntMatrix,
    pointed: bool,
}

/// Inequality description {x : <e, x> = 0 for e in equalities, <f, x> >= 0 for f in inequalities}.
#[derive(Clone, Debug)]
pub struct HRep {
    pub equalities: Vec<Vec<BigInt>>,
    pub inequalities: Vec<Vec<BigInt>>,
}

/// The face of a cone returned by [`minimal_face_containing`].
#[derive(Clone, Debug)]
pub struct Face {
    pub cone: ConeData,
    pub codim: usize,
    /// Indices (into the parent's inequality list) of the inequalities tight on the face.
    pub tight: Vec<usize>,
}

impl ConeData {
    pub fn new(ambient_rank: usize, generators: Vec<Vec<BigInt>>) -> Result<Self, PolyError> {
        Self::with_lattice(ambient_rank, generators, IntMatrix::identity(ambient_rank))
    }

    pub fn with_lattice(
        ambient_rank: usize,
        generators: Vec<Vec<BigInt>>,
        lattice: IntMatrix,
    ) -> Result<Self, PolyError> {
        if lattice.rows() != ambient_rank || lattice.cols() != ambient_rank || lattice.determinant().is_zero() {
            return Err(PolyError::Dimension("lattice basis must be square and nonsingular".into()));
        }
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != ambient_rank {
                return Err(PolyError::Dimension(format!(
                    "generator of length {} in ambient rank {}",
                    g.len(),
                    ambient_rank
                )));
            }
            if g.iter().all(Zero::is_zero) {
                continue;
            }
            gens.push(primitive(&g));
        }
        gens.sort();
        gens.dedup();
        let mut cone = ConeData {
            ambient_rank,
            generators: gens,
            lattice,
            pointed: true,
        };
        cone.pointed = cone.compute_pointed();
        Ok(cone)
    }

    pub fn from_i64(ambient_rank: usize, generators: &[&[i64]]) -> Result<Self, PolyError> {
        Self::new(
            ambient_rank,
            generators
                .iter()
                .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// The standard orthant in Z^n.
    pub fn orthant(n: usize) -> Self {
        let gens = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        Self::new(n, gens).expect("orthant is well formed")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn lattice(&self) -> &IntMatrix {
        &self.lattice
    }

    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        rank(&self.generators)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient_rank
    }

    fn compute_pointed(&self) -> bool {
        // Lambda ∩ -Lambda = 0 iff the dual cone is full dimensional.
        let dual = dual_generators(self.ambient_rank, &self.generators);
        rank(&dual) == self.ambient_rank
    }

    pub fn h_rep(&self) -> HRep {
        let (lineality, rays) = double_description(self.ambient_rank, &self.generators);
        HRep {
            equalities: lineality,
            inequalities: rays,
        }
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        let h = self.h_rep();
        h.equalities.iter().all(|e| dot_rat(x, e).is_zero())
            && h.inequalities.iter().all(|f| !dot_rat(x, f).is_negative())
    }

    pub fn contains_int(&self, x: &[BigInt]) -> bool {
        self.contains(&to_rational(x))
    }

    /// Strict interior test for a full-dimensional cone.
    pub fn contains_in_interior(&self, x: &[BigRational]) -> bool {
        if !self.is_full_dimensional() {
            return false;
        }
        let h = self.h_rep();
        h.inequalities.iter().all(|f| dot_rat(x, f).is_positive())
    }

    /// Coordinates of the generators with respect to the lattice basis.
    pub fn generators_in_lattice_coordinates(&self) -> Result<Vec<Vec<BigInt>>, PolyError> {
        if self.lattice == IntMatrix::identity(self.ambient_rank) {
            return Ok(self.generators.clone());
        }
        let basis: Vec<Vec<BigRational>> = (0..self.ambient_rank)
            .map(|i| to_rational(self.lattice.row(i)))
            .collect();
        self.generators
            .iter()
            .map(|g| {
                let x = super::matrix::solve_rational(&basis, &to_rational(g), self.ambient_rank)
                    .ok_or_else(|| PolyError::Dimension("generator outside lattice span".into()))?;
                x.iter()
                    .map(|c| {
                        if c.is_integer() {
                            Ok(c.to_integer())
                        } else {
                            Err(PolyError::Dimension("generator not in the lattice".into()))
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Extreme rays of {f : <f, g> >= 0 for all g}, returned as (lineality basis, pointed rays),
/// by the double description method with exact arithmetic.
pub fn double_description(dim: usize, constraints: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut lineality: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| (0..dim).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    // Each ray carries the set of processed constraints it is tight on.
    let mut rays: Vec<(Vec<BigInt>, Vec<bool>)> = Vec::new();

    for (k, h) in constraints.iter().enumerate() {
        for r in rays.iter_mut() {
            r.1.push(false);
        }
        if let Some(pos) = lineality.iter().position(|l| !dot(h, l).is_zero()) {
            let mut l0 = lineality.swap_remove(pos);
            let mut h0 = dot(h, &l0);
            if h0.is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
                h0 = -h0;
            }
            for l in lineality.iter_mut() {
                let hl = dot(h, l);
                if !hl.is_zero() {
                    *l = primitive(&combine(&h0, l, &(-hl), &l0));
                }
            }
            for (r, z) in rays.iter_mut() {
                let hr = dot(h, r);
                if !hr.is_zero() {
                    *r = primitive(&combine(&h0, r, &(-hr), &l0));
                }
                z[k] = true;
            }
            let mut zero = vec![true; k + 1];
            zero[k] = false;
            rays.push((primitive(&l0), zero));
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|(r, _)| dot(h, r)).collect();
        let mut next: Vec<(Vec<BigInt>, Vec<bool>)> = Vec::new();
        for ((r, z), v) in rays.iter().zip(&values) {
            if !v.is_negative() {
                let mut z = z.clone();
                z[k] = v.is_zero();
                next.push((r.clone(), z));
            }
        }
        for (i, vi) in values.iter().enumerate() {
            if !vi.is_positive() {
                continue;
            }
            for (j, vj) in values.iter().enumerate() {
                if !vj.is_negative() {
                    continue;
                }
                if !adjacent(&rays, i, j, k) {
                    continue;
                }
                let new = primitive(&combine(&(-vj), &rays[i].0, vi, &rays[j].0));
                let mut z: Vec<bool> = rays[i].1.iter().zip(&rays[j].1).map(|(a, b)| *a && *b).collect();
                z[k] = true;
                next.push((new, z));
            }
        }
        rays = next;
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|(r, _)| r).collect();
    out.sort();
    out.dedup();
    (lineality, out)
}

/// a*x + b*y
fn combine(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

/// Combinatorial adjacency test over the first `k` constraints.
fn adjacent(rays: &[(Vec<BigInt>, Vec<bool>)], i: usize, j: usize, k: usize) -> bool {
    let common: Vec<bool> = (0..k).map(|c| rays[i].1[c] && rays[j].1[c]).collect();
    !rays.iter().enumerate().any(|(t, (_, z))| {
        t != i && t != j && (0..k).all(|c| !common[c] || z[c])
    })
}

fn dual_generators(dim: usize, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let (lineality, rays) = double_description(dim, gens);
    let mut out = rays;
    for l in lineality {
        out.push(l.iter().map(|x| -x).collect());
        out.push(l);
    }
    out
}

/// The dual cone {f : f(x) >= 0 for all x in c}, in the dual lattice.
pub fn dual_cone(c: &ConeData) -> ConeData {
    let gens = dual_generators(c.ambient_rank, &c.generators);
    // Dual lattice basis is the inverse transpose; it is standard for the standard lattice.
    let lattice = if c.lattice == IntMatrix::identity(c.ambient_rank) {
        c.lattice.clone()
    } else {
        dual_lattice_basis(&c.lattice).unwrap_or_else(|| IntMatrix::identity(c.ambient_rank))
    };
    ConeData::with_lattice(c.ambient_rank, gens, lattice).expect("dual generators are well formed")
}

/// Integer basis of the dual lattice when it is integral (i.e. the lattice is unimodular up
/// to the ambient scaling); otherwise `None`.
fn dual_lattice_basis(b: &IntMatrix) -> Option<IntMatrix> {
    let n = b.rows();
    let bt: Vec<Vec<BigRational>> = (0..n).map(|i| to_rational(&b.column(i))).collect();
    let mut out = IntMatrix::zeros(n, n);
    for j in 0..n {
        let e: Vec<BigRational> = (0..n)
            .map(|i| if i == j { BigRational::one() } else { BigRational::zero() })
            .collect();
        let x = super::matrix::solve_rational(&bt, &e, n)?;
        for i in 0..n {
            if !x[i].is_integer() {
                return None;
            }
            out.set(i, j, x[i].to_integer());
        }
    }
    Some(out)
}

/// The unique face of `c` containing `x` in its relative interior.
pub fn minimal_face_containing(c: &ConeData, x: &[BigRational]) -> Result<Face, PolyError> {
    if x.len() != c.ambient_rank {
        return Err(PolyError::Dimension("point has wrong length".into()));
    }
    let h = c.h_rep();
    if !h.equalities.iter().all(|e| dot_rat(x, e).is_zero())
        || h.inequalities.iter().any(|f| dot_rat(x, f).is_negative())
    {
        return Err(PolyError::NotInCone);
    }
    let tight: Vec<usize> = h
        .inequalities
        .iter()
        .enumerate()
        .filter(|(_, f)| dot_rat(x, f).is_zero())
        .map(|(i, _)| i)
        .collect();
    let gens: Vec<Vec<BigInt>> = c
        .generators
        .iter()
        .filter(|g| tight.iter().all(|&t| dot(&h.inequalities[t], g).is_zero()))
        .cloned()
        .collect();
    let face = ConeData::with_lattice(c.ambient_rank, gens, c.lattice.clone())?;
    let codim = c.dim() - face.dim();
    Ok(Face { cone: face, codim, tight })
}

/// Placing triangulation with lexicographic insertion order.
pub fn triangulate(c: &ConeData) -> Result<Vec<ConeData>, PolyError> {
    let order: Vec<usize> = (0..c.generators.len()).collect();
    triangulate_with_order(c, &order)
}

/// Placing triangulation inserting generators in the given order (a permutation of
/// generator indices). Different orders give different triangulations of the same cone.
pub fn triangulate_with_order(c: &ConeData, order: &[usize]) -> Result<Vec<ConeData>, PolyError> {
    if !c.pointed {
        return Err(PolyError::NotPointed);
    }
    let k = c.dim();
    if k == 0 {
        return Ok(Vec::new());
    }
    // Project onto the pivot coordinates of the generator matrix; injective on the span.
    let coords = {
        let mut rows: Vec<Vec<BigRational>> = c.generators.iter().map(|g| to_rational(g)).collect();
        row_reduce(&mut rows)
    };
    let pts: Vec<Vec<BigInt>> = c
        .generators
        .iter()
        .map(|g| coords.iter().map(|&j| g[j].clone()).collect())
        .collect();
    debug_assert_eq!(coords.len(), k);

    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut start: Vec<usize> = Vec::new();
    for &i in order {
        let mut trial: Vec<Vec<BigInt>> = start.iter().map(|&s| pts[s].clone()).collect();
        trial.push(pts[i].clone());
        if rank(&trial) == trial.len() {
            start.push(i);
            if start.len() == k {
                break;
            }
        }
    }
    let mut sorted = start.clone();
    sorted.sort();
    simplices.push(sorted);

    for &p in order {
        if start.contains(&p) {
            continue;
        }
        let mut facet_count: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut facets: Vec<(Vec<usize>, Vec<BigInt>)> = Vec::new();
        for s in &simplices {
            for (drop_pos, &dropped) in s.iter().enumerate() {
                let f: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != drop_pos)
                    .map(|(_, &v)| v)
                    .collect();
                *facet_count.entry(f.clone()).or_insert(0) += 1;
                let mut n = facet_normal(&f.iter().map(|&v| pts[v].clone()).collect::<Vec<_>>(), k);
                if dot(&n, &pts[dropped]).is_negative() {
                    n = n.iter().map(|x| -x).collect();
                }
                facets.push((f, n));
            }
        }
        let mut added = Vec::new();
        for (f, n) in facets {
            if facet_count[&f] == 1 && dot(&n, &pts[p]).is_negative() {
                let mut s = f.clone();
                s.push(p);
                s.sort();
                added.push(s);
            }
        }
        simplices.extend(added);
    }

    simplices
        .into_iter()
        .map(|s| {
            ConeData::with_lattice(
                c.ambient_rank,
                s.iter().map(|&i| c.generators[i].clone()).collect(),
                c.lattice.clone(),
            )
        })
        .collect()
}

/// Normal vector of the hyperplane spanned by k-1 independent vectors in Z^k (generalized
/// cross product by cofactors).
fn facet_normal(vs: &[Vec<BigInt>], k: usize) -> Vec<BigInt> {
    if k == 1 {
        return vec![BigInt::one()];
    }
    let mut n = Vec::with_capacity(k);
    for j in 0..k {
        let rows: Vec<Vec<BigInt>> = vs
            .iter()
            .map(|v| v.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let minor = IntMatrix::from_rows(k - 1, &rows).determinant();
        n.push(if j % 2 == 0 { minor } else { -minor });
    }
    primitive(&n)
}

/// Index of the sublattice generated by the cone's generators inside the saturated lattice
/// of their span (product of the nonzero invariant factors), in lattice coordinates.
pub fn lattice_index(c: &ConeData) -> Result<BigInt, PolyError> {
    let gens = c.generators_in_lattice_coordinates()?;
    if gens.is_empty() {
        return Ok(BigInt::one());
    }
    let m = IntMatrix::from_rows(c.ambient_rank, &gens);
    Ok(invariant_factors(&m).into_iter().product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rat(v: &[i64]) -> Vec<BigRational> {
        to_rational(&bi(v))
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = ConeData::orthant(2);
        let d = dual_cone(&c);
        assert_eq!(d.generators(), c.generators());
        assert!(d.is_pointed());
    }

    #[test]
    fn dual_of_single_ray_is_half_plane() {
        let c = ConeData::from_i64(2, &[&[1, 0]]).unwrap();
        let d = dual_cone(&c);
        assert_eq!(d.generators(), &[bi(&[0, -1]), bi(&[0, 1]), bi(&[1, 0])]);
        assert!(!d.is_pointed());
    }

    #[test]
    fn dual_of_full_space_is_zero() {
        let c = ConeData::from_i64(2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]).unwrap();
        assert!(!c.is_pointed());
        let d = dual_cone(&c);
        assert!(d.generators().is_empty());
        assert_eq!(d.dim(), 0);
    }

    #[test]
    fn double_dual_matches_on_random_style_cone() {
        let c = ConeData::from_i64(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1], &[1, 1, 3]]).unwrap();
        let dd = dual_cone(&dual_cone(&c));
        for g in dd.generators() {
            assert!(c.contains_int(g));
        }
        for g in c.generators() {
            assert!(dd.contains_int(g));
        }
        // (1,1,3) is interior to the square cone, so it is not extreme.
        assert_eq!(c.h_rep().inequalities.len(), 4);
    }

    #[test]
    fn minimal_face_cases() {
        let c = ConeData::orthant(2);
        let f = minimal_face_containing(&c, &rat(&[1, 1])).unwrap();
        assert_eq!(f.codim, 0);
        assert_eq!(f.cone, c);
        let f = minimal_face_containing(&c, &rat(&[0, 0])).unwrap();
        assert_eq!(f.codim, 2);
        assert!(f.cone.generators().is_empty());
        let f = minimal_face_containing(&c, &rat(&[1, 0])).unwrap();
        assert_eq!(f.codim, 1);
        assert_eq!(f.cone.generators(), &[bi(&[1, 0])]);
        assert!(matches!(
            minimal_face_containing(&c, &rat(&[-1, 0])),
            Err(PolyError::NotInCone)
        ));
    }

    #[test]
    fn triangulate_simplicial_is_identity() {
        let c = ConeData::orthant(3);
        let t = triangulate(&c).unwrap();
        assert_eq!(t, vec![c]);
    }

    #[test]
    fn triangulate_square_cone_into_two() {
        let c = ConeData::from_i64(3, &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap();
        let t = triangulate(&c).unwrap();
        assert_eq!(t.len(), 2);
        // Heights are all 1, so normalized volumes add up to twice the unit square.
        let vol: BigInt = t.iter().map(|s| lattice_index(s).unwrap()).sum();
        assert_eq!(vol, BigInt::from(2));
        let t2 = triangulate_with_order(&c, &[3, 2, 1, 0]).unwrap();
        assert_eq!(t2.len(), 2);
        assert_ne!(t, t2);
    }

    #[test]
    fn triangulate_rejects_non_pointed() {
        let c = ConeData::from_i64(2, &[&[1, 0], &[-1, 0], &[0, 1]]).unwrap();
        assert!(matches!(triangulate(&c), Err(PolyError::NotPointed)));
    }

    #[test]
    fn lower_dimensional_triangulation() {
        // A 2-dimensional cone inside Z^3.
        let c = ConeData::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]]).unwrap();
        let t = triangulate(&c).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].generators().len(), 2);
    }
}
