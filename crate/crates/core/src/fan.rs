//! Simplicial fans, their validation, finite permutation actions and subfans.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::polycore::lp::feasible_point;
use crate::polycore::matrix::{is_primitive, rank};
use crate::polycore::{invariant_factors, smith_normal_form, IntMatrix};

/// Hard cap on the size of a group generated by permutations.
pub const GROUP_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanError {
    #[error("could not parse fan document: {0}")]
    Parse(String),
    #[error("ray {0} has length {1}, expected lattice rank {2}")]
    RayLength(usize, usize, usize),
    #[error("ray {0} not primitive")]
    NotPrimitive(usize),
    #[error("cone {cone} refers to ray {index}, which does not exist")]
    DanglingIndex { cone: usize, index: usize },
    #[error("cone {0} has linearly dependent rays")]
    DependentRays(usize),
    #[error("ray {0} lies in no cone")]
    UnusedRay(usize),
    #[error("cones {0} and {1} do not meet in a common face")]
    BadIntersection(usize, usize),
    #[error("action: {0}")]
    Action(String),
    #[error("group generated by the action exceeds {GROUP_CAP} elements")]
    GroupTooLarge,
}

/// Place kind for an archimedean place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceDoc {
    pub name: String,
    pub kind: PlaceKind,
    pub face_rays: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub generators: Vec<Vec<usize>>,
}

/// On-disk fan format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanDocument {
    pub lattice_rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_rays: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub places: Option<Vec<PlaceDoc>>,
}

/// A fan document after validation.
#[derive(Debug, Clone)]
pub struct FanFile {
    pub fan: Fan,
    pub action: Option<GroupAction>,
    pub boundary_rays: Vec<usize>,
    pub places: Vec<PlaceDoc>,
}

/// A simplicial rational fan. Cones are sorted ray-index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    lattice_rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    cones: Vec<Vec<usize>>,
    cone_set: BTreeSet<Vec<usize>>,
}

impl Fan {
    /// Builds and validates a fan.
    pub fn new(lattice_rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != lattice_rank {
                return Err(FanError::RayLength(i, r.len(), lattice_rank));
            }
            let big: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
            if !is_primitive(&big) {
                return Err(FanError::NotPrimitive(i));
            }
        }
        let mut listed: Vec<Vec<usize>> = Vec::new();
        for (ci, c) in max_cones.iter().enumerate() {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::DanglingIndex { cone: ci, index: bad });
            }
            let gens: Vec<Vec<BigInt>> = c.iter().map(|&i| big_ray(&rays[i])).collect();
            if rank(&gens) != c.len() {
                return Err(FanError::DependentRays(ci));
            }
            listed.push(c);
        }
        for i in 0..rays.len() {
            if !listed.iter().any(|c| c.contains(&i)) {
                return Err(FanError::UnusedRay(i));
            }
        }
        for a in 0..listed.len() {
            for b in a + 1..listed.len() {
                if !meets_in_common_face(&rays, &listed[a], &listed[b]) {
                    return Err(FanError::BadIntersection(a, b));
                }
            }
        }
        let mut cone_set = BTreeSet::new();
        for c in &listed {
            for mask in 0u64..(1u64 << c.len()) {
                let face: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect();
                cone_set.insert(face);
            }
        }
        if listed.is_empty() {
            cone_set.insert(Vec::new());
        }
        let mut maximal: Vec<Vec<usize>> = listed
            .iter()
            .filter(|c| !listed.iter().any(|d| d.len() > c.len() && c.iter().all(|i| d.contains(i))))
            .cloned()
            .collect();
        maximal.sort();
        maximal.dedup();
        if maximal.is_empty() {
            maximal.push(Vec::new());
        }
        let mut cones: Vec<Vec<usize>> = cone_set.iter().cloned().collect();
        cones.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(Fan {
            lattice_rank,
            rays,
            max_cones: maximal,
            cones,
            cone_set,
        })
    }

    /// The fan {0} in a lattice of the given rank.
    pub fn trivial(lattice_rank: usize) -> Self {
        Fan::new(lattice_rank, Vec::new(), Vec::new()).expect("trivial fan is valid")
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn ray_big(&self, i: usize) -> Vec<BigInt> {
        big_ray(&self.rays[i])
    }

    /// The r x n matrix whose rows are the rays.
    pub fn ray_matrix(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = (0..self.rays.len()).map(|i| self.ray_big(i)).collect();
        IntMatrix::from_rows(self.lattice_rank, &rows)
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// All cones including the zero cone, ordered by dimension then lexicographically.
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    /// Whether the sorted ray set spans a cone of the fan.
    pub fn is_cone(&self, rays: &[usize]) -> bool {
        let mut v = rays.to_vec();
        v.sort_unstable();
        v.dedup();
        self.cone_set.contains(&v)
    }

    /// Every cone's rays extend to a lattice basis.
    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| {
            if c.is_empty() {
                return true;
            }
            let gens: Vec<Vec<BigInt>> = c.iter().map(|&i| self.ray_big(i)).collect();
            let f = invariant_factors(&IntMatrix::from_rows(self.lattice_rank, &gens));
            f.len() == c.len() && f.iter().all(|d| d.is_one())
        })
    }

    /// Support is all of R^n: maximal cones are full dimensional and each facet of a maximal
    /// cone borders exactly two maximal cones.
    pub fn is_complete(&self) -> bool {
        let n = self.lattice_rank;
        if self.max_cones.iter().any(|c| c.len() != n) {
            return false;
        }
        let mut count: HashMap<Vec<usize>, usize> = HashMap::new();
        for c in &self.max_cones {
            for skip in 0..c.len() {
                let facet: Vec<usize> = c.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i).collect();
                *count.entry(facet).or_insert(0) += 1;
            }
        }
        count.values().all(|&k| k == 2)
    }

    /// Minimal non-faces: ray sets that are not cones but all of whose proper subsets are.
    pub fn primitive_collections(&self) -> Vec<Vec<usize>> {
        let r = self.rays.len();
        let mut out = Vec::new();
        // A primitive collection has at most n + 1 elements in a simplicial fan.
        let max = (self.lattice_rank + 1).min(r);
        for size in 2..=max {
            for subset in combinations(r, size) {
                if self.is_cone(&subset) {
                    continue;
                }
                let minimal = (0..size).all(|skip| {
                    let sub: Vec<usize> = subset.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &i)| i).collect();
                    self.is_cone(&sub)
                });
                if minimal {
                    out.push(subset);
                }
            }
        }
        out
    }

    pub fn to_document(&self) -> FanDocument {
        FanDocument {
            lattice_rank: self.lattice_rank,
            rays: self.rays.clone(),
            max_cones: self.max_cones.iter().filter(|c| !c.is_empty()).cloned().collect(),
            action: None,
            boundary_rays: None,
            places: None,
        }
    }
}

fn big_ray(r: &[i64]) -> Vec<BigInt> {
    r.iter().map(|&x| BigInt::from(x)).collect()
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// For simplicial cones the intersection is the cone on the shared rays exactly when no
/// point of the intersection uses a non-shared ray of `a` in its (unique) expression.
fn meets_in_common_face(rays: &[Vec<i64>], a: &[usize], b: &[usize]) -> bool {
    let own: Vec<usize> = a.iter().copied().filter(|i| !b.contains(i)).collect();
    if own.is_empty() {
        return true;
    }
    let n = rays.first().map_or(0, |r| r.len());
    let vars = a.len() + b.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n + 1);
    let mut rhs = Vec::with_capacity(n + 1);
    for k in 0..n {
        let mut row = Vec::with_capacity(vars);
        row.extend(a.iter().map(|&i| BigRational::from_integer(rays[i][k].into())));
        row.extend(b.iter().map(|&i| BigRational::from_integer((-rays[i][k]).into())));
        rows.push(row);
        rhs.push(BigRational::zero());
    }
    let mut norm = vec![BigRational::zero(); vars];
    for (k, i) in a.iter().enumerate() {
        if own.contains(i) {
            norm[k] = BigRational::one();
        }
    }
    rows.push(norm);
    rhs.push(BigRational::one());
    feasible_point(&rows, &rhs, vars).is_none()
}

/// Parses and validates a fan document, including the optional action, boundary and places.
pub fn load_fan_document(text: &str) -> Result<FanFile, FanError> {
    let doc: FanDocument = serde_json::from_str(text).map_err(|e| FanError::Parse(e.to_string()))?;
    from_document(doc)
}

pub fn from_document(doc: FanDocument) -> Result<FanFile, FanError> {
    let fan = Fan::new(doc.lattice_rank, doc.rays, doc.max_cones)?;
    let r = fan.ray_count();
    let action = match doc.action {
        Some(a) => Some(attach_action(&fan, &a.generators)?),
        None => None,
    };
    let boundary_rays = doc.boundary_rays.unwrap_or_default();
    if let Some(&bad) = boundary_rays.iter().find(|&&i| i >= r) {
        return Err(FanError::Parse(format!("boundary ray {bad} does not exist")));
    }
    let places = doc.places.unwrap_or_default();
    for p in &places {
        if let Some(&bad) = p.face_rays.iter().find(|&&i| i >= r) {
            return Err(FanError::Parse(format!("place {} refers to missing ray {bad}", p.name)));
        }
    }
    Ok(FanFile {
        fan,
        action,
        boundary_rays,
        places,
    })
}

/// Parses a fan document and returns just the fan.
pub fn load_fan(text: &str) -> Result<Fan, FanError> {
    load_fan_document(text).map(|f| f.fan)
}

/// A finite group acting on a fan by permuting rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    generators: Vec<Vec<usize>>,
    elements: Vec<Vec<usize>>,
}

impl GroupAction {
    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// All group elements; the identity comes first.
    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Orbits on rays, each sorted, ordered by smallest member.
    pub fn ray_orbits(&self) -> Vec<Vec<usize>> {
        let r = self.elements[0].len();
        let mut seen = vec![false; r];
        let mut out = Vec::new();
        for i in 0..r {
            if seen[i] {
                continue;
            }
            let mut orbit: Vec<usize> = self.elements.iter().map(|g| g[i]).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &j in &orbit {
                seen[j] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn image(&self, g: &[usize], cone: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = cone.iter().map(|&i| g[i]).collect();
        v.sort_unstable();
        v
    }

    /// Orbits of the group on the cones of the fan.
    pub fn cone_orbits(&self, fan: &Fan) -> Vec<Vec<Vec<usize>>> {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut out = Vec::new();
        for c in fan.cones() {
            if seen.contains(c) {
                continue;
            }
            let mut orbit: Vec<Vec<usize>> = self.elements.iter().map(|g| self.image(g, c)).collect();
            orbit.sort();
            orbit.dedup();
            for o in &orbit {
                seen.insert(o.clone());
            }
            out.push(orbit);
        }
        out
    }

    /// Cones mapped to themselves by every group element.
    pub fn fixed_cones(&self, fan: &Fan) -> Vec<Vec<usize>> {
        fan.cones()
            .iter()
            .filter(|c| self.elements.iter().all(|g| &self.image(g, c) == *c))
            .cloned()
            .collect()
    }

    /// The trivial action on `r` rays.
    pub fn trivial(r: usize) -> Self {
        let id: Vec<usize> = (0..r).collect();
        GroupAction {
            generators: vec![id.clone()],
            elements: vec![id],
        }
    }
}

/// Validates permutations of the rays as fan automorphisms and closes them into a group.
pub fn attach_action(fan: &Fan, perms: &[Vec<usize>]) -> Result<GroupAction, FanError> {
    let r = fan.ray_count();
    for (k, p) in perms.iter().enumerate() {
        let mut sorted = p.clone();
        sorted.sort_unstable();
        if sorted != (0..r).collect::<Vec<_>>() {
            return Err(FanError::Action(format!("generator {k} is not a permutation of the {r} rays")));
        }
        for (ci, c) in fan.max_cones().iter().enumerate() {
            let img: Vec<usize> = c.iter().map(|&i| p[i]).collect();
            if !fan.is_cone(&img) {
                return Err(FanError::Action(format!(
                    "generator {k} does not preserve the fan: image of cone {ci} {c:?} is {img:?}, which is not a cone"
                )));
            }
        }
        if !preserves_lattice(fan, p) {
            return Err(FanError::Action(format!(
                "generator {k} is not induced by an automorphism of the lattice"
            )));
        }
    }
    let id: Vec<usize> = (0..r).collect();
    let mut elements = vec![id.clone()];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([id]);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for p in perms {
            let prod: Vec<usize> = elements[i].iter().map(|&x| p[x]).collect();
            if seen.insert(prod.clone()) {
                if elements.len() >= GROUP_CAP {
                    return Err(FanError::GroupTooLarge);
                }
                elements.push(prod);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    Ok(GroupAction {
        generators: perms.to_vec(),
        elements,
    })
}

/// The permutation is induced by a lattice automorphism on the span of the rays exactly when
/// the permuted character map stays in the integer column span of the ray matrix.
fn preserves_lattice(fan: &Fan, p: &[usize]) -> bool {
    let m = fan.ray_matrix();
    let r = m.rows();
    let n = m.cols();
    if n == 0 || r == 0 {
        return true;
    }
    let snf = smith_normal_form(&m);
    let d = snf.invariant_factors();
    for col in 0..n {
        // Column `col` of the matrix with rows permuted: row p[i] of the new matrix is row i.
        let mut w = vec![BigInt::zero(); r];
        for i in 0..r {
            w[p[i]] = m.get(i, col).clone();
        }
        let uw = snf.u.mul_vec(&w);
        for (i, x) in uw.iter().enumerate() {
            let ok = match d.get(i) {
                Some(di) => (x % di).is_zero(),
                None => x.is_zero(),
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// A subfan together with the map from its ray indices to those of the parent.
#[derive(Debug, Clone)]
pub struct SubFan {
    pub fan: Fan,
    pub ray_map: Vec<usize>,
}

/// The fan of all cones whose rays lie in `allowed`, with rays renumbered in increasing
/// order of their parent index.
pub fn subfan(f: &Fan, allowed: &[usize]) -> SubFan {
    let mut ray_map: Vec<usize> = allowed.iter().copied().filter(|&i| i < f.ray_count()).collect();
    ray_map.sort_unstable();
    ray_map.dedup();
    let index: HashMap<usize, usize> = ray_map.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let kept: Vec<Vec<usize>> = f
        .cones()
        .iter()
        .filter(|c| !c.is_empty() && c.iter().all(|i| index.contains_key(i)))
        .map(|c| c.iter().map(|i| index[i]).collect())
        .collect();
    let rays: Vec<Vec<i64>> = ray_map.iter().map(|&i| f.rays()[i].clone()).collect();
    let fan = Fan::new(f.lattice_rank(), rays, kept).expect("subfan of a valid fan is valid");
    SubFan { fan, ray_map }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap()
    }

    fn p1xp1() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
        )
        .unwrap()
    }

    #[test]
    fn p2_has_seven_cones() {
        let f = p2();
        assert_eq!(f.cones().len(), 7);
        assert!(f.is_smooth());
        assert!(f.is_complete());
    }

    #[test]
    fn rejects_bad_documents() {
        assert_eq!(Fan::new(2, vec![vec![2, 0]], vec![vec![0]]), Err(FanError::NotPrimitive(0)));
        assert_eq!(
            Fan::new(2, vec![vec![1, 0]], vec![vec![0, 3]]),
            Err(FanError::DanglingIndex { cone: 0, index: 3 })
        );
        assert_eq!(
            Fan::new(2, vec![vec![1, 0], vec![-1, 0]], vec![vec![0, 1]]),
            Err(FanError::DependentRays(0))
        );
        // Two overlapping 2-cones in the plane.
        let bad = Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, 2]],
            vec![vec![0, 1], vec![2, 3]],
        );
        assert_eq!(bad, Err(FanError::BadIntersection(0, 1)));
    }

    #[test]
    fn smoothness_and_completeness() {
        let a2 = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert_eq!(a2.cones().len(), 4);
        assert!(!a2.is_complete());
        let sing = Fan::new(2, vec![vec![1, 0], vec![1, 2]], vec![vec![0, 1]]).unwrap();
        assert!(!sing.is_smooth());
        let rays_only = Fan::new(2, vec![vec![1, 0], vec![1, 2]], vec![vec![0], vec![1]]).unwrap();
        assert!(rays_only.is_smooth());
        let p1 = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        assert!(p1.is_complete());
    }

    #[test]
    fn actions() {
        let f = p1xp1();
        let a = attach_action(&f, &[vec![2, 3, 0, 1]]).unwrap();
        assert_eq!(a.order(), 2);
        assert_eq!(a.ray_orbits(), vec![vec![0, 2], vec![1, 3]]);
        let t = attach_action(&f, &[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(t.fixed_cones(&f).len(), f.cones().len());
        let err = attach_action(&f, &[vec![2, 1, 0, 3]]).unwrap_err();
        assert!(matches!(err, FanError::Action(_)));
        // Every permutation of the rays of P^2 is a fan automorphism.
        let full = attach_action(&p2(), &[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(full.order(), 6);
    }

    #[test]
    fn subfans() {
        let f = p2();
        let s = subfan(&f, &[0, 1]);
        assert_eq!(s.fan.cones().len(), 4);
        assert_eq!(s.ray_map, vec![0, 1]);
        let all = subfan(&f, &[0, 1, 2]);
        assert_eq!(all.fan, f);
        let empty = subfan(&f, &[]);
        assert_eq!(empty.fan.cones(), &[Vec::<usize>::new()]);
    }

    #[test]
    fn primitive_collections_of_p1xp1() {
        assert_eq!(p1xp1().primitive_collections(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(p2().primitive_collections(), vec![vec![0, 1, 2]]);
    }
}
