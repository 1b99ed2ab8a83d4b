//! Picard groups of toric varieties, effective cones, invariant ranks under permutation
//! actions, and first cohomology of finite groups.
//!
//! Classes are written in canonical coordinates. The torsion part comes from the Smith
//! normal form of the presentation. The free part is taken as the Hermite normal form of
//! the free class map, so it does not depend on the elimination order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::fan::{Fan, GroupAction};
use crate::polycore::matrix::{rank, to_rational};
use crate::polycore::{hermite_normal_form, integer_kernel, smith_normal_form, ConeData, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PicardError {
    #[error("nontrivial global units: the rays do not span the lattice")]
    GlobalUnits,
    #[error("class vector has length {0}, expected {1}")]
    Length(usize, usize),
    #[error("not a group action: {0}")]
    NotAnAction(String),
}

/// Cokernel of an integer map `Z^k -> Z^N` given by the columns of `relations`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cokernel {
    ambient: usize,
    free_map: IntMatrix,
    torsion_map: IntMatrix,
    torsion: Vec<BigInt>,
}

impl Cokernel {
    pub fn new(relations: &IntMatrix) -> Self {
        let ambient = relations.rows();
        let snf = smith_normal_form(relations);
        let d = snf.invariant_factors();
        let rk = d.len();
        let mut tors_rows = Vec::new();
        let mut torsion = Vec::new();
        for (i, di) in d.iter().enumerate() {
            if !di.is_one() {
                tors_rows.push(snf.u.row(i).to_vec());
                torsion.push(di.clone());
            }
        }
        let free_rows: Vec<Vec<BigInt>> = (rk..ambient).map(|i| snf.u.row(i).to_vec()).collect();
        let free_map = if free_rows.is_empty() {
            IntMatrix::zeros(0, ambient)
        } else {
            hermite_normal_form(&IntMatrix::from_rows(ambient, &free_rows))
        };
        let torsion_map = IntMatrix::from_rows(ambient, &tors_rows);
        Cokernel {
            ambient,
            free_map,
            torsion_map,
            torsion,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn free_rank(&self) -> usize {
        self.free_map.rows()
    }

    /// Orders of the cyclic torsion summands, each > 1, in divisibility order.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// The f x N matrix sending a vector to its free coordinates.
    pub fn free_map(&self) -> &IntMatrix {
        &self.free_map
    }

    pub fn class_of(&self, v: &[BigInt]) -> Result<DivisorClass, PicardError> {
        if v.len() != self.ambient {
            return Err(PicardError::Length(v.len(), self.ambient));
        }
        let free = self.free_map.mul_vec(v);
        let torsion = self
            .torsion_map
            .mul_vec(v)
            .into_iter()
            .zip(&self.torsion)
            .map(|(x, d)| x.mod_floor(d))
            .collect();
        Ok(DivisorClass {
            free,
            torsion,
            lambda: Some(v.to_vec()),
        })
    }

    pub fn class_of_basis(&self, i: usize) -> DivisorClass {
        let mut e = vec![BigInt::zero(); self.ambient];
        e[i] = BigInt::one();
        self.class_of(&e).expect("length matches")
    }
}

/// A class in a finitely generated abelian group, as free and torsion coordinates.
#[derive(Debug, Clone)]
pub struct DivisorClass {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
    /// A representing coefficient vector, when known.
    pub lambda: Option<Vec<BigInt>>,
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        self.free == other.free && self.torsion == other.torsion
    }
}

impl Eq for DivisorClass {}

impl DivisorClass {
    pub fn free_rational(&self) -> Vec<BigRational> {
        to_rational(&self.free)
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }
}

/// Pic of a toric variety with no nonconstant units, as the cokernel of `M -> Z^rays`.
#[derive(Debug, Clone)]
pub struct PicardData {
    pub fan: Fan,
    pub coker: Cokernel,
}

impl PicardData {
    pub fn ray_count(&self) -> usize {
        self.fan.ray_count()
    }

    pub fn free_rank(&self) -> usize {
        self.coker.free_rank()
    }

    pub fn torsion(&self) -> &[BigInt] {
        self.coker.torsion()
    }

    /// Class of a ray-coefficient vector.
    pub fn class_of(&self, lambda: &[BigInt]) -> Result<DivisorClass, PicardError> {
        self.coker.class_of(lambda)
    }

    pub fn class_of_i64(&self, lambda: &[i64]) -> Result<DivisorClass, PicardError> {
        let v: Vec<BigInt> = lambda.iter().map(|&x| BigInt::from(x)).collect();
        self.class_of(&v)
    }

    pub fn ray_class(&self, i: usize) -> DivisorClass {
        self.coker.class_of_basis(i)
    }
}

pub fn picard_group(f: &Fan) -> Result<PicardData, PicardError> {
    let m = f.ray_matrix();
    let rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    if rank(&rows) != f.lattice_rank() {
        return Err(PicardError::GlobalUnits);
    }
    Ok(PicardData {
        fan: f.clone(),
        coker: Cokernel::new(&m),
    })
}

/// Class of the sum of all torus-invariant divisors.
pub fn anticanonical_class(p: &PicardData) -> DivisorClass {
    let ones = vec![BigInt::one(); p.ray_count()];
    p.class_of(&ones).expect("length matches")
}

/// Cone in Pic tensor R generated by the ray classes; torsion is dropped.
#[derive(Debug, Clone)]
pub struct EffectiveCone {
    pub cone: ConeData,
}

pub fn effective_cone(p: &PicardData) -> EffectiveCone {
    let gens: Vec<Vec<BigInt>> = (0..p.ray_count()).map(|i| p.ray_class(i).free).collect();
    EffectiveCone {
        cone: ConeData::new(p.free_rank(), gens).expect("classes have the free rank"),
    }
}

/// Whether the free part of `l` lies in the interior of the cone.
pub fn big_test(e: &EffectiveCone, l: &DivisorClass) -> bool {
    e.cone.contains_in_interior(&l.free_rational())
}

/// Rank of the invariants of Pic tensor Q under the action:
/// #(ray orbits) minus the dimension of the invariant characters.
pub fn invariant_picard_rank(p: &PicardData, a: &GroupAction) -> usize {
    let r = p.ray_count();
    let n = p.fan.lattice_rank();
    let orbits = a.ray_orbits();
    let m = p.fan.ray_matrix();
    let mut cols: Vec<Vec<BigInt>> = (0..n).map(|j| m.column(j)).collect();
    let base = rank(&cols);
    for o in &orbits {
        let mut v = vec![BigInt::zero(); r];
        for &i in o {
            v[i] = BigInt::one();
        }
        cols.push(v);
    }
    let joint = rank(&cols);
    let fixed_characters = base + orbits.len() - joint;
    orbits.len() - fixed_characters
}

/// A finite group given by its multiplication table; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    pub name: String,
    pub table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == 0).expect("group element has an inverse")
    }

    /// Closes a set of permutations of `0..k` into a group; the identity is element 0.
    pub fn from_permutations(name: &str, gens: &[Vec<usize>]) -> Self {
        let k = gens.first().map_or(0, |g| g.len());
        let id: Vec<usize> = (0..k).collect();
        let mut elems = vec![id];
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let prod: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !elems.contains(&prod) {
                    elems.push(prod);
                }
            }
            i += 1;
        }
        let index = |p: &Vec<usize>| elems.iter().position(|e| e == p).expect("closed");
        // (a * b)(x) = a(b(x)).
        let table = elems
            .iter()
            .map(|a| elems.iter().map(|b| index(&b.iter().map(|&x| a[x]).collect())).collect())
            .collect();
        FiniteGroup {
            name: name.to_string(),
            table,
        }
    }

    /// All subgroups, as sorted element lists.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for mask in 0u64..(1u64 << n) {
            if mask & 1 == 0 {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if set.iter().all(|&a| set.iter().all(|&b| mask >> self.mul(a, b) & 1 == 1)) {
                out.push(set);
            }
        }
        out
    }

    /// The permutation module Z[G/H] with its left action, one matrix per group element.
    pub fn coset_module(&self, h: &[usize]) -> Vec<IntMatrix> {
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for g in 0..self.order() {
            let mut c: Vec<usize> = h.iter().map(|&x| self.mul(g, x)).collect();
            c.sort_unstable();
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        let k = cosets.len();
        (0..self.order())
            .map(|g| {
                let mut m = IntMatrix::zeros(k, k);
                for (j, c) in cosets.iter().enumerate() {
                    let mut img: Vec<usize> = c.iter().map(|&x| self.mul(g, x)).collect();
                    img.sort_unstable();
                    let i = cosets.iter().position(|d| *d == img).expect("cosets are permuted");
                    m.set(i, j, BigInt::one());
                }
                m
            })
            .collect()
    }
}

/// Extends generator matrices to every group element, checking that they define an action.
pub fn action_matrices(g: &FiniteGroup, gens: &[usize], mats: &[IntMatrix]) -> Result<Vec<IntMatrix>, PicardError> {
    if gens.len() != mats.len() {
        return Err(PicardError::NotAnAction("one matrix per generator is required".into()));
    }
    let k = mats.first().map_or(0, |m| m.rows());
    if mats.iter().any(|m| m.rows() != k || m.cols() != k) {
        return Err(PicardError::NotAnAction("matrices must be square of equal size".into()));
    }
    let mut rho: Vec<Option<IntMatrix>> = vec![None; g.order()];
    rho[0] = Some(IntMatrix::identity(k));
    let mut queue = vec![0usize];
    while let Some(a) = queue.pop() {
        for (&s, ms) in gens.iter().zip(mats) {
            let b = g.mul(a, s);
            let prod = rho[a].as_ref().expect("visited") * ms;
            match &rho[b] {
                Some(existing) if *existing != prod => {
                    return Err(PicardError::NotAnAction(format!(
                        "two products reach element {b} with different matrices"
                    )))
                }
                Some(_) => {}
                None => {
                    rho[b] = Some(prod);
                    queue.push(b);
                }
            }
        }
    }
    rho.into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| PicardError::NotAnAction(format!("generators do not reach element {i}"))))
        .collect()
}

/// H^1(G, M) for a finitely generated free module M with a G-action, via inhomogeneous
/// cochains on the whole group. Returns the invariant factors (> 1) of the cokernel; a free
/// summand would be reported as 0.
pub fn group_h1(g: &FiniteGroup, gens: &[usize], mats: &[IntMatrix]) -> Result<Vec<BigInt>, PicardError> {
    let rho = action_matrices(g, gens, mats)?;
    let n = g.order();
    let k = rho[0].rows();
    if k == 0 {
        return Ok(Vec::new());
    }
    // d0: M -> C^1, x |-> (g x - x)_g.
    let mut d0 = IntMatrix::zeros(n * k, k);
    for a in 0..n {
        for i in 0..k {
            for j in 0..k {
                let mut v = rho[a].get(i, j).clone();
                if i == j {
                    v -= 1;
                }
                d0.set(a * k + i, j, v);
            }
        }
    }
    // d1: C^1 -> C^2, (df)(a, b) = a f(b) - f(ab) + f(a).
    let mut d1 = IntMatrix::zeros(n * n * k, n * k);
    for a in 0..n {
        for b in 0..n {
            let row0 = (a * n + b) * k;
            let ab = g.mul(a, b);
            for i in 0..k {
                for j in 0..k {
                    let v = rho[a].get(i, j);
                    if !v.is_zero() {
                        let cur = d1.get(row0 + i, b * k + j) + v;
                        d1.set(row0 + i, b * k + j, cur);
                    }
                }
                let cur = d1.get(row0 + i, ab * k + i) - 1;
                d1.set(row0 + i, ab * k + i, cur);
                let cur = d1.get(row0 + i, a * k + i) + 1;
                d1.set(row0 + i, a * k + i, cur);
            }
        }
    }
    let kernel = integer_kernel(&d1);
    let kdim = kernel.cols();
    if kdim == 0 {
        return Ok(Vec::new());
    }
    // Coordinates of the coboundaries in the kernel basis: kernel * y = d0.
    let snf = smith_normal_form(&kernel);
    let ud = &snf.u * &d0;
    let mut y0 = IntMatrix::zeros(kdim, k);
    for i in 0..kdim {
        let s = snf.s.get(i, i);
        for j in 0..k {
            let (q, r) = ud.get(i, j).div_rem(s);
            debug_assert!(r.is_zero(), "coboundaries lie in the cocycle lattice");
            y0.set(i, j, q);
        }
    }
    let y = &snf.v * &y0;
    let coker = Cokernel::new(&y);
    let mut out: Vec<BigInt> = coker.torsion().to_vec();
    out.extend(std::iter::repeat(BigInt::zero()).take(coker.free_rank()));
    Ok(out)
}

/// The fourteen groups of order at most 8, as permutation groups.
pub fn small_groups() -> Vec<FiniteGroup> {
    fn cyc(n: usize) -> Vec<usize> {
        (0..n).map(|i| (i + 1) % n).collect()
    }
    // Direct product of cyclic groups acting on disjoint blocks.
    fn product(orders: &[usize]) -> Vec<Vec<usize>> {
        let total: usize = orders.iter().sum();
        let mut gens = Vec::new();
        let mut off = 0;
        for &o in orders {
            let mut p: Vec<usize> = (0..total).collect();
            for i in 0..o {
                p[off + i] = off + (i + 1) % o;
            }
            gens.push(p);
            off += o;
        }
        gens
    }
    // Q8 by left multiplication on {1, i, j, k, -1, -i, -j, -k}, element e + 4 s for sign s.
    fn quat_left(x: usize) -> Vec<usize> {
        const T: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        (0..8)
            .map(|y| {
                let (a, sa) = (x % 4, x >= 4);
                let (b, sb) = (y % 4, y >= 4);
                let (c, sc) = T[a][b];
                c + if sa ^ sb ^ sc { 4 } else { 0 }
            })
            .collect()
    }
    vec![
        FiniteGroup::from_permutations("C1", &[vec![0]]),
        FiniteGroup::from_permutations("C2", &[cyc(2)]),
        FiniteGroup::from_permutations("C3", &[cyc(3)]),
        FiniteGroup::from_permutations("C4", &[cyc(4)]),
        FiniteGroup::from_permutations("C2xC2", &product(&[2, 2])),
        FiniteGroup::from_permutations("C5", &[cyc(5)]),
        FiniteGroup::from_permutations("C6", &[cyc(6)]),
        FiniteGroup::from_permutations("S3", &[vec![1, 0, 2], vec![1, 2, 0]]),
        FiniteGroup::from_permutations("C7", &[cyc(7)]),
        FiniteGroup::from_permutations("C8", &[cyc(8)]),
        FiniteGroup::from_permutations("C4xC2", &product(&[4, 2])),
        FiniteGroup::from_permutations("C2xC2xC2", &product(&[2, 2, 2])),
        FiniteGroup::from_permutations("D4", &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]]),
        FiniteGroup::from_permutations("Q8", &[quat_left(1), quat_left(2)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::attach_action;

    fn fan(rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        let n = rays[0].len();
        Fan::new(n, rays.iter().map(|r| r.to_vec()).collect(), cones.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn projective_plane() {
        let p = picard_group(&fan(&[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[2, 0]])).unwrap();
        assert_eq!(p.free_rank(), 1);
        assert!(p.torsion().is_empty());
        assert_eq!(anticanonical_class(&p).free, ints(&[3]));
        let e = effective_cone(&p);
        assert!(big_test(&e, &anticanonical_class(&p)));
    }

    #[test]
    fn quadric_cone_torsion() {
        let p = picard_group(&fan(&[&[1, 0], &[1, 2]], &[&[0], &[1]])).unwrap();
        assert_eq!(p.free_rank(), 0);
        assert_eq!(p.torsion(), &[BigInt::from(2)]);
        assert!(anticanonical_class(&p).is_zero());
        assert!(!p.ray_class(0).is_zero());
    }

    #[test]
    fn units_are_rejected() {
        let a1 = fan(&[&[1, 0]], &[&[0]]);
        assert_eq!(picard_group(&a1).unwrap_err(), PicardError::GlobalUnits);
    }

    #[test]
    fn p1xp1_classes() {
        let f = fan(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[&[0, 2], &[2, 1], &[1, 3], &[3, 0]]);
        let p = picard_group(&f).unwrap();
        assert_eq!(anticanonical_class(&p).free, ints(&[2, 2]));
        let e = effective_cone(&p);
        assert!(!big_test(&e, &p.class_of_i64(&[1, 0, 0, 0]).unwrap()));
        assert!(big_test(&e, &p.class_of_i64(&[2, 0, 1, 0]).unwrap()));
        let swap = attach_action(&f, &[vec![2, 3, 0, 1]]).unwrap();
        assert_eq!(invariant_picard_rank(&p, &swap), 1);
        assert_eq!(invariant_picard_rank(&p, &GroupAction::trivial(4)), 2);
    }

    #[test]
    fn h1_examples() {
        let c2 = FiniteGroup::from_permutations("C2", &[vec![1, 0]]);
        let sign = IntMatrix::from_i64(&[&[-1]]);
        assert_eq!(group_h1(&c2, &[1], &[sign]).unwrap(), vec![BigInt::from(2)]);
        let perm = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert!(group_h1(&c2, &[1], &[perm]).unwrap().is_empty());
        let bad = IntMatrix::from_i64(&[&[2]]);
        assert!(group_h1(&c2, &[1], &[bad]).is_err());
        let triv = FiniteGroup::from_permutations("C1", &[vec![0]]);
        assert!(group_h1(&triv, &[0], &[IntMatrix::identity(3)]).unwrap().is_empty());
    }

    #[test]
    fn small_group_orders() {
        let orders: Vec<usize> = small_groups().iter().map(|g| g.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 8]);
        let q8 = small_groups().pop().unwrap();
        assert_eq!(q8.subgroups().len(), 6);
    }
}
