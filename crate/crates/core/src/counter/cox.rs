//! Enumeration of integral points of U in Cox coordinates.
//!
//! Points of U(Z) correspond to orbits of the sign units `{+-1}^rk Pic U` on integer tuples
//! `(x_rho)` over the rays of U whose set of coordinates divisible by any prime, and whose
//! zero set, is a cone of U's fan. Coordinates of boundary rays of the compactification are set
//! to 1. Tuples are walked by absolute value; each one stands for the sign orbits of its
//! `2^(#nonzero)` sign patterns.

use std::time::Instant;

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::height::HeightSpec;
use super::region::Region;
use super::{iroot, Bins, CountOptions, CountRecord, CounterError};
use crate::fan::{subfan, Fan};
use crate::picard::picard_group;

#[derive(Debug, Clone)]
pub struct CoxModel {
    pub id: String,
    pub height: HeightSpec,
    pub boundary: Vec<usize>,
    /// Ray index of each Cox variable of U.
    vars: Vec<usize>,
    monomials: Vec<Vec<u32>>,
    /// Minimal non-faces of U's fan, in variable indices.
    primitive: Vec<Vec<usize>>,
    /// Cones of U's fan, in variable indices.
    cones: Vec<Vec<usize>>,
    /// Free Picard coordinates of each variable's class, mod 2.
    class_mod2: Vec<Vec<u8>>,
}

impl CoxModel {
    /// U is the complement of the `boundary` rays in the compactification `fan`; the height is
    /// that of the nef class `lambda` on `fan`.
    pub fn new(id: &str, fan: &Fan, boundary: &[usize], lambda: &[i64]) -> Result<Self, CounterError> {
        let height = HeightSpec::new(fan, lambda)?;
        let open: Vec<usize> = (0..fan.ray_count()).filter(|i| !boundary.contains(i)).collect();
        let u = subfan(fan, &open);
        if !u.fan.is_smooth() {
            return Err(CounterError::NotSmooth);
        }
        let pic = picard_group(&u.fan).map_err(|e| CounterError::Model(e.to_string()))?;
        if !pic.torsion().is_empty() {
            return Err(CounterError::Torsion(pic.torsion().iter().map(|d| d.to_string()).collect()));
        }
        let class_mod2 = (0..u.fan.ray_count())
            .map(|i| {
                pic.ray_class(i)
                    .free
                    .iter()
                    .map(|c| c.mod_floor(&2.into()).to_u8().expect("0 or 1"))
                    .collect()
            })
            .collect();
        let mut b = boundary.to_vec();
        b.sort_unstable();
        b.dedup();
        Ok(CoxModel {
            id: id.to_string(),
            monomials: height.monomials_on(&u.ray_map),
            height,
            boundary: b,
            vars: u.ray_map.clone(),
            primitive: u.fan.primitive_collections(),
            cones: u.fan.cones().to_vec(),
            class_mod2,
        })
    }

    /// Ray indices of the Cox variables of U.
    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// Variable names `x<ray index>` for use in regions.
    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|i| format!("x{i}")).collect()
    }

    pub fn pic_rank(&self) -> usize {
        self.class_mod2.first().map_or(0, |c| c.len())
    }

    /// Full Cox coordinates of the compactification for a point of U.
    pub fn lift(&self, u_point: &[i64]) -> Vec<i64> {
        let mut full = vec![1i64; self.height.fan().ray_count()];
        for (&ray, &x) in self.vars.iter().zip(u_point) {
            full[ray] = x;
        }
        full
    }

    /// Number of sign-unit orbits per absolute-value tuple with the given nonzero variables.
    fn orbit_weight(&self, nonzero: &[usize]) -> u128 {
        let rows: Vec<Vec<u8>> = nonzero.iter().map(|&v| self.class_mod2[v].clone()).collect();
        let rk = rank_mod2(rows);
        1u128 << (nonzero.len() - rk)
    }
}

fn rank_mod2(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] == 1) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][c] == 1 {
                let pivot = rows[rank].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Walk plan for one zero pattern.
struct Plan {
    order: Vec<usize>,
    monomials: Vec<Vec<u32>>,
    weight: u128,
    /// Primitive collections that become fully assigned at each depth.
    coprime_at: Vec<Vec<Vec<usize>>>,
}

fn plan_for(model: &CoxModel, zero: &[usize]) -> Result<Plan, CounterError> {
    let k = model.vars.len();
    let order: Vec<usize> = (0..k).filter(|v| !zero.contains(v)).collect();
    let monomials: Vec<Vec<u32>> = model
        .monomials
        .iter()
        .filter(|m| zero.iter().all(|&z| m[z] == 0))
        .cloned()
        .collect();
    for &v in &order {
        if !monomials.iter().any(|m| m[v] > 0) {
            return Err(CounterError::Unbounded(format!("x{}", model.vars[v])));
        }
    }
    let mut coprime_at = vec![Vec::new(); order.len().max(1)];
    for p in &model.primitive {
        let last = p.iter().filter_map(|v| order.iter().position(|o| o == v)).max();
        if let Some(d) = last {
            coprime_at[d].push(p.clone());
        }
    }
    Ok(Plan {
        weight: model.orbit_weight(&order),
        order,
        monomials,
        coprime_at,
    })
}

/// Value of a monomial when at most `limit`.
#[inline]
fn mono(m: &[u32], vals: &[u64], limit: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for (&e, &x) in m.iter().zip(vals) {
        for _ in 0..e {
            acc = acc.checked_mul(x as u128)?;
        }
        if acc > limit {
            return None;
        }
    }
    Some(acc)
}

struct Walker<'a> {
    plan: &'a Plan,
    bins: &'a Bins,
    region: &'a Region,
    tmax: u128,
    counts: Vec<u128>,
}

impl Walker<'_> {
    fn bound(&self, v: usize, vals: &mut [u64]) -> u128 {
        let saved = vals[v];
        vals[v] = 1;
        let mut best = u128::MAX;
        for m in &self.plan.monomials {
            if m[v] == 0 {
                continue;
            }
            let b = match mono(m, vals, self.tmax) {
                Some(p) => iroot(self.tmax / p, m[v]),
                None => 0,
            };
            best = best.min(b);
        }
        vals[v] = saved;
        best
    }

    fn leaf(&mut self, vals: &[u64]) {
        let mut h: u128 = 0;
        for m in &self.plan.monomials {
            match mono(m, vals, self.tmax) {
                Some(x) => h = h.max(x),
                None => return,
            }
        }
        if h == 0 || !self.region.contains(vals) {
            return;
        }
        if let Some(b) = self.bins.bin(h) {
            self.counts[b] += self.plan.weight;
        }
    }

    fn coprime(&self, depth: usize, vals: &[u64]) -> bool {
        self.plan.coprime_at[depth]
            .iter()
            .all(|p| p.iter().fold(0u64, |g, &v| g.gcd(&vals[v])) == 1)
    }

    fn walk(&mut self, depth: usize, vals: &mut [u64], stride: (u128, u128)) {
        if depth == self.plan.order.len() {
            self.leaf(vals);
            return;
        }
        let v = self.plan.order[depth];
        let bound = self.bound(v, vals);
        let (start, step) = if depth == 0 { stride } else { (1, 1) };
        let mut x = start;
        while x <= bound {
            vals[v] = x as u64;
            if self.coprime(depth, vals) {
                self.walk(depth + 1, vals, stride);
            }
            x += step;
        }
        vals[v] = 1;
    }
}

/// Counts sign-unit orbits of integral points of U with height at most each checkpoint.
pub fn enumerate_cox(model: &CoxModel, checkpoints: &[u64], region: &Region, opts: &CountOptions) -> Result<Vec<CountRecord>, CounterError> {
    let started = Instant::now();
    let bins = Bins::new(checkpoints);
    let tmax = bins.max() as u128;
    let patterns: Vec<Vec<usize>> = if opts.include_boundary {
        model.cones.clone()
    } else {
        vec![Vec::new()]
    };
    let plans = patterns.iter().map(|z| plan_for(model, z)).collect::<Result<Vec<_>, _>>()?;
    let workers = opts.workers.max(1) as u128;
    let k = model.vars.len();
    let mut total = vec![0u128; bins.bounds.len()];
    for (plan, zero) in plans.iter().zip(&patterns) {
        let partials: Vec<Vec<u128>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .filter(|&w| w == 0 || !plan.order.is_empty())
                .map(|w| {
                    let bins = &bins;
                    s.spawn(move || {
                        let mut vals = vec![1u64; k];
                        for &z in zero {
                            vals[z] = 0;
                        }
                        let mut walker = Walker {
                            plan,
                            bins,
                            region,
                            tmax,
                            counts: vec![0; bins.bounds.len()],
                        };
                        walker.walk(0, &mut vals, (1 + w, workers));
                        walker.counts
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        for p in partials {
            for (t, c) in total.iter_mut().zip(p) {
                *t += c;
            }
        }
    }
    Ok(bins.records(&model.id, &region.id, &total, started))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bl2p2() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 0]],
        )
        .unwrap()
    }

    fn brute(t: i64, keep: impl Fn(i64, i64) -> bool) -> u64 {
        let mut n = 0;
        for x in -t..=t {
            for y in -t..=t {
                if x != 0 && y != 0 && (x * y).abs() <= t && keep(x, y) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn a1_in_p1() {
        let p1 = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let m = CoxModel::new("a1", &p1, &[1], &[1, 0]).unwrap();
        let opts = CountOptions {
            workers: 3,
            include_boundary: true,
        };
        let recs = enumerate_cox(&m, &[1, 2, 7, 10], &Region::all(), &opts).unwrap();
        let ns: Vec<u64> = recs.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![3, 5, 15, 21]);
    }

    #[test]
    fn hyperbola_matches_brute_force() {
        let m = CoxModel::new("bl2p2", &bl2p2(), &[2, 3, 4], &[1, 1, 0, 0, 0]).unwrap();
        let opts = CountOptions {
            workers: 2,
            include_boundary: false,
        };
        let recs = enumerate_cox(&m, &[50, 200], &Region::all(), &opts).unwrap();
        assert_eq!(recs[0].n, brute(50, |_, _| true));
        assert_eq!(recs[1].n, brute(200, |_, _| true));
        let r = Region::parse("le", "x0<=x1", &m.var_names()).unwrap();
        let recs = enumerate_cox(&m, &[200], &r, &opts).unwrap();
        assert_eq!(recs[0].n, brute(200, |x, y| x.abs() <= y.abs()));
    }

    #[test]
    fn p1xp1_orbits_and_coprimality() {
        // U = P1 x P1 itself; points of P1(Q) x P1(Q) of anticanonical height
        // max(|a|,|b|)^2 max(|c|,|d|)^2 with (a,b), (c,d) coprime, up to sign.
        let f = Fan::new(
            2,
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
        )
        .unwrap();
        let m = CoxModel::new("p1xp1", &f, &[], &[1, 1, 1, 1]).unwrap();
        assert_eq!(m.pic_rank(), 2);
        let opts = CountOptions {
            workers: 1,
            include_boundary: true,
        };
        let t = 400u64;
        let recs = enumerate_cox(&m, &[t], &Region::all(), &opts).unwrap();
        // Oracle: points of P1(Q) with max(|a|,|b|) <= s.
        let p1_count = |s: i64| -> Vec<i64> {
            let mut hs = Vec::new();
            for a in -s..=s {
                for b in 0..=s {
                    if num_integer::gcd(a, b) == 1 && (b > 0 || a == 1) {
                        hs.push(a.abs().max(b));
                    }
                }
            }
            hs
        };
        let hs = p1_count(20);
        let mut n = 0;
        for h1 in &hs {
            for h2 in &hs {
                if (h1 * h1 * h2 * h2) as u64 <= t {
                    n += 1;
                }
            }
        }
        assert_eq!(recs[0].n, n);
    }
}
