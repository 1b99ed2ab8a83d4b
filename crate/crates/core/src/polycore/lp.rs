//! Exact two-phase simplex method over the rationals, using Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<BigRational>, value: BigRational },
    Infeasible,
    Unbounded,
}

/// Maximizes `c·x` subject to `a x = b`, `x >= 0`.
pub fn maximize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // Tableau columns: n structural, m artificial, then rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n, "constraint width mismatch");
        let flip = b[i].is_negative();
        let mut r = vec![BigRational::zero(); width];
        for j in 0..n {
            r[j] = if flip { -row[j].clone() } else { row[j].clone() };
        }
        r[n + i] = BigRational::one();
        r[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: maximize -sum(artificials).
    let mut phase1 = vec![BigRational::zero(); n + m];
    for j in n..n + m {
        phase1[j] = -BigRational::one();
    }
    if run(&mut t, &mut basis, &phase1, n + m).is_err() {
        unreachable!("phase one is bounded");
    }
    let infeas: BigRational = basis
        .iter()
        .enumerate()
        .filter(|(_, &bv)| bv >= n)
        .map(|(i, _)| t[i][width - 1].clone())
        .sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
                i += 1;
            } else {
                t.remove(i);
                basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    // Forbid artificial columns in phase 2.
    for row in t.iter_mut() {
        for j in n..n + m {
            row[j] = BigRational::zero();
        }
    }
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat(BigRational::zero()).take(m));
    if run(&mut t, &mut basis, &cost, n).is_err() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, value }
}

/// Minimizes `c·x` subject to `a x = b`, `x >= 0`.
pub fn minimize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> LpOutcome {
    let neg: Vec<BigRational> = c.iter().map(|x| -x.clone()).collect();
    match maximize(a, b, &neg) {
        LpOutcome::Optimal { x, value } => LpOutcome::Optimal { x, value: -value },
        other => other,
    }
}

/// Feasibility of `a x = b`, `x >= 0`.
pub fn feasible_point(a: &[Vec<BigRational>], b: &[BigRational], n: usize) -> Option<Vec<BigRational>> {
    match maximize(a, b, &vec![BigRational::zero(); n]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

struct Unbounded;

/// Primal simplex iterations on the tableau; only columns `< allowed` may enter.
fn run(
    t: &mut [Vec<BigRational>],
    basis: &mut [usize],
    cost: &[BigRational],
    allowed: usize,
) -> Result<(), Unbounded> {
    let width = t.first().map_or(0, |r| r.len());
    loop {
        // Reduced cost r_j = c_j - c_B · column_j; Bland: smallest improving index.
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut r = cost[j].clone();
            for (i, &bv) in basis.iter().enumerate() {
                if !t[i][j].is_zero() {
                    r -= &cost[bv] * &t[i][j];
                }
            }
            r.is_positive()
        });
        let Some(j) = entering else { return Ok(()) };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..t.len() {
            if t[i][j].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else { return Err(Unbounded) };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [Vec<BigRational>], basis: &mut [usize], i: usize, j: usize) {
    let inv = t[i][j].recip();
    for x in t[i].iter_mut() {
        *x *= &inv;
    }
    let prow = t[i].clone();
    for (k, row) in t.iter_mut().enumerate() {
        if k == i || row[j].is_zero() {
            continue;
        }
        let f = row[j].clone();
        for (x, p) in row.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
    basis[i] = j;
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn simple_max() {
        // max x + y s.t. x + 2y + s = 4, 3x + y + u = 6
        let a = vec![
            vec![r(1, 1), r(2, 1), r(1, 1), r(0, 1)],
            vec![r(3, 1), r(1, 1), r(0, 1), r(1, 1)],
        ];
        let b = vec![r(4, 1), r(6, 1)];
        let c = vec![r(1, 1), r(1, 1), r(0, 1), r(0, 1)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(14, 5)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![r(1, 1), r(1, 1)]];
        assert_eq!(maximize(&a, &[r(-1, 1)], &[r(0, 1), r(0, 1)]), LpOutcome::Infeasible);
        let a = vec![vec![r(1, 1), r(-1, 1)]];
        assert_eq!(maximize(&a, &[r(0, 1)], &[r(1, 1), r(0, 1)]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(2, 1), r(2, 1)]];
        let b = vec![r(1, 1), r(2, 1)];
        match minimize(&a, &b, &[r(1, 1), r(3, 1)]) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, r(1, 1));
                assert_eq!(x, vec![r(1, 1), r(0, 1)]);
            }
            o => panic!("{o:?}"),
        }
    }
}
