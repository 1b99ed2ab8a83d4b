//! Dense integer matrices, Smith normal form and exact rational elimination.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows. Every row must have length `cols`.
    pub fn from_rows<T: Clone + Into<BigInt>>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let owned: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(cols, &owned)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(source, j) * factor;
            self.data[target * self.cols + j] += v;
        }
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, source) * factor;
            self.data[i * self.cols + target] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * rhs.get(k, j);
                    out.data[i * rhs.cols + j] += v;
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[BigRational], b: &[BigInt]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * BigRational::from_integer(y.clone()))
        .sum()
}

/// Divides a vector by the gcd of its entries. The zero vector is returned unchanged.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)).is_one()
}

/// Clears denominators of a rational vector and returns the primitive integer vector
/// on the same ray.
pub fn primitive_from_rational(v: &[BigRational]) -> Vec<BigInt> {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    primitive(&ints)
}

/// Result of a Smith normal form computation: `u * m * v == s`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn rank(&self) -> usize {
        let n = self.s.rows.min(self.s.cols);
        (0..n).take_while(|&i| !self.s.get(i, i).is_zero()).count()
    }

    /// Nonzero diagonal entries d_1 | d_2 | ...
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form with both transforms tracked.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (u, s, v) = snf_core(m, true, true);
    Snf {
        u: u.expect("tracked"),
        s,
        v: v.expect("tracked"),
    }
}

/// Invariant factors only; skips the unimodular transforms.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (_, s, _) = snf_core(m, false, false);
    let n = s.rows.min(s.cols);
    (0..n)
        .map(|i| s.get(i, i).clone())
        .take_while(|d| !d.is_zero())
        .collect()
}

/// Basis of the integer kernel {x in Z^cols : m x = 0}, returned as columns of a matrix.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let (_, s, v) = snf_core(m, false, true);
    let v = v.expect("tracked");
    let n = s.rows.min(s.cols);
    let r = (0..n).take_while(|&i| !s.get(i, i).is_zero()).count();
    let mut k = IntMatrix::zeros(m.cols, m.cols - r);
    for (jj, j) in (r..m.cols).enumerate() {
        for i in 0..m.cols {
            k.set(i, jj, v.get(i, j).clone());
        }
    }
    k
}

fn snf_core(m: &IntMatrix, track_u: bool, track_v: bool) -> (Option<IntMatrix>, IntMatrix, Option<IntMatrix>) {
    let mut a = m.clone();
    let mut u = track_u.then(|| IntMatrix::identity(m.rows));
    let mut v = track_v.then(|| IntMatrix::identity(m.cols));
    let (rows, cols) = (m.rows, m.cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        a.swap_cols(t, pj);
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -a.get(i, t).div_floor(a.get(t, t));
                a.add_row(i, t, &q);
                if let Some(u) = u.as_mut() {
                    u.add_row(i, t, &q);
                }
                if !a.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -a.get(t, j).div_floor(a.get(t, t));
                a.add_col(j, t, &q);
                if let Some(v) = v.as_mut() {
                    v.add_col(j, t, &q);
                }
                if !a.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // Divisibility of the trailing block by the pivot.
                let offender = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !a.get(i, j).is_multiple_of(a.get(t, t)));
                match offender {
                    None => break,
                    Some((i, _)) => {
                        a.add_row(t, i, &BigInt::one());
                        if let Some(u) = u.as_mut() {
                            u.add_row(t, i, &BigInt::one());
                        }
                        continue;
                    }
                }
            }
            // Move the smallest remaining entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..rows {
                let x = a.get(i, t);
                if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                let x = a.get(t, j);
                if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap_rows(t, best.0);
                if let Some(u) = u.as_mut() {
                    u.swap_rows(t, best.0);
                }
            }
            if best.1 != t {
                a.swap_cols(t, best.1);
                if let Some(v) = v.as_mut() {
                    v.swap_cols(t, best.1);
                }
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if let Some(u) = u.as_mut() {
                u.negate_row(t);
            }
        }
        t += 1;
    }
    (u, a, v)
}

/// Row-style Hermite normal form of `m`: the unique matrix `h = w * m` with `w` unimodular,
/// zero rows dropped, positive pivots, and entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let cols = m.cols;
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        // Euclid down the column until a single nonzero entry remains at row r.
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| !a[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).expect("nonempty");
            a.swap(r, p);
            if nz.len() == 1 {
                break;
            }
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                for j in c..cols {
                    let d = &q * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                for j in c..cols {
                    let d = &q * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    IntMatrix::from_rows(cols, &a)
}

/// Rank over Q.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    row_reduce(&mut m).len()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn row_reduce(m: &mut Vec<Vec<BigRational>>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Basis of the rational null space {x : rows * x = 0}.
pub fn rational_kernel(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -m[r][f].clone();
            }
            x
        })
        .collect()
}

/// Some rational solution of `a x = b`, if one exists.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational], cols: usize) -> Option<Vec<BigRational>> {
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().cloned().map(BigRational::from_integer).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMatrix) -> Snf {
        let snf = smith_normal_form(m);
        assert_eq!(&(&snf.u * m) * &snf.v, snf.s);
        assert!(snf.s.is_diagonal());
        assert!(snf.u.determinant().abs().is_one());
        assert!(snf.v.determinant().abs().is_one());
        let f = snf.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        snf
    }

    #[test]
    fn snf_identity() {
        let snf = check_snf(&IntMatrix::identity(2));
        assert_eq!(snf.s, IntMatrix::identity(2));
    }

    #[test]
    fn snf_two_by_two() {
        // [[2,4],[6,8]]: gcd of entries 2, determinant -8, so diag(2, 4).
        let snf = check_snf(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(snf.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn snf_zero() {
        let snf = check_snf(&IntMatrix::zeros(3, 2));
        assert!(snf.s.is_zero());
        assert_eq!(snf.rank(), 0);
    }

    #[test]
    fn snf_needs_divisibility_fix() {
        // diag(2, 3) must become diag(1, 6).
        let snf = check_snf(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(snf.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn kernel_of_ray_matrix() {
        let m = IntMatrix::from_i64(&[&[1, 0, -1], &[0, 1, -1]]);
        let k = integer_kernel(&m);
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert!(m.mul_vec(&col).iter().all(Zero::is_zero));
        assert!(is_primitive(&col));
    }

    #[test]
    fn determinant_small() {
        let m = IntMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 2]]);
        assert_eq!(m.determinant(), BigInt::from(1));
        let m = IntMatrix::from_i64(&[&[1, 0, 1], &[1, 1, 1], &[0, 1, 2]]);
        assert_eq!(m.determinant(), BigInt::from(2));
    }

    #[test]
    fn hermite_form_is_canonical() {
        let m = IntMatrix::from_i64(&[&[1, 1, 0, 0], &[1, 1, 1, 1]]);
        let h = hermite_normal_form(&m);
        assert_eq!(h, IntMatrix::from_i64(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]));
        let m2 = IntMatrix::from_i64(&[&[0, 0, -1, -1], &[2, 2, 1, 1], &[1, 1, 1, 1]]);
        assert_eq!(hermite_normal_form(&m2), h);
    }

    #[test]
    fn rational_solve_and_kernel() {
        let a = vec![to_rational(&[BigInt::from(1), BigInt::from(2)])];
        let b = vec![BigRational::from_integer(BigInt::from(4))];
        let x = solve_rational(&a, &b, 2).unwrap();
        assert_eq!(&x[0] + &x[1] * BigRational::from_integer(2.into()), b[0]);
        assert_eq!(rational_kernel(&a, 2).len(), 1);
    }
}
