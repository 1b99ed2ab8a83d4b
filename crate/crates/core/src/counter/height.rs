//! Monomial-max heights attached to nef torus-invariant divisors.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::CounterError;
use crate::fan::Fan;
use crate::polycore::matrix::{solve_rational, to_rational};

/// Height for the class of `lambda`: for every maximal cone sigma, the exponents
/// `e_rho = lambda_rho + <m_sigma, n_rho>` with `<m_sigma, n_rho> = -lambda_rho` on sigma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightSpec {
    fan: Fan,
    lambda: Vec<i64>,
    exponents: Vec<Vec<u32>>,
}

impl HeightSpec {
    pub fn new(fan: &Fan, lambda: &[i64]) -> Result<Self, CounterError> {
        let r = fan.ray_count();
        if lambda.len() != r {
            return Err(CounterError::Length(lambda.len(), r));
        }
        let n = fan.lattice_rank();
        let mut exponents = Vec::with_capacity(fan.max_cones().len());
        for sigma in fan.max_cones() {
            if sigma.len() != n {
                return Err(CounterError::NotComplete(sigma.clone()));
            }
            let rows: Vec<Vec<BigRational>> = sigma.iter().map(|&i| to_rational(&fan.ray_big(i))).collect();
            let rhs: Vec<BigRational> = sigma.iter().map(|&i| BigRational::from_integer(BigInt::from(-lambda[i]))).collect();
            let m = solve_rational(&rows, &rhs, n).ok_or_else(|| CounterError::NotCartier(sigma.clone()))?;
            let mut e = Vec::with_capacity(r);
            for rho in 0..r {
                let pairing: BigRational = m
                    .iter()
                    .zip(fan.rays()[rho].iter())
                    .map(|(a, &b)| a * BigRational::from_integer(BigInt::from(b)))
                    .sum();
                let v = pairing + BigRational::from_integer(BigInt::from(lambda[rho]));
                if !v.is_integer() {
                    return Err(CounterError::NotCartier(sigma.clone()));
                }
                if v.is_negative() {
                    return Err(CounterError::NotNef {
                        cone: sigma.clone(),
                        ray: rho,
                        exponent: v.to_string(),
                    });
                }
                e.push(v.to_integer().to_u32().ok_or_else(|| CounterError::Overflow("exponent".into()))?);
            }
            exponents.push(e);
        }
        Ok(HeightSpec {
            fan: fan.clone(),
            lambda: lambda.to_vec(),
            exponents,
        })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn lambda(&self) -> &[i64] {
        &self.lambda
    }

    /// One exponent vector per maximal cone, in the fan's maximal-cone order.
    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Distinct monomials in the variables `vars` after setting every other coordinate to 1.
    pub fn monomials_on(&self, vars: &[usize]) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = self.exponents.iter().map(|e| vars.iter().map(|&v| e[v]).collect()).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// max over maximal cones of prod |x_rho|^(e_rho), exactly.
pub fn height_eval(h: &HeightSpec, pt: &[i64]) -> Result<BigUint, CounterError> {
    let r = h.fan.ray_count();
    if pt.len() != r {
        return Err(CounterError::Length(pt.len(), r));
    }
    let mut best = BigUint::zero();
    for e in &h.exponents {
        let mut v = BigUint::from(1u32);
        for (x, &k) in pt.iter().zip(e) {
            if k > 0 {
                v *= BigUint::from(x.unsigned_abs()).pow(k);
            }
        }
        if v > best {
            best = v;
        }
    }
    if best.is_zero() {
        return Err(CounterError::ZeroHeight);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_degree_one() {
        let p1 = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let h = HeightSpec::new(&p1, &[1, 0]).unwrap();
        assert_eq!(height_eval(&h, &[3, -7]).unwrap(), BigUint::from(7u32));
        assert_eq!(height_eval(&h, &[-5, 2]).unwrap(), BigUint::from(5u32));
        assert_eq!(height_eval(&h, &[0, 0]), Err(CounterError::ZeroHeight));
    }

    #[test]
    fn bl2p2_log_anticanonical() {
        let f = Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![-1, -1], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 0]],
        )
        .unwrap();
        let h = HeightSpec::new(&f, &[1, 1, 0, 0, 0]).unwrap();
        let mons = h.monomials_on(&[0, 1]);
        assert_eq!(mons, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(height_eval(&h, &[3, -4, 1, 1, 1]).unwrap(), BigUint::from(12u32));
    }

    #[test]
    fn non_nef_is_rejected() {
        let p1 = Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(HeightSpec::new(&p1, &[-1, 0]), Err(CounterError::NotNef { .. })));
    }
}
