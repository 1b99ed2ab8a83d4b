//! Exact integer and rational linear algebra, polyhedral cones and linear programming.
//!
//! Nothing in this layer uses floating point. Matrices hold [`BigInt`]s, vectors of
//! rationals hold reduced [`BigRational`]s.

pub mod cone;
pub mod lp;
pub mod matrix;

pub use cone::{dual_cone, lattice_index, minimal_face_containing, triangulate, triangulate_with_order, ConeData, Face, HRep};
pub use matrix::{hermite_normal_form, integer_kernel, invariant_factors, smith_normal_form, IntMatrix, Snf};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// A vector of exact rationals.
pub type RationalVector = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point is not in the cone")]
    NotInCone,
    #[error("cone is not pointed")]
    NotPointed,
}

/// Parses a rational such as `3`, `-1/2`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Correctly rounded conversion of an exact rational to `f64`.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::{Signed, ToPrimitive, Zero};
    if q.is_zero() {
        return 0.0;
    }
    let neg = q.is_negative();
    let num = q.numer().abs();
    let den = q.denom().clone();
    // Scale so the integer quotient carries at least 66 significant bits, then fold the
    // remainder into a sticky bit so the final rounding is exact.
    let shift = 66i64 - (num.bits() as i64 - den.bits() as i64);
    let (n, d) = if shift >= 0 {
        (num << shift as usize, den)
    } else {
        (num, den << (-shift) as usize)
    };
    let (mut quo, rem) = num_integer::Integer::div_rem(&n, &d);
    if !rem.is_zero() {
        quo = quo | BigInt::from(1);
    }
    let mant = quo.to_f64().unwrap_or(f64::INFINITY);
    let v = mant * 2f64.powi(-shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_and_rounding() {
        let q = parse_rational("-1/3").unwrap();
        assert_eq!(rational_to_f64(&q), -1.0 / 3.0);
        assert_eq!(rational_to_f64(&parse_rational("7").unwrap()), 7.0);
        assert!(parse_rational("1/0").is_none());
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(10).pow(30));
        assert_eq!(rational_to_f64(&tiny), 1e-30);
    }
}
