//! Regions cut out by monomial inequalities in the absolute values of the coordinates.
//!
//! A constraint reads `c * prod |x_i|^a_i <= d * prod |x_i|^b_i` (or `<`, `>=`, `>`). In text
//! form, factors are integers, variable names or `name^k`, joined by `*`; bars are optional,
//! so `x0<=x1`, `|x0| <= |x1|` and `x1 <= 2*x0` are all accepted. Constraints are joined by `;`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::CounterError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionConstraint {
    pub lhs_coef: u64,
    pub lhs: Vec<u32>,
    pub rhs_coef: u64,
    pub rhs: Vec<u32>,
    pub strict: bool,
}

impl RegionConstraint {
    pub fn holds(&self, abs: &[u64]) -> bool {
        match (eval_u128(self.lhs_coef, &self.lhs, abs), eval_u128(self.rhs_coef, &self.rhs, abs)) {
            (Some(l), Some(r)) => {
                if self.strict {
                    l < r
                } else {
                    l <= r
                }
            }
            _ => {
                let l = eval_big(self.lhs_coef, &self.lhs, abs);
                let r = eval_big(self.rhs_coef, &self.rhs, abs);
                if self.strict {
                    l < r
                } else {
                    l <= r
                }
            }
        }
    }
}

fn eval_u128(c: u64, e: &[u32], abs: &[u64]) -> Option<u128> {
    let mut acc = c as u128;
    for (&k, &x) in e.iter().zip(abs) {
        for _ in 0..k {
            acc = acc.checked_mul(x as u128)?;
        }
    }
    Some(acc)
}

fn eval_big(c: u64, e: &[u32], abs: &[u64]) -> BigUint {
    let mut acc = BigUint::from(c);
    for (&k, &x) in e.iter().zip(abs) {
        if k > 0 {
            acc *= BigUint::from(x).pow(k);
        }
    }
    acc
}

/// A conjunction of constraints; the empty conjunction is everything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub constraints: Vec<RegionConstraint>,
}

impl Region {
    pub fn all() -> Self {
        Region {
            id: "all".into(),
            constraints: Vec::new(),
        }
    }

    pub fn contains(&self, abs: &[u64]) -> bool {
        self.constraints.iter().all(|c| c.holds(abs))
    }

    /// Parses `body` (constraints joined by `;`) over the named variables.
    pub fn parse(id: &str, body: &str, vars: &[String]) -> Result<Self, CounterError> {
        let constraints = body
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|c| parse_constraint(c, vars))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Region {
            id: id.to_string(),
            constraints,
        })
    }

    /// Parses `NAME=BODY`.
    pub fn parse_named(text: &str, vars: &[String]) -> Result<Self, CounterError> {
        let (id, body) = text
            .split_once('=')
            .filter(|(id, _)| !id.contains('<') && !id.contains('>'))
            .ok_or_else(|| CounterError::Parse(format!("region `{text}` must look like NAME=CONSTRAINT;...")))?;
        Region::parse(id.trim(), body, vars)
    }
}

fn parse_constraint(text: &str, vars: &[String]) -> Result<RegionConstraint, CounterError> {
    let ops = ["<=", ">=", "<", ">"];
    let (pos, op) = ops
        .iter()
        .filter_map(|op| text.find(op).map(|p| (p, *op)))
        .min_by_key(|&(p, op)| (p, std::cmp::Reverse(op.len())))
        .ok_or_else(|| CounterError::Parse(format!("no comparison in `{text}`")))?;
    let left = &text[..pos];
    let right = &text[pos + op.len()..];
    let (lc, le) = parse_side(left, vars)?;
    let (rc, re) = parse_side(right, vars)?;
    Ok(match op {
        "<=" => RegionConstraint { lhs_coef: lc, lhs: le, rhs_coef: rc, rhs: re, strict: false },
        "<" => RegionConstraint { lhs_coef: lc, lhs: le, rhs_coef: rc, rhs: re, strict: true },
        ">=" => RegionConstraint { lhs_coef: rc, lhs: re, rhs_coef: lc, rhs: le, strict: false },
        _ => RegionConstraint { lhs_coef: rc, lhs: re, rhs_coef: lc, rhs: le, strict: true },
    })
}

fn parse_side(text: &str, vars: &[String]) -> Result<(u64, Vec<u32>), CounterError> {
    let cleaned: String = text.chars().filter(|c| *c != '|' && !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(CounterError::Parse(format!("empty side in `{text}`")));
    }
    let mut coef: u64 = 1;
    let mut exps = vec![0u32; vars.len()];
    for factor in cleaned.split('*') {
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => (b, p.parse::<u32>().map_err(|_| CounterError::Parse(format!("bad exponent in `{factor}`")))?),
            None => (factor, 1),
        };
        if let Ok(c) = base.parse::<u64>() {
            for _ in 0..power {
                coef = coef.checked_mul(c).ok_or_else(|| CounterError::Overflow(text.to_string()))?;
            }
        } else if let Some(i) = vars.iter().position(|v| v == base) {
            exps[i] += power;
        } else {
            return Err(CounterError::Parse(format!("unknown variable `{base}`")));
        }
    }
    Ok((coef, exps))
}
