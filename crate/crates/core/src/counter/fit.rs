//! Least-squares fit of `log N = a log T + (b - 1) log log T + log c`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{CountRecord, CounterError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a_hat: f64,
    pub b_hat: f64,
    pub c_hat: f64,
    /// Root mean square of the residuals of log N.
    pub residual: f64,
    pub checkpoints: usize,
}

pub const MIN_CHECKPOINTS: usize = 6;
pub const MIN_DECADES: f64 = 3.0;

/// Fits the records of a single model and region.
pub fn fit_asymptotics(records: &[CountRecord]) -> Result<FitResult, CounterError> {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.t as f64, r.n as f64)).collect();
    fit_points(&pts)
}

/// Fits `(T, N)` pairs.
pub fn fit_points(pts: &[(f64, f64)]) -> Result<FitResult, CounterError> {
    if pts.len() < MIN_CHECKPOINTS {
        return Err(CounterError::Fit(format!("{} checkpoints, need at least {MIN_CHECKPOINTS}", pts.len())));
    }
    if pts.iter().any(|&(t, n)| n <= 0.0 || t <= std::f64::consts::E) {
        return Err(CounterError::Fit("counts must be positive and T > e".into()));
    }
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    if (hi / lo).log10() < MIN_DECADES - 1e-9 {
        return Err(CounterError::Fit(format!("checkpoints span {:.2} decades, need {MIN_DECADES}", (hi / lo).log10())));
    }
    let m = pts.len();
    let x = DMatrix::from_fn(m, 3, |i, j| {
        let lt = pts[i].0.ln();
        match j {
            0 => lt,
            1 => lt.ln(),
            _ => 1.0,
        }
    });
    let y = DVector::from_fn(m, |i, _| pts[i].1.ln());
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > smax * 1e-12) {
        return Err(CounterError::Fit("degenerate design matrix".into()));
    }
    let beta = svd.solve(&y, 0.0).map_err(|e| CounterError::Fit(e.to_string()))?;
    let r = &y - &x * &beta;
    Ok(FitResult {
        a_hat: beta[0],
        b_hat: beta[1] + 1.0,
        c_hat: beta[2].exp(),
        residual: (r.norm_squared() / m as f64).sqrt(),
        checkpoints: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::geometric_schedule;

    fn synth(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        geometric_schedule(1000, 1_000_000).into_iter().map(|t| (t as f64, f(t as f64))).collect()
    }

    #[test]
    fn t_log_t() {
        let r = fit_points(&synth(|t| 4.0 * t * t.ln())).unwrap();
        assert!((r.a_hat - 1.0).abs() < 1e-6 && (r.b_hat - 2.0).abs() < 1e-6);
        assert!((r.c_hat - 4.0).abs() < 1e-4);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn linear() {
        let r = fit_points(&synth(|t| 7.0 * t)).unwrap();
        assert!((r.a_hat - 1.0).abs() < 0.05 && (r.b_hat - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        let few: Vec<(f64, f64)> = synth(|t| t).into_iter().take(5).collect();
        assert!(fit_points(&few).is_err());
        let narrow: Vec<(f64, f64)> = (0..8).map(|i| (1000.0 + i as f64, 5.0)).collect();
        assert!(fit_points(&narrow).is_err());
        let mut zero = synth(|t| t);
        zero[0].1 = 0.0;
        assert!(fit_points(&zero).is_err());
    }
}
