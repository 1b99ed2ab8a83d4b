//! Counting integral points of bounded height and fitting growth exponents.
//!
//! Two enumeration modes are provided. [`cox`] walks Cox coordinates of the open part U of a
//! smooth toric compactification, keeping tuples whose prime divisibility pattern is a cone and
//! counting orbits of the sign units. [`affine`] searches integer solutions of user-supplied
//! polynomial equations. Both bin each point by its height, so a single pass gives the counts at
//! every checkpoint.
//!
//! Only the archimedean monomial maximum is evaluated. For a nef class and a point whose
//! divisibility pattern at p is contained in a cone sigma_p, the sigma_p monomial has p-adic
//! absolute value 1 and every other monomial at most 1, so each finite place contributes 1.

pub mod affine;
pub mod cox;
pub mod fit;
pub mod height;
pub mod region;

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use affine::{enumerate_affine, AffineModel};
pub use cox::{enumerate_cox, CoxModel};
pub use fit::{fit_asymptotics, fit_points, FitResult};
pub use height::{height_eval, HeightSpec};
pub use region::{Region, RegionConstraint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CounterError {
    #[error("class is not nef: exponent {exponent} on ray {ray} in cone {cone:?}")]
    NotNef { cone: Vec<usize>, ray: usize, exponent: String },
    #[error("class is not Cartier on cone {0:?}")]
    NotCartier(Vec<usize>),
    #[error("maximal cone {0:?} is not full dimensional; a complete fan is required")]
    NotComplete(Vec<usize>),
    #[error("point lies on the boundary: height 0")]
    ZeroHeight,
    #[error("Pic U has torsion {0:?}; use the affine model instead")]
    Torsion(Vec<String>),
    #[error("the fan of U is not smooth")]
    NotSmooth,
    #[error("variable {0} is not bounded by the height")]
    Unbounded(String),
    #[error("coordinate vector has length {0}, expected {1}")]
    Length(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arithmetic overflow while evaluating {0}")]
    Overflow(String),
    #[error("fit: {0}")]
    Fit(String),
    #[error("{0}")]
    Model(String),
}

/// N(T) for one model, region and height bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub model_id: String,
    pub region_id: String,
    #[serde(rename = "T")]
    pub t: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub millis: u64,
}

/// Options shared by both enumeration modes.
#[derive(Debug, Clone)]
pub struct CountOptions {
    pub workers: usize,
    /// Also count points of U outside the torus (Cox mode only).
    pub include_boundary: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            include_boundary: false,
        }
    }
}

/// Checkpoints `start * 2^k` below `tmax`, followed by `tmax` itself.
pub fn geometric_schedule(start: u64, tmax: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut t = start.max(1);
    while t < tmax {
        out.push(t);
        t = t.saturating_mul(2);
    }
    out.push(tmax);
    out
}

/// Sorted, deduplicated checkpoints and the per-bin accumulator used by both modes.
#[derive(Debug, Clone)]
pub(crate) struct Bins {
    pub bounds: Vec<u64>,
}

impl Bins {
    pub fn new(checkpoints: &[u64]) -> Self {
        let mut b = checkpoints.to_vec();
        b.sort_unstable();
        b.dedup();
        Bins { bounds: b }
    }

    pub fn max(&self) -> u64 {
        self.bounds.last().copied().unwrap_or(0)
    }

    /// Index of the first checkpoint >= h.
    pub fn bin(&self, h: u128) -> Option<usize> {
        let i = self.bounds.partition_point(|&t| (t as u128) < h);
        (i < self.bounds.len()).then_some(i)
    }

    pub fn records(&self, model_id: &str, region_id: &str, counts: &[u128], started: Instant) -> Vec<CountRecord> {
        let millis = started.elapsed().as_millis() as u64;
        let mut acc: u128 = 0;
        self.bounds
            .iter()
            .zip(counts)
            .map(|(&t, &c)| {
                acc += c;
                CountRecord {
                    model_id: model_id.to_string(),
                    region_id: region_id.to_string(),
                    t,
                    n: acc as u64,
                    millis,
                }
            })
            .collect()
    }
}

/// Writes records as CSV with the header `model_id,region_id,T,N,millis`.
pub fn write_records_csv<W: Write>(w: W, records: &[CountRecord]) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records_csv<R: std::io::Read>(r: R) -> Result<Vec<CountRecord>, csv::Error> {
    csv::Reader::from_reader(r).deserialize().collect()
}

/// Largest r with r^e <= y.
pub(crate) fn iroot(y: u128, e: u32) -> u128 {
    if e == 0 {
        return u128::MAX;
    }
    if e == 1 || y < 2 {
        return y;
    }
    let mut r = (y as f64).powf(1.0 / e as f64) as u128;
    while r > 0 && pow_le(r, e, y).is_none() {
        r -= 1;
    }
    while pow_le(r + 1, e, y).is_some() {
        r += 1;
    }
    r
}

/// r^e when it is at most `limit`.
pub(crate) fn pow_le(r: u128, e: u32, limit: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(r)?;
        if acc > limit {
            return None;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_reaches_tmax() {
        let s = geometric_schedule(1000, 1_000_000);
        assert_eq!(s.first(), Some(&1000));
        assert_eq!(s.last(), Some(&1_000_000));
        assert_eq!(s.len(), 11);
    }

    #[test]
    fn roots() {
        assert_eq!(iroot(1_000_000, 2), 1000);
        assert_eq!(iroot(999_999, 2), 999);
        assert_eq!(iroot(26, 3), 2);
        assert_eq!(iroot(27, 3), 3);
        assert_eq!(iroot(u64::MAX as u128, 2), 4294967295);
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![CountRecord {
            model_id: "m".into(),
            region_id: "all".into(),
            t: 10,
            n: 21,
            millis: 0,
        }];
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("model_id,region_id,T,N,millis"));
        assert_eq!(read_records_csv(&buf[..]).unwrap(), recs);
    }
}
