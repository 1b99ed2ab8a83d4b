//! Parsing of command-line values and loading of fans and models.

use std::path::Path;

use num_rational::BigRational;
use toric_manin::clemens::AdelicFaceSpec;
use toric_manin::counter::{geometric_schedule, AffineModel};
use toric_manin::fan::{load_fan_document, FanFile, PlaceDoc, PlaceKind};
use toric_manin::fixtures;
use toric_manin::polycore::parse_rational;

use crate::error::CliError;

/// Loads a fan from a file, or from the bundled gallery when no such file exists.
pub fn load_fan(spec: &str) -> Result<FanFile, CliError> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)?;
        return Ok(load_fan_document(&text)?);
    }
    if fixtures::FANS.iter().any(|(n, _)| *n == spec) {
        return Ok(fixtures::fan(spec)?);
    }
    Err(CliError::Invalid(format!(
        "`{spec}` is neither a file nor a bundled fan ({})",
        fixtures::FANS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
    )))
}

pub fn load_model(spec: &str) -> Result<AffineModel, CliError> {
    if Path::new(spec).exists() {
        return Ok(AffineModel::from_json(&std::fs::read_to_string(spec)?)?);
    }
    if spec == "quadric" {
        return Ok(fixtures::quadric_affine()?);
    }
    Err(CliError::Invalid(format!("`{spec}` is neither a file nor a bundled model (quadric)")))
}

pub fn index_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| CliError::Invalid(format!("bad index `{s}`"))))
        .collect()
}

pub fn int_list(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(str::trim)
        .map(|s| s.parse::<i64>().map_err(|_| CliError::Invalid(format!("bad integer `{s}`"))))
        .collect()
}

pub fn rational_list(text: &str) -> Result<Vec<BigRational>, CliError> {
    text.split(',')
        .map(str::trim)
        .map(|s| parse_rational(s).ok_or_else(|| CliError::Invalid(format!("bad rational `{s}`"))))
        .collect()
}

/// `NAME=IDXLIST`, `NAME:real=IDXLIST` or `NAME:complex=IDXLIST`.
pub fn face(text: &str) -> Result<PlaceDoc, CliError> {
    let (head, rays) = text
        .split_once('=')
        .ok_or_else(|| CliError::Invalid(format!("face `{text}` must look like place=IDXLIST")))?;
    let (name, kind) = match head.split_once(':') {
        Some((n, "real")) => (n, PlaceKind::Real),
        Some((n, "complex")) => (n, PlaceKind::Complex),
        Some((_, k)) => return Err(CliError::Invalid(format!("unknown place kind `{k}`"))),
        None => (head, PlaceKind::Real),
    };
    let mut face_rays = index_list(rays)?;
    face_rays.sort_unstable();
    Ok(PlaceDoc {
        name: name.to_string(),
        kind,
        face_rays,
    })
}

/// Boundary and face choice: explicit flags win over the fan file.
pub fn configuration(file: &FanFile, boundary: Option<&str>, faces: &[String]) -> Result<(Vec<usize>, AdelicFaceSpec), CliError> {
    let boundary = match boundary {
        Some(b) => index_list(b)?,
        None => file.boundary_rays.clone(),
    };
    let places = if faces.is_empty() {
        file.places.clone()
    } else {
        faces.iter().map(|f| face(f)).collect::<Result<Vec<_>, _>>()?
    };
    Ok((boundary, AdelicFaceSpec { places }))
}

/// `geometric` (1000 * 2^k up to tmax) or an explicit strictly increasing list.
pub fn schedule(text: Option<&str>, tmax: u64) -> Result<Vec<u64>, CliError> {
    match text {
        None | Some("geometric") => Ok(geometric_schedule(1000.min(tmax), tmax)),
        Some(list) => {
            let ts: Vec<u64> = list
                .split(',')
                .map(str::trim)
                .map(|s| s.parse::<u64>().map_err(|_| CliError::Invalid(format!("bad checkpoint `{s}`"))))
                .collect::<Result<_, _>>()?;
            if ts.is_empty() || ts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Invalid("schedule must be strictly increasing".into()));
            }
            Ok(ts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn faces_and_lists() {
        let f = face("inf=4,3").unwrap();
        assert_eq!((f.name.as_str(), f.kind, f.face_rays), ("inf", PlaceKind::Real, vec![3, 4]));
        assert_eq!(face("w:complex=").unwrap().face_rays, Vec::<usize>::new());
        assert!(face("w:p-adic=1").is_err());
        assert!(face("1,2").is_err());
        assert_eq!(int_list("1, -2,0").unwrap(), vec![1, -2, 0]);
        assert!(index_list("1,x").is_err());
    }

    #[test]
    fn schedules() {
        assert_eq!(schedule(None, 1_000_000).unwrap().len(), 11);
        assert_eq!(schedule(Some("5,10,20"), 0).unwrap(), vec![5, 10, 20]);
        assert!(schedule(Some("5,5"), 0).is_err());
        assert_eq!(schedule(None, 100).unwrap(), vec![100]);
    }

    #[test]
    fn gallery_names_resolve() {
        assert_eq!(load_fan("bl2p2").unwrap().fan.ray_count(), 5);
        assert!(load_fan("no-such-fan").is_err());
        assert!(load_model("quadric").is_ok());
    }
}
