//! Bundled example fans and models.

use crate::counter::{AffineModel, CounterError};
use crate::fan::{load_fan_document, FanError, FanFile};

pub const P1: &str = include_str!("../fixtures/p1.json");
pub const P2: &str = include_str!("../fixtures/p2.json");
pub const A2: &str = include_str!("../fixtures/a2.json");
pub const P1XP1: &str = include_str!("../fixtures/p1xp1.json");
pub const BL2P2: &str = include_str!("../fixtures/bl2p2.json");
pub const QUADRIC_CONE: &str = include_str!("../fixtures/quadric_cone.json");
pub const QUADRIC_AFFINE: &str = include_str!("../fixtures/quadric_affine.json");

/// Fan fixtures by name.
pub const FANS: [(&str, &str); 6] = [
    ("p1", P1),
    ("p2", P2),
    ("a2", A2),
    ("p1xp1", P1XP1),
    ("bl2p2", BL2P2),
    ("quadric_cone", QUADRIC_CONE),
];

pub fn fan(name: &str) -> Result<FanFile, FanError> {
    let text = FANS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| FanError::Parse(format!("no bundled fan named `{name}`")))?;
    load_fan_document(text)
}

pub fn quadric_affine() -> Result<AffineModel, CounterError> {
    AffineModel::from_json(QUADRIC_AFFINE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_load() {
        for (name, _) in FANS {
            let f = fan(name).unwrap();
            assert!(f.fan.is_smooth(), "{name}");
        }
        assert_eq!(fan("bl2p2").unwrap().fan.max_cones().len(), 5);
        assert!(fan("nope").is_err());
        assert_eq!(quadric_affine().unwrap().vars().len(), 3);
    }
}
