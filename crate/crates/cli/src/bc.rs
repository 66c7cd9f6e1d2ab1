//! Boundary-condition files: points plus direction angles in degrees.

use serde::{Deserialize, Serialize};
use sr_elastica::se2::{BoundaryConditions, Mode};
use sr_elastica::Error;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndJson {
    pub x: f64,
    pub y: f64,
    pub dir_deg: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcJson {
    pub start: EndJson,
    pub end: EndJson,
    pub mode: Mode,
}

impl BcJson {
    pub fn to_bc(&self) -> Result<BoundaryConditions, Error> {
        let (s, e) = (self.start, self.end);
        BoundaryConditions::from_angles(
            (s.x, s.y, s.dir_deg.to_radians()),
            (e.x, e.y, e.dir_deg.to_radians()),
            self.mode,
        )
    }
}

pub fn parse(text: &str) -> Result<BoundaryConditions, Error> {
    let raw: BcJson = serde_json::from_str(text).map_err(|e| Error::Parse(format!("boundary conditions: {e}")))?;
    raw.to_bc()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_become_radians() {
        let bc = parse(
            r#"{"start":{"x":0,"y":0,"dir_deg":90},"end":{"x":1,"y":0,"dir_deg":0},"mode":"projective"}"#,
        )
        .unwrap();
        assert!((bc.start_angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(bc.mode, Mode::Projective);
    }

    #[test]
    fn rejects_unknown_mode_and_fields() {
        assert!(parse(r#"{"start":{"x":0,"y":0,"dir_deg":0},"end":{"x":1,"y":0,"dir_deg":0},"mode":"up"}"#).is_err());
        assert!(parse(
            r#"{"start":{"x":0,"y":0,"dir_deg":0,"z":1},"end":{"x":1,"y":0,"dir_deg":0},"mode":"oriented"}"#
        )
        .is_err());
    }

    #[test]
    fn rejects_coincident_points() {
        let e = parse(r#"{"start":{"x":1,"y":1,"dir_deg":0},"end":{"x":1,"y":1,"dir_deg":0},"mode":"oriented"}"#);
        assert!(matches!(e, Err(Error::DegenerateBoundary(_))));
    }
}
