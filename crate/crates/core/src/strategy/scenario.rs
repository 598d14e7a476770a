//! Corridor scenarios: point features, corridor bounds, the entry
//! distribution, and the memorized feature-pair chain.
//!
//! Scenarios load from a versioned JSON document (`schema_version` 1) whose
//! fields mirror [`Scenario`]. Geometry conventions: meters, x increasing
//! along the flight direction. Memorized pairs are ordered (left feature,
//! right feature) relative to the corridor direction; the loom-balancing law
//! is stable for that ordering.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Role a point feature plays in the world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// Physical obstacle that triggers collision-course overrides.
    Obstacle,
    /// Visual feature usable by the feature-pair laws.
    Tree,
    /// Memorized landmark (recalled, not necessarily an obstacle).
    MemorizedLandmark,
}

/// One point feature of the corridor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub id: String,
    /// Position in meters: `[x, y]`.
    pub position: [f64; 2],
    pub kind: FeatureKind,
}

impl Feature {
    pub fn point(&self) -> Vector2<f64> {
        Vector2::new(self.position[0], self.position[1])
    }
}

/// Gaussian model for entry position and heading at the corridor boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryModel {
    /// Mean entry position `[x, y]` in meters.
    pub mean: [f64; 2],
    /// 2x2 position covariance, row major, symmetric PSD (m^2).
    pub covariance: [[f64; 2]; 2],
    /// Mean entry heading in radians (0 = +x).
    pub heading_mean: f64,
    /// Heading standard deviation in radians.
    pub heading_std: f64,
}

impl EntryModel {
    pub fn mean_point(&self) -> Vector2<f64> {
        Vector2::new(self.mean[0], self.mean[1])
    }

    pub fn covariance_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(
            self.covariance[0][0],
            self.covariance[0][1],
            self.covariance[1][0],
            self.covariance[1][1],
        )
    }

    /// Lower Cholesky factor of the covariance (PSD-tolerant).
    pub fn cholesky(&self) -> Result<Matrix2<f64>> {
        let c = self.covariance_matrix();
        let l11 = c[(0, 0)].max(0.0).sqrt();
        let l21 = if l11 > 0.0 { c[(1, 0)] / l11 } else { 0.0 };
        let rem = c[(1, 1)] - l21 * l21;
        if rem < -1e-12 {
            return Err(Error::Config(
                "entry covariance not positive semi-definite".into(),
            ));
        }
        Ok(Matrix2::new(l11, 0.0, l21, rem.max(0.0).sqrt()))
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.covariance_matrix();
        if (c[(0, 1)] - c[(1, 0)]).abs() > 1e-12 {
            return Err(Error::Config("entry covariance not symmetric".into()));
        }
        if c[(0, 0)] < 0.0 || c[(1, 1)] < 0.0 || c.determinant() < -1e-12 {
            return Err(Error::Config(
                "entry covariance not positive semi-definite".into(),
            ));
        }
        if !self.heading_std.is_finite() || self.heading_std < 0.0 {
            return Err(Error::Config("entry heading std must be non-negative".into()));
        }
        self.cholesky()?;
        Ok(())
    }
}

/// Two polylines (upper edge, lower edge) bounding the corridor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorBounds {
    pub upper: Vec<[f64; 2]>,
    pub lower: Vec<[f64; 2]>,
}

/// Current schema version for scenario documents.
pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// A corridor world: features, wooded-area edges, the entry distribution and
/// the memorized feature-pair chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub description: String,
    pub features: Vec<Feature>,
    pub corridor_bounds: CorridorBounds,
    /// Entry-boundary distribution.
    pub entry: EntryModel,
    /// Ordered feature-id pairs for the distance-maintenance chain, each
    /// (left, right) relative to the corridor direction.
    pub memorized_sequence: Vec<(String, String)>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// The built-in corridor shipped with the crate.
    pub fn default_corridor() -> Self {
        Self::from_json(include_str!("../../data/corridor.json"))
            .expect("built-in corridor is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported scenario schema_version {} (expected {SCENARIO_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.corridor_bounds.upper.len() < 2 || self.corridor_bounds.lower.len() < 2 {
            return Err(Error::Config(
                "corridor bounds need at least 2 points per edge".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for f in &self.features {
            if !seen.insert(f.id.as_str()) {
                return Err(Error::Config(format!("duplicate feature id {}", f.id)));
            }
            if f.position.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!(
                    "feature {} has non-finite position",
                    f.id
                )));
            }
        }
        for (a, b) in &self.memorized_sequence {
            if a == b {
                return Err(Error::Config(format!(
                    "memorized pair ({a}, {b}) repeats one feature"
                )));
            }
            for id in [a, b] {
                if !seen.contains(id.as_str()) {
                    return Err(Error::Config(format!(
                        "memorized sequence references unknown feature {id}"
                    )));
                }
            }
        }
        self.entry.validate()?;
        Ok(())
    }

    pub fn feature(&self, id: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.id == id)
    }

    pub fn obstacles(&self) -> impl Iterator<Item = &Feature> {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Obstacle)
    }

    /// Axis-aligned bounding box of the corridor edges, `(min, max)`.
    pub fn bounds_box(&self) -> (Vector2<f64>, Vector2<f64>) {
        let mut min = Vector2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vector2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self
            .corridor_bounds
            .upper
            .iter()
            .chain(&self.corridor_bounds.lower)
        {
            min.x = min.x.min(p[0]);
            min.y = min.y.min(p[1]);
            max.x = max.x.max(p[0]);
            max.y = max.y.max(p[1]);
        }
        (min, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_corridor_is_valid() {
        let s = Scenario::default_corridor();
        assert_eq!(s.schema_version, SCENARIO_SCHEMA_VERSION);
        assert!(s.feature("pole").is_some());
        assert!(!s.memorized_sequence.is_empty());
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn validation_rejects_unknown_pair_ids() {
        let mut s = Scenario::default_corridor();
        s.memorized_sequence.push(("nope".into(), "pole".into()));
        assert!(matches!(s.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn validation_rejects_asymmetric_covariance() {
        let mut s = Scenario::default_corridor();
        s.entry.covariance[0][1] = 0.5;
        s.entry.covariance[1][0] = -0.5;
        assert!(s.validate().is_err());
    }

    #[test]
    fn cholesky_reproduces_covariance() {
        let entry = EntryModel {
            mean: [0.0, 0.0],
            covariance: [[0.04, 0.01], [0.01, 0.25]],
            heading_mean: 0.0,
            heading_std: 0.1,
        };
        let l = entry.cholesky().unwrap();
        let c = l * l.transpose();
        assert!((c - entry.covariance_matrix()).norm() < 1e-12);
    }
}
