//! Scenario files: pretty-printed JSON with the floe polygons and masses.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scenario::{Channel, FloeLimits, IceFloe, Scenario};
use crate::geometry::{ConvexPolygon, PolygonError, Pose, Vec2};

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("malformed scenario file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("floe {index}: {source}")]
    Floe {
        index: usize,
        #[source]
        source: PolygonError,
    },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShipSection {
    mass: f64,
    start_pose: Pose,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FloeRecord {
    vertices: Vec<[f64; 2]>,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    seed: u64,
    concentration: f64,
    channel: Channel,
    limits: FloeLimits,
    ship: ShipSection,
    floes: Vec<FloeRecord>,
}

impl Scenario {
    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            seed: self.seed,
            concentration: self.concentration,
            channel: self.channel,
            limits: self.limits,
            ship: ShipSection {
                mass: self.ship_mass,
                start_pose: self.start_pose,
            },
            floes: self
                .floes
                .iter()
                .map(|f| FloeRecord {
                    vertices: f.shape.vertices().iter().map(|v| [v.x, v.y]).collect(),
                    mass: f.mass,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("scenario serializes");
        s.push('\n');
        s
    }

    /// Parses and validates a scenario file. Never panics on malformed input.
    pub fn from_json(text: &str) -> Result<Self, ScenarioFileError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.channel
            .validate()
            .map_err(|e| ScenarioFileError::Invalid(e.to_string()))?;
        let finite = |v: f64| v.is_finite();
        if !finite(file.concentration) || !(0.0..=1.0).contains(&file.concentration) {
            return Err(ScenarioFileError::Invalid("concentration outside [0, 1]".into()));
        }
        let l = &file.limits;
        if ![l.r_min, l.r_max, l.y_min, l.y_max].into_iter().all(finite) {
            return Err(ScenarioFileError::Invalid("non-finite limits".into()));
        }
        if !(file.ship.mass > 0.0 && file.ship.mass.is_finite()) {
            return Err(ScenarioFileError::Invalid("ship mass must be positive".into()));
        }
        if !file.ship.start_pose.is_finite() {
            return Err(ScenarioFileError::Invalid("start pose must be finite".into()));
        }
        let mut floes = Vec::with_capacity(file.floes.len());
        for (index, rec) in file.floes.into_iter().enumerate() {
            let vertices = rec.vertices.iter().map(|&[x, y]| Vec2::new(x, y)).collect();
            let shape = ConvexPolygon::new(vertices).map_err(|source| ScenarioFileError::Floe { index, source })?;
            if !(rec.mass > 0.0 && rec.mass.is_finite()) {
                return Err(ScenarioFileError::Invalid(format!(
                    "floe {index}: mass must be positive"
                )));
            }
            floes.push(IceFloe {
                id: index as u32,
                shape,
                mass: rec.mass,
            });
        }
        Ok(Scenario {
            seed: file.seed,
            concentration: file.concentration,
            channel: file.channel,
            limits: file.limits,
            ship_mass: file.ship.mass,
            start_pose: file.ship.start_pose,
            floes,
        })
    }

    pub fn write_to(&self, path: &Path) -> Result<(), ScenarioFileError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self, ScenarioFileError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
