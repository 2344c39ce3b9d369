//! Speed assignment and pure-pursuit path tracking.

mod reference;
mod tracker;

pub use reference::{ReferencePath, ReferencePathError};
pub use tracker::{
    cross_track_error, nominal_velocity, Command, NominalSpeedTable, Tracker, TrackerParams, Trajectory,
};
