use serde::{Deserialize, Serialize};

use super::reference::ReferencePath;
use crate::geometry::{wrap_to_pi, DubinsPath, Pose, Vec2};
use crate::sim::ShipState;

/// A path with the constant speed to run it at.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub path: ReferencePath,
    pub nominal_speed: f64,
}

impl Trajectory {
    pub fn new(path: ReferencePath, nominal_speed: f64) -> Self {
        assert!(nominal_speed > 0.0, "nominal speed must be positive");
        Self { path, nominal_speed }
    }

    pub fn from_dubins(path: &DubinsPath, nominal_speed: f64) -> Self {
        let reference = ReferencePath::from_dubins(path).expect("Dubins paths are finite and nonempty");
        Self::new(reference, nominal_speed)
    }
}

/// Commanded speed by ice concentration: the first row whose upper bound is
/// at or above the concentration applies; the last row covers the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalSpeedTable {
    /// `(concentration upper bound, speed m/s)`, ascending in bound.
    pub rows: Vec<(f64, f64)>,
}

impl Default for NominalSpeedTable {
    fn default() -> Self {
        Self { rows: vec![(1.0, 0.3)] }
    }
}

impl NominalSpeedTable {
    pub fn lookup(&self, concentration: f64) -> f64 {
        self.rows
            .iter()
            .find(|&&(bound, _)| concentration <= bound)
            .or(self.rows.last())
            .map_or(0.3, |&(_, v)| v)
    }
}

/// Nominal speed from the default table.
pub fn nominal_velocity(concentration: f64) -> f64 {
    NominalSpeedTable::default().lookup(concentration)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackerParams {
    /// Pure-pursuit lookahead along the path, meters.
    pub lookahead: f64,
    /// Proportional gain on speed error in the thrust command.
    pub speed_gain: f64,
    /// Scale from commanded yaw rate to rudder: `δ = r / K`, with K the Nomoto gain.
    pub nomoto_k: f64,
    /// Yaw lag the curvature feedforward looks ahead by, seconds of travel.
    /// Matches the Nomoto time constant.
    pub preview_time: f64,
    /// Weight of the pure-pursuit correction on top of the feedforward.
    pub pursuit_gain: f64,
    pub r_min: f64,
    /// How far behind the previous progress the projection may fall back.
    pub search_back: f64,
    /// How far ahead of the previous progress the projection may jump.
    pub search_ahead: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            lookahead: 1.5,
            speed_gain: 1.0,
            nomoto_k: 0.5,
            preview_time: 1.0,
            pursuit_gain: 0.5,
            r_min: 2.0,
            search_back: 0.5,
            search_ahead: 3.0,
        }
    }
}

/// One control output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub rudder: f64,
    /// Commanded surge speed, m/s.
    pub thrust: f64,
    /// Arc length of the projection of the ship onto the path.
    pub progress: f64,
    /// Distance from the ship to that projection.
    pub cross_track: f64,
}

/// Pure-pursuit steering with proportional speed control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tracker {
    pub params: TrackerParams,
}

impl Tracker {
    pub fn new(params: TrackerParams) -> Self {
        assert!(params.lookahead > 0.0 && params.r_min > 0.0 && params.nomoto_k > 0.0);
        Self { params }
    }

    /// Steers toward the point `lookahead` ahead of the ship's projection
    /// (searched near `progress`) with pure-pursuit curvature `2 sin e / d`,
    /// `e` the bearing error and `d` the distance to the target. The path
    /// curvature one yaw lag ahead is fed forward, and the pure-pursuit term
    /// of an on-path ship is subtracted from the correction, so a ship on the
    /// path commands the path curvature. The sum is clamped to `1 / r_min`; the rudder
    /// holds it at the current surge speed.
    pub fn track(&self, trajectory: &Trajectory, ship: &ShipState, progress: f64) -> Command {
        let p = &self.params;
        let path = &trajectory.path;
        let pos = ship.pose.position();
        let (s, cross_track) = path.project_within(pos, progress - p.search_back, progress + p.search_ahead);
        let target = path.pose_at(s + p.lookahead).position();
        let feedback = pursuit_curvature(&ship.pose, target) - pursuit_curvature(&path.pose_at(s), target);
        let feedforward = path.curvature_at(s + ship.surge_speed * p.preview_time);
        let kappa = (feedforward + p.pursuit_gain * feedback).clamp(-1.0 / p.r_min, 1.0 / p.r_min);
        let rudder = ship.surge_speed * kappa / p.nomoto_k;
        let v = trajectory.nominal_speed;
        let thrust = (v + p.speed_gain * (v - ship.surge_speed)).max(0.0);
        Command {
            rudder,
            thrust,
            progress: s,
            cross_track,
        }
    }
}

fn pursuit_curvature(from: &Pose, target: Vec2) -> f64 {
    let to_target = target - from.position();
    let d = to_target.norm();
    if d <= 1e-9 {
        return 0.0;
    }
    let e = wrap_to_pi(to_target.y.atan2(to_target.x) - from.theta());
    2.0 * e.sin() / d
}

/// Unsigned distance from `pose` to the nearest point of the trajectory path.
pub fn cross_track_error(trajectory: &Trajectory, pose: &Pose) -> f64 {
    trajectory.path.project(Vec2::new(pose.x, pose.y)).1
}
