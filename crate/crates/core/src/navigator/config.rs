use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{NominalSpeedTable, TrackerParams};
use crate::planner::{ControlSetParams, PlannerConfig};
use crate::sim::SimParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NavigatorKind {
    Lattice,
    Straight,
    SkeletonProxy,
}

impl NavigatorKind {
    pub const ALL: [NavigatorKind; 3] = [
        NavigatorKind::Lattice,
        NavigatorKind::Straight,
        NavigatorKind::SkeletonProxy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NavigatorKind::Lattice => "lattice",
            NavigatorKind::Straight => "straight",
            NavigatorKind::SkeletonProxy => "skeleton-proxy",
        }
    }
}

impl std::fmt::Display for NavigatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NavigatorKind {
    type Err = NavigatorConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NavigatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| NavigatorConfigError::UnknownNavigator(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NavigatorConfigError {
    #[error("unknown navigator {0:?} (expected lattice, straight or skeleton-proxy)")]
    UnknownNavigator(String),
    #[error("invalid navigator setting: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NavigatorConfig {
    pub kind: NavigatorKind,
    /// Distance from the ship to the intermediate goal line, meters.
    pub horizon: f64,
    /// Simulated seconds between replans.
    pub replan_interval: f64,
    /// Overrides the scenario's goal line when set.
    pub goal_y: Option<f64>,
    /// Simulated seconds before the trial ends as a timeout.
    pub timeout: f64,
    /// Consecutive planner failures that end the trial.
    pub max_plan_failures: usize,
    /// Obstacle inflation of the open-water baseline grid beyond the ship half-width, meters.
    pub skeleton_margin: f64,
    /// Rerun every lattice search with the vertical-distance heuristic and
    /// record its expansion count.
    pub compare_heuristics: bool,
    pub planner: PlannerConfig,
    pub control_set: ControlSetParams,
    pub tracker: TrackerParams,
    pub sim: SimParams,
    pub speeds: NominalSpeedTable,
}

impl Default for NavigatorConfig {
    fn default() -> Self {
        Self {
            kind: NavigatorKind::Lattice,
            horizon: 20.0,
            replan_interval: 1.0,
            goal_y: None,
            timeout: 600.0,
            max_plan_failures: 3,
            skeleton_margin: 0.0,
            compare_heuristics: false,
            planner: PlannerConfig::default(),
            control_set: ControlSetParams::default(),
            tracker: TrackerParams::default(),
            sim: SimParams::default(),
            speeds: NominalSpeedTable::default(),
        }
    }
}

impl NavigatorConfig {
    pub fn with_kind(&self, kind: NavigatorKind) -> Self {
        Self { kind, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), NavigatorConfigError> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(NavigatorConfigError::Invalid("horizon must be positive"));
        }
        if !(self.replan_interval > 0.0 && self.replan_interval.is_finite()) {
            return Err(NavigatorConfigError::Invalid("replan interval must be positive"));
        }
        if !(self.timeout > 0.0) {
            return Err(NavigatorConfigError::Invalid("timeout must be positive"));
        }
        if self.max_plan_failures == 0 {
            return Err(NavigatorConfigError::Invalid("max_plan_failures must be at least 1"));
        }
        if !(self.planner.alpha >= 0.0) {
            return Err(NavigatorConfigError::Invalid("alpha must be nonnegative"));
        }
        if !(self.skeleton_margin >= 0.0) {
            return Err(NavigatorConfigError::Invalid("skeleton margin must be nonnegative"));
        }
        if self.speeds.rows.is_empty() || self.speeds.rows.iter().any(|&(_, v)| !(v > 0.0)) {
            return Err(NavigatorConfigError::Invalid("nominal speeds must be positive"));
        }
        if !(self.tracker.lookahead > 0.0) {
            return Err(NavigatorConfigError::Invalid("lookahead must be positive"));
        }
        self.sim
            .validate()
            .map_err(|_| NavigatorConfigError::Invalid("simulation parameters"))?;
        Ok(())
    }
}
