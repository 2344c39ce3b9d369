//! Receding-horizon navigation: sense, plan to a goal line a fixed distance
//! ahead, track for one replan interval, repeat. Also the straight and
//! open-water baselines.

mod config;
mod skeleton;
mod trial;

pub use config::{NavigatorConfig, NavigatorConfigError, NavigatorKind};
pub use skeleton::{open_water_path, OccupancyGrid, SkeletonError};
pub use trial::{
    run_trial, run_trial_traced, skeleton_proxy_baseline, straight_baseline, TrialOutcome, TrialStatus, TrialTrace,
};
