//! Lattice planning over the collision-energy costmap.

mod control_set;
mod heuristic;
mod search;
mod smooth;
mod swath;

pub use control_set::{
    build_control_set, heading_angle, snap_heading, ControlSet, ControlSetError, ControlSetParams, LatticeVertex,
    MotionPrimitive, HEADINGS,
};
pub use heuristic::{line_heuristic, line_heuristic_case, vertical_heuristic, HeuristicKind, LineCase};
pub use search::{plan, PlanError, PlanQuery, PlanResult, PlannerConfig};
pub use smooth::{path_cost, smooth, SmoothParams};
pub use swath::{merge_cells, swath_cells, SWATH_PENETRATION, SWATH_STEP};
