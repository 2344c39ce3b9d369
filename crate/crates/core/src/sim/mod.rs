//! Ship and ice simulation: Nomoto steering, disk-model collision response
//! and energy bookkeeping.

mod collision;
mod log;
mod world;

pub use collision::{collision_response, total_ship_energy_loss, CollisionEvent, CollisionResponse};
pub use log::{read_trajectory_log, write_trajectory_log, TrajectoryLogError, TrajectorySample};
pub use world::{resolve_collision, FloeState, ShipState, SimError, SimParams, World};
