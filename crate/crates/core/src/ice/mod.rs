//! The ice channel: floes, scenario generation, the collision-energy model
//! and the costmap built from it.

mod costmap;
mod energy;
mod io;
mod scenario;

pub use costmap::{build_costmap, Costmap};
pub use energy::{
    effective_mass, effective_velocity, ice_energy_gain, kinetic_energy_loss, kinetic_energy_loss_clamped,
    ship_energy_loss, system_energy_loss, EnergyError,
};
pub use io::ScenarioFileError;
pub use scenario::{
    generate_scenario, Channel, FloeLimits, IceFloe, IceProperties, Scenario, ScenarioError, ScenarioParams,
};
