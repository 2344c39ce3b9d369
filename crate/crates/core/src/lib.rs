//! Navigation of a ship through an ice-filled channel.
//!
//! The crate plans minimum collision-energy paths with a state-lattice A*
//! search over a kinetic-energy costmap, executes them in a receding-horizon
//! loop against a 2D ship/ice simulation, and benchmarks the result against
//! baseline navigators.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod control;
pub mod geometry;
pub mod ice;
pub mod navigator;
pub mod planner;
pub mod sim;
