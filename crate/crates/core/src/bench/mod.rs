//! Batch experiments: paired trials over seeded scenarios, the append-only
//! record log, summary tables and SVG plots.

mod aggregate;
mod batch;
mod config;
mod plot;
mod record;

pub use aggregate::{aggregate, write_summary_csv, write_timing_csv, SummaryRow};
pub use batch::{run_batch, scenario_id, scenario_seed, BatchError, BatchProgress};
pub use config::{BatchConfig, ConfigError};
pub use plot::{emit_plots, kde, silverman_bandwidth, trajectory_svg, Overlay, PlotError};
pub use record::{read_records, RecordError, TrialRecord};
