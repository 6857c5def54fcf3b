//! Experiment orchestration for the inertia identification study: configuration, the run
//! grid, seed derivation, CSV persistence and aggregation.

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod grid;
pub mod records;
pub mod seed;
pub mod summary;
pub mod trace_io;

pub use config::{ConfigError, ExperimentConfig, NamedSatellite};
pub use grid::{run_grid, GridOutput, RunRecord};
pub use summary::{horizon_sweep, summarize, SummaryRow, SweepRow};
