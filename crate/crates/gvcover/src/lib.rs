//! Scenario loading, batch execution and output emission for the
//! `gvcover-core` coverage simulator.
//!
//! - [`config`]: TOML scenario files and CSV density grids.
//! - [`emit`]: trajectory and coverage CSV files, SVG snapshots, summaries.
//! - [`cli`]: the `gvcover` command line (`run`, `compare`, `validate`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod emit;

pub use config::{load_config, ConfigError, RunMode, Scenario};
pub use emit::{emit, RunOutputs, Snapshot, Summary};

use gvcover_core::sim::{run, waypoint_tracking_run};
use gvcover_core::SimState;

/// Runs a scenario in its configured mode.
pub fn execute(scenario: &Scenario) -> gvcover_core::Result<SimState> {
    match scenario.mode {
        RunMode::Integrator => run(&scenario.config),
        RunMode::Waypoint => waypoint_tracking_run(&scenario.config, &scenario.drive),
    }
}

pub fn mode_name(mode: RunMode) -> &'static str {
    match mode {
        RunMode::Integrator => "integrator",
        RunMode::Waypoint => "waypoint",
    }
}
