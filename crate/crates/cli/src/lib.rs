//! Config-driven runner for the `cvqt` teleportation simulator.
//!
//! Reads TOML experiment configs, runs the engines from `cvqt-core`, and
//! writes TOML run reports or CSV tables.

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod tables;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use report::{Payload, RunReport};
