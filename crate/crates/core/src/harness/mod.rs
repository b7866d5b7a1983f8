//! Simulation study runner and its report emitters.

pub mod config;
pub mod report;
pub mod runner;

pub use config::ExperimentConfig;
pub use report::{CellReport, ExperimentReport, RunMetadata};
pub use runner::{run_cell, run_experiment};
