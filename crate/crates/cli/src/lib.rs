//! Experiment configuration, execution and reporting for the `rml` binary.

pub mod config;
pub mod plots;
pub mod run;
pub mod svg;
pub mod table;

pub use config::{Experiment, ExperimentConfig};
pub use run::{run, ExperimentReport, Status};
