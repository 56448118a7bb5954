//! Experiment harness for p-norm weight decay: configuration, experiment
//! runners, verification suites and CSV/JSON/SVG output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod records;
pub mod svg;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
