//! Experiment runners. Each takes an [`ExperimentConfig`] and returns records
//! plus a summary; writing files is left to [`crate::output`].

mod scan;
mod toy;
mod train;

pub use scan::{run_scan, scan_cells, ScanOutcome};
pub use toy::{run_toy, ToyOutcome, ToyVerdict};
pub use train::{recovery_metrics, train_cell, CellParams, Prepared, RunOutcome};

use crate::config::{ExperimentConfig, ScanTarget};
use crate::error::Result;

/// A single bridge-regression run with the configuration's hyperparameters.
pub fn run_bridge(config: &ExperimentConfig) -> Result<RunOutcome> {
    run_single(config, ScanTarget::Bridge)
}

/// A single logistic-regression run on two Gaussian blobs.
pub fn run_logreg(config: &ExperimentConfig) -> Result<RunOutcome> {
    run_single(config, ScanTarget::Logreg)
}

/// A single MLP run on Gaussian blobs.
pub fn run_mlp(config: &ExperimentConfig) -> Result<RunOutcome> {
    run_single(config, ScanTarget::Mlp)
}

/// MLP training with p = 2 decay plus iterative magnitude pruning.
pub fn run_prune_baseline(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let data = Prepared::build(config, ScanTarget::Mlp)?;
    let mut cell = CellParams::from_config(config);
    cell.p = 2.0;
    train_cell(config, &data, cell, Some(&config.prune))
}

fn run_single(config: &ExperimentConfig, target: ScanTarget) -> Result<RunOutcome> {
    config.validate()?;
    let data = Prepared::build(config, target)?;
    train_cell(config, &data, CellParams::from_config(config), None)
}
