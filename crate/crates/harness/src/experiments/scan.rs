use super::train::{train_cell, CellParams, Prepared};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::records::{RunRecord, ScanResult};
use pwd_core::rng::derive_seed;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub result: ScanResult,
    /// Records of each cell, in cell order.
    pub cell_records: Vec<Vec<RunRecord>>,
}

/// Cells in scan order: `p` outermost, then `max_lr`, then `λ_p`.
pub fn scan_cells(config: &ExperimentConfig) -> Vec<CellParams> {
    let mut cells = Vec::new();
    for &p in &config.scan.p_values {
        for max_lr in config.scan.max_lr.values() {
            for lambda_p in config.scan.lambda_p.values() {
                let index = cells.len();
                cells.push(CellParams {
                    index,
                    max_lr,
                    lambda_p,
                    p,
                    seed: derive_seed(config.seed, index as u64),
                });
            }
        }
    }
    cells
}

/// Runs every cell of the grid. Each cell owns its model, optimizer and rng, so
/// the result is identical whether cells run serially or in parallel.
pub fn run_scan(config: &ExperimentConfig) -> Result<ScanOutcome> {
    config.validate()?;
    let data = Prepared::build(config, config.scan.target)?;
    let cells = scan_cells(config);
    let runs: Vec<_> = if config.scan.parallel {
        cells.par_iter().map(|&c| train_cell(config, &data, c, None)).collect::<Result<_>>()?
    } else {
        cells.iter().map(|&c| train_cell(config, &data, c, None)).collect::<Result<_>>()?
    };
    let (cells, cell_records) = runs.into_iter().map(|r| (r.cell, r.records)).unzip();
    Ok(ScanOutcome {
        result: ScanResult::new(config.clone(), cells),
        cell_records,
    })
}
