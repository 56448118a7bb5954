//! Per-step records and scan summaries.

use pwd_core::verification::tradeoff_metric;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Exact column layout of a run CSV.
pub const CSV_HEADER: &str = "step,eta,loss,reg_loss,sparsity,acc";

/// One logged point of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub step: u64,
    pub eta: f64,
    /// Unregularized training loss.
    pub loss: f64,
    /// `loss + (λ/p)‖w‖_p^p` over decayed parameters.
    pub reg_loss: f64,
    pub sparsity: f64,
    pub train_acc: Option<f64>,
    /// Validation accuracy in `[0, 1]`; absent for regression.
    pub val_acc: Option<f64>,
    /// `p` when a schedule is active.
    pub p: Option<f64>,
}

/// CSV text with [`CSV_HEADER`]; `acc` is the validation accuracy (empty when
/// not applicable). Floats use shortest round-trip formatting.
pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{},{},{},{},", r.step, r.eta, r.loss, r.reg_loss, r.sparsity);
        if let Some(a) = r.val_acc {
            let _ = write!(out, "{a}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// Regression-specific outcome of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMetrics {
    /// Absent when no validation split is configured.
    pub val_mse: Option<f64>,
    pub test_mse: f64,
    /// Fraction of true-zero coordinates that are exactly zero.
    pub true_zero_rate: f64,
    /// F1 of the exact-nonzero pattern against the true support.
    pub support_f1: f64,
    pub exact_zeros: usize,
}

/// One `(max_lr, λ_p, p)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub index: usize,
    pub max_lr: f64,
    pub lambda_p: f64,
    pub p: f64,
    /// Final validation accuracy in percent (classification only).
    pub final_acc: Option<f64>,
    pub final_sparsity: f64,
    /// Accuracy in percent plus sparsity as a fraction.
    pub tradeoff: Option<f64>,
    pub status: CellStatus,
    pub reason: Option<String>,
    pub recovery: Option<RecoveryMetrics>,
}

impl ScanCell {
    pub fn classification(index: usize, max_lr: f64, lambda_p: f64, p: f64, acc_frac: f64, sparsity: f64) -> Self {
        let acc = 100.0 * acc_frac;
        Self {
            index,
            max_lr,
            lambda_p,
            p,
            final_acc: Some(acc),
            final_sparsity: sparsity,
            tradeoff: Some(tradeoff_metric(acc, sparsity)),
            status: CellStatus::Ok,
            reason: None,
            recovery: None,
        }
    }

    pub fn failed(index: usize, max_lr: f64, lambda_p: f64, p: f64, reason: String) -> Self {
        Self {
            index,
            max_lr,
            lambda_p,
            p,
            final_acc: None,
            final_sparsity: 0.0,
            tradeoff: None,
            status: CellStatus::Failed,
            reason: Some(reason),
            recovery: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }
}

/// Summary document written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub config_echo: crate::config::ExperimentConfig,
    /// How `tradeoff` combines its inputs.
    pub tradeoff_convention: String,
    pub cells: Vec<ScanCell>,
}

pub const TRADEOFF_CONVENTION: &str = "val_acc_percent + sparsity_fraction";

impl ScanResult {
    pub fn new(config_echo: crate::config::ExperimentConfig, cells: Vec<ScanCell>) -> Self {
        Self {
            config_echo,
            tradeoff_convention: TRADEOFF_CONVENTION.to_string(),
            cells,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// Successful cells with the given `p`.
    pub fn cells_for_p(&self, p: f64) -> impl Iterator<Item = &ScanCell> {
        self.cells.iter().filter(move |c| c.is_ok() && c.p == p)
    }

    /// Cell with the largest trade-off metric.
    pub fn best_tradeoff(&self) -> Option<&ScanCell> {
        self.cells
            .iter()
            .filter(|c| c.tradeoff.is_some())
            .max_by(|a, b| a.tradeoff.partial_cmp(&b.tradeoff).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let r = RunRecord {
            step: 3,
            eta: 0.5,
            loss: 1.25,
            reg_loss: 1.5,
            sparsity: 0.0,
            train_acc: None,
            val_acc: None,
            p: None,
        };
        let mut with_acc = r.clone();
        with_acc.val_acc = Some(0.75);
        let csv = records_to_csv(&[r, with_acc]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,eta,loss,reg_loss,sparsity,acc");
        assert_eq!(lines[1], "3,0.5,1.25,1.5,0,");
        assert_eq!(lines[2], "3,0.5,1.25,1.5,0,0.75");
    }

    #[test]
    fn tradeoff_uses_percent_plus_fraction() {
        let c = ScanCell::classification(0, 1e-2, 1e-3, 0.8, 0.944, 0.9);
        assert!((c.tradeoff.unwrap() - 95.3).abs() < 1e-9);
    }
}
