//! Writing run records, summaries and plots to an output directory.

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiments::{RunOutcome, ScanOutcome, ToyOutcome};
use crate::records::{records_to_csv, RunRecord, ScanResult};
use crate::svg;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn loss_series(records: &[RunRecord]) -> Vec<(String, Vec<(f64, f64)>)> {
    vec![
        ("loss".into(), records.iter().map(|r| (r.step as f64, r.loss)).collect()),
        ("reg_loss".into(), records.iter().map(|r| (r.step as f64, r.reg_loss)).collect()),
        ("sparsity".into(), records.iter().map(|r| (r.step as f64, r.sparsity)).collect()),
    ]
}

/// Files written for a toy run: `run.csv`, `trajectory.csv`, `verdict.json`,
/// `trajectory.svg`.
pub fn emit_toy(dir: &Path, config: &ExperimentConfig, out: &ToyOutcome) -> Result<Vec<PathBuf>> {
    let mut traj = String::from("step,w\n");
    for (t, w) in out.trajectory.iter().enumerate() {
        let _ = writeln!(traj, "{t},{w}");
    }
    let verdict = serde_json::json!({ "config_echo": config, "verdict": out.verdict });
    let plot = svg::line_plot(
        "toy weight trajectory",
        "step",
        "w",
        &[(
            format!("{:?}", config.toy.variant).to_lowercase(),
            out.trajectory.iter().enumerate().map(|(t, &w)| (t as f64, w)).collect(),
        )],
    );
    let files = [
        ("run.csv", records_to_csv(&out.records)),
        ("trajectory.csv", traj),
        ("verdict.json", serde_json::to_string_pretty(&verdict).expect("verdict serializes")),
        ("trajectory.svg", plot),
    ];
    write_all(dir, &files)
}

/// Files written for a single training run: `run.csv`, `summary.json`,
/// `curves.svg`.
pub fn emit_run(dir: &Path, config: &ExperimentConfig, out: &RunOutcome) -> Result<Vec<PathBuf>> {
    let summary = ScanResult::new(config.clone(), vec![out.cell.clone()]);
    let files = [
        ("run.csv", records_to_csv(&out.records)),
        ("summary.json", summary.to_json()),
        ("curves.svg", svg::line_plot("training curves", "step", "value", &loss_series(&out.records))),
    ];
    write_all(dir, &files)
}

/// Files written for a scan: `summary.json`, `cells/cell_NNN.csv` and an
/// accuracy-versus-sparsity scatter `tradeoff.svg` (one color per `p`).
pub fn emit_scan(dir: &Path, out: &ScanOutcome) -> Result<Vec<PathBuf>> {
    let mut files: Vec<(String, String)> = vec![("summary.json".into(), out.result.to_json())];
    for (cell, records) in out.result.cells.iter().zip(&out.cell_records) {
        files.push((format!("cells/cell_{:03}.csv", cell.index), records_to_csv(records)));
    }
    let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for c in out.result.cells.iter().filter(|c| c.is_ok()) {
        let name = format!("p={}", c.p);
        let y = c.final_acc.or(c.recovery.map(|r| r.test_mse)).unwrap_or(f64::NAN);
        match groups.iter_mut().find(|(n, _)| *n == name) {
            Some((_, pts)) => pts.push((c.final_sparsity, y)),
            None => groups.push((name, vec![(c.final_sparsity, y)])),
        }
    }
    let y_label = if out.result.cells.iter().any(|c| c.final_acc.is_some()) {
        "validation accuracy [%]"
    } else {
        "test MSE"
    };
    files.push(("tradeoff.svg".into(), svg::scatter_plot("scan cells", "sparsity", y_label, &groups)));
    let refs: Vec<(&str, String)> = files.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
    write_all(dir, &refs)
}

fn write_all(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    files
        .iter()
        .map(|(name, contents)| {
            let path = dir.join(name);
            write_file(&path, contents)?;
            Ok(path)
        })
        .collect()
}
