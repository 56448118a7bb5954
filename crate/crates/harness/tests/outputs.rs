//! Output formats and experiment-level properties of the harness.

use pwd_harness::config::{ExperimentConfig, ExperimentKind, LogAxis, ScanTarget};
use pwd_harness::experiments::{run_bridge, run_mlp, run_prune_baseline, run_scan, run_toy};
use pwd_harness::output::{emit_run, emit_scan, emit_toy};
use pwd_harness::records::{ScanResult, CSV_HEADER};

fn quick_mlp(steps: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::for_kind(ExperimentKind::Mlp);
    c.steps = steps;
    c.dataset.blobs.n = 400;
    c
}

fn parse_svg(path: &std::path::Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(doc.root_element().tag_name().name(), "svg");
}

#[test]
fn run_files_have_expected_layout() {
    let dir = tempfile::tempdir().unwrap();
    let c = quick_mlp(200);
    let out = run_mlp(&c).unwrap();
    let files = emit_run(dir.path(), &c, &out).unwrap();
    assert_eq!(files.len(), 3);

    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6, "{row}");
        for f in &fields {
            f.parse::<f64>().unwrap();
        }
    }
    // Logged every `log_every` steps, ending at the final step.
    assert_eq!(rows.last().unwrap().split(',').next(), Some("200"));

    let json = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let back: ScanResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back.cells, vec![out.cell.clone()]);
    assert_eq!(back.config_echo, c);
    let keys: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["config_echo", "tradeoff_convention", "cells"] {
        assert!(keys.get(key).is_some(), "missing {key}");
    }
    parse_svg(&dir.path().join("curves.svg"));
}

#[test]
fn toy_and_scan_files_parse() {
    let dir = tempfile::tempdir().unwrap();
    let c = ExperimentConfig::for_kind(ExperimentKind::Toy);
    emit_toy(dir.path(), &c, &run_toy(&c).unwrap()).unwrap();
    parse_svg(&dir.path().join("trajectory.svg"));
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"]["converged"], serde_json::Value::Bool(true));
    let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), c.steps as usize + 2);

    let mut s = ExperimentConfig::for_kind(ExperimentKind::Scan);
    s.scan.target = ScanTarget::Bridge;
    s.scan.max_lr.points = 2;
    s.scan.lambda_p.points = 2;
    s.scan.p_values = vec![1.0, 2.0];
    s.batch_size = None;
    s.steps = 200;
    let scan_dir = tempfile::tempdir().unwrap();
    let files = emit_scan(scan_dir.path(), &run_scan(&s).unwrap()).unwrap();
    assert_eq!(files.len(), 1 + 8 + 1);
    parse_svg(&scan_dir.path().join("tradeoff.svg"));
    let back: ScanResult =
        serde_json::from_str(&std::fs::read_to_string(scan_dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(back.cells.len(), 8);
    assert!(back.cells.iter().enumerate().all(|(i, c)| c.index == i));
}

#[test]
fn one_cell_scan_equals_single_run() {
    let single = quick_mlp(300);
    let mut scan = single.clone();
    scan.kind = ExperimentKind::Scan;
    scan.scan.target = ScanTarget::Mlp;
    scan.scan.max_lr = LogAxis::single(single.schedule.max_lr);
    scan.scan.lambda_p = LogAxis::single(single.pwd.lambda_p);
    scan.scan.p_values = vec![single.pwd.p];
    let a = run_mlp(&single).unwrap();
    let b = run_scan(&scan).unwrap();
    assert_eq!(b.result.cells, vec![a.cell]);
    assert_eq!(b.cell_records, vec![a.records]);
}

#[test]
fn prune_with_zero_threshold_is_plain_p2_training() {
    let mut pruned = quick_mlp(300);
    pruned.kind = ExperimentKind::PruneBaseline;
    pruned.pwd.p = 2.0;
    pruned.prune.threshold = 0.0;
    let mut plain = quick_mlp(300);
    plain.pwd.p = 2.0;
    let a = run_prune_baseline(&pruned).unwrap();
    let b = run_mlp(&plain).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.cell, b.cell);
}

#[test]
fn prune_with_huge_threshold_collapses_to_chance() {
    let mut c = quick_mlp(300);
    c.kind = ExperimentKind::PruneBaseline;
    c.pwd.p = 2.0;
    c.prune.threshold = 1e6;
    let out = run_prune_baseline(&c).unwrap();
    assert_eq!(out.cell.final_sparsity, 1.0);
    let acc = out.cell.final_acc.unwrap();
    assert!((acc - 25.0).abs() <= 10.0, "accuracy {acc}");
}

#[test]
fn no_decay_means_no_sparsity() {
    let mut c = quick_mlp(300);
    c.pwd.p = 0.8;
    c.pwd.lambda_p = 0.0;
    let out = run_mlp(&c).unwrap();
    assert_eq!(out.cell.final_sparsity, 0.0);
}

#[test]
fn p2_bridge_never_produces_exact_zeros() {
    let mut c = ExperimentConfig::for_kind(ExperimentKind::Bridge);
    c.pwd.p = 2.0;
    c.pwd.lambda_p = 1.0;
    let r = run_bridge(&c).unwrap().cell.recovery.unwrap();
    assert_eq!(r.exact_zeros, 0);
}

#[test]
fn divergent_cell_is_marked_failed() {
    let mut c = quick_mlp(200);
    c.schedule.max_lr = 1e300;
    c.optimizer = pwd_harness::config::OptimizerKind::Sgd;
    let out = run_mlp(&c).unwrap();
    assert!(!out.cell.is_ok());
    assert!(out.cell.reason.is_some());
    // The summary stays valid JSON even for a failed cell.
    let dir = tempfile::tempdir().unwrap();
    emit_run(dir.path(), &c, &out).unwrap();
    let json = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    serde_json::from_str::<ScanResult>(&json).unwrap();
}
