//! Smoke tests of the `pwd` command-line interface.

use std::process::Command;

fn pwd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pwd"))
}

#[test]
fn toy_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = pwd().args(["toy", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("converged"));
    for f in ["run.csv", "trajectory.csv", "verdict.json", "trajectory.svg"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
}

#[test]
fn naive_toy_oscillates() {
    let dir = tempfile::tempdir().unwrap();
    let out = pwd().args(["toy", "--naive", "--steps", "500", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("oscillating"));
}

#[test]
fn printed_config_loads_back() {
    let out = pwd().args(["config", "bridge"]).output().unwrap();
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bridge.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let run = pwd()
        .args(["bridge", "--steps", "100", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("run"))
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(dir.path().join("run/summary.json").exists());
}

#[test]
fn verify_passes() {
    let out = pwd().arg("verify").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}

#[test]
fn invalid_p_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = pwd().args(["toy", "--p", "2.5", "--out"]).arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    assert!(!dir.path().join("run.csv").exists());
}
