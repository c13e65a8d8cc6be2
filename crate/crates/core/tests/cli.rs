//! Exit codes and output layout of the `uav-ris-sca` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uav-ris-sca"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn baseline_run_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["run", "--seed", "3", "--max-iter", "10", "--tol", "1e-3"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "power.csv", "iterations.csv", "summary.csv", "iterates.csv", "nodes.csv", "trajectory.svg"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("converged,"));
}

#[test]
fn malformed_config_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = config(dir.path(), "[scenario\nr_min = ");
    let o = run(&["run", "--config", &cfg], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn invalid_value_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = config(dir.path(), "[scenario]\nris_height = 30.0\n");
    let o = run(&["sweep-energy", "--config", &cfg], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("height"));
    assert!(!out.exists());
}

#[test]
fn bad_flag_value_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["run", "--tol", "-1"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unreachable_rate_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = config(dir.path(), "[scenario]\nr_min = 50.0\n");
    let o = run(&["run", "--config", &cfg], &out);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("infeasible,"));
}
