//! End-to-end tests of the `ergoswarm` binary: subcommands, exit codes, and
//! artifact layout.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ergoswarm")
}

fn write_config(dir: &Path, out_dir: &Path, extra: &str) -> PathBuf {
    let text = format!(
        r#"
[world]
width = 3
height = 3
base_weight = 0.5

[[world.roi]]
kind = "cells"
weight = 4.0
cells = [[2, 2]]

[swarm]
agents = 1
tau_gp = 5
tau_p = 5
t_final = 60
beta = 2.0
initial_positions = [[0, 0]]
{extra}

[belief]
lengthscale = 0.6
signal_variance = 1.0
noise_variance = 0.01
noise_std = 0.1

[run]
seeds = [0, 1]
output_dir = "{}"
"#,
        out_dir.display()
    );
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

#[test]
fn run_command_writes_artifacts_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let cfg = write_config(tmp.path(), &out, "");
    let output = run(&["run", cfg.to_str().unwrap()]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    for seed in ["seed0000", "seed0001"] {
        assert!(out.join(seed).join("metrics.csv").exists());
        assert!(out.join(seed).join("summary.json").exists());
    }
    let header = std::fs::read_to_string(out.join("seed0000/metrics.csv")).unwrap();
    assert!(header.starts_with("k,regret_running,empirical_error,belief_error,kl_alignment"));
}

#[test]
fn run_twice_produces_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let cfg = write_config(tmp.path(), &out, "");
    assert!(run(&["run", cfg.to_str().unwrap()]).status.success());
    let first = std::fs::read(out.join("seed0000/metrics.csv")).unwrap();
    std::fs::remove_dir_all(&out).unwrap();
    assert!(run(&["run", cfg.to_str().unwrap()]).status.success());
    let second = std::fs::read(out.join("seed0000/metrics.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn invalid_field_exits_one_with_machine_readable_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let text = std::fs::read_to_string(write_config(tmp.path(), &out, "")).unwrap();
    let bad = text.replace("tau_gp = 5", "tau_gp = 0");
    let path = tmp.path().join("bad.toml");
    std::fs::write(&path, bad).unwrap();
    let output = run(&["run", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    let line = stderr.lines().last().unwrap();
    let json: serde_json::Value = serde_json::from_str(line).expect("stderr is one JSON line");
    assert_eq!(json["kind"], "config");
    assert!(json["error"].as_str().unwrap().contains("swarm.tau_gp"));
}

#[test]
fn unknown_key_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let text = std::fs::read_to_string(write_config(tmp.path(), &out, "")).unwrap();
    let path = tmp.path().join("bad.toml");
    std::fs::write(&path, text.replace("beta = 2.0", "beta = 2.0\nmystery = 1")).unwrap();
    let output = run(&["run", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn missing_config_exits_one() {
    let output = run(&["run", "/nonexistent/nowhere.toml"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn sweep_command_aggregates_values() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let cfg = write_config(tmp.path(), &out, "");
    let output = run(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--axis",
        "tau",
        "--values",
        "2,6",
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let table = std::fs::read_to_string(out.join("sweep_tau.csv")).unwrap();
    assert!(table.starts_with("axis,value,seeds,"));
    assert!(table.contains("tau,2,2,"));
    assert!(table.contains("tau,6,2,"));
    assert!(out.join("tau=2/seed0001/metrics.csv").exists());
}

#[test]
fn sweep_rejects_unknown_axis() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let cfg = write_config(tmp.path(), &out, "");
    let output = run(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--axis",
        "warp",
        "--values",
        "1",
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn compare_command_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let cfg = write_config(tmp.path(), &out, "");
    let output = run(&["compare", cfg.to_str().unwrap()]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    for file in [
        "compare_coverage.csv",
        "compare_roi.csv",
        "compare_curves.csv",
    ] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let coverage = std::fs::read_to_string(out.join("compare_coverage.csv")).unwrap();
    assert!(coverage.contains("ergodic"));
    assert!(coverage.contains("greedy-ucb"));
    assert!(out.join("ergodic/seed0000/metrics.csv").exists());
    assert!(out.join("greedy-ucb/seed0000/metrics.csv").exists());
}

#[test]
fn plot_command_renders_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let cfg = write_config(tmp.path(), &out, "");
    assert!(run(&["run", cfg.to_str().unwrap()]).status.success());
    let run_dir = out.join("seed0000");
    let output = run(&["plot", run_dir.to_str().unwrap()]);
    assert!(output.status.success());
    for file in [
        "regret.svg",
        "empirical_error.svg",
        "belief_error.svg",
        "kl_alignment.svg",
        "heatmaps.svg",
    ] {
        assert!(run_dir.join(file).exists(), "{file} missing");
    }
}

#[test]
fn debug_dumps_write_posterior_and_policy_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("art");
    let text = format!(
        r#"
[world]
width = 2
height = 2
base_weight = 1.0

[swarm]
agents = 2
tau_gp = 3
tau_p = 3
t_final = 12
r_comm = "global"
initial_positions = [[0, 0], [1, 1]]

[belief]
lengthscale = 0.6
signal_variance = 1.0
noise_variance = 0.01
noise_std = 0.1

[run]
seeds = [0]
output_dir = "{}"
posterior_dump = true
policy_dump = true
"#,
        out.display()
    );
    let path = tmp.path().join("dump.toml");
    std::fs::write(&path, text).unwrap();
    assert!(run(&["run", path.to_str().unwrap()]).status.success());
    for agent in 0..2 {
        let post = out.join(format!("seed0000/posterior_agent{agent}.csv"));
        let pol = out.join(format!("seed0000/policy_agent{agent}.csv"));
        assert!(post.exists() && pol.exists());
        let post_text = std::fs::read_to_string(post).unwrap();
        assert!(post_text.starts_with("region,x,y,mean,std"));
        let pol_text = std::fs::read_to_string(pol).unwrap();
        assert_eq!(pol_text.lines().count(), 5); // header + one row per region
    }
}

#[test]
fn plot_on_empty_directory_exits_two_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let output = run(&["plot", empty.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(&empty).unwrap().count(), 0);
}
