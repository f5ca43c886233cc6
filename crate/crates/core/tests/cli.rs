//! End-to-end tests of the command-line binary: listing, output schemas,
//! overrides, config files, determinism and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stackbandit"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}: stderr={}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn list_names_every_preset() {
    let out = run_ok(&["list"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    for name in [
        "relu-curse",
        "covering-relu-d3",
        "imitation-log2",
        "imitation-vs-linucb",
        "expert-strong",
        "expert-weak",
        "poly-proxy",
        "poly-lipschitz-check",
        "optimism-trap",
        "lemma43-coverage",
    ] {
        assert!(text.contains(name), "list output lacks {name}");
    }
}

#[test]
fn unknown_preset_exits_2_with_diagnostic() {
    let out = bin()
        .args(["run", "--experiment", "no-such"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such"));
}

#[test]
fn missing_experiment_and_config_exits_2() {
    let out = bin().arg("run").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn traces_row_count_matches_seeds_times_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "run",
        "--experiment",
        "imitation-log2",
        "--seeds",
        "3",
        "--T",
        "1000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let csv = read(dir.path(), "traces.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "experiment,seed,checkpoint,cum_regret,empty_intersection_count"
    );
    // Geometric checkpoints for T=1000: {1, 2, 4, 8, ..., 1000}.
    let n_checkpoints = lines
        .iter()
        .skip(1)
        .filter(|l| l.starts_with("imitation-log2,0,"))
        .count();
    assert!(n_checkpoints >= 9);
    assert_eq!(lines.len() - 1, 3 * n_checkpoints);
    // Regret never decreases along one seed's trace.
    let regrets: Vec<f64> = lines
        .iter()
        .skip(1)
        .filter(|l| l.starts_with("imitation-log2,0,"))
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(regrets.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn summary_echoes_config_and_reports_coverage() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "run",
        "--experiment",
        "imitation-log2",
        "--seeds",
        "0,5,9",
        "--T",
        "2000",
        "--sigma-b",
        "0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(summary["experiment"], "imitation-log2");
    let run0 = &summary["runs"][0];
    assert_eq!(run0["config"]["horizon"], 2000);
    assert_eq!(run0["config"]["seeds"], serde_json::json!([0, 5, 9]));
    assert_eq!(run0["config"]["noise"]["sigma_b"], 0.1);
    assert!(run0["coverage"].as_f64().is_some());
    assert!(summary["runtime_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn multi_run_preset_labels_trace_rows() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "run",
        "--experiment",
        "optimism-trap",
        "--seeds",
        "2",
        "--T",
        "200",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let csv = read(dir.path(), "traces.csv");
    assert!(csv.contains("optimism-trap:probe,"));
    assert!(csv.contains("optimism-trap:optimistic,"));
}

#[test]
fn format_flag_selects_outputs() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "run",
        "--experiment",
        "imitation-log2",
        "--seeds",
        "2",
        "--T",
        "500",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(dir.path().join("traces.csv").exists());
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        run_ok(&[
            "run",
            "--experiment",
            "poly-proxy",
            "--seeds",
            "4",
            "--T",
            "2000",
            "--out",
            d.path().to_str().unwrap(),
        ]);
    }
    assert_eq!(read(d1.path(), "traces.csv"), read(d2.path(), "traces.csv"));
}

#[test]
fn config_file_resolves_preset_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "experiment = \"imitation-log2\"\nT = 5000\nseeds = 2\nsigma_b = 0.05\n",
    )
    .unwrap();
    run_ok(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--T",
        "800",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    let run0 = &summary["runs"][0];
    // Flag beats file; file beats preset defaults.
    assert_eq!(run0["config"]["horizon"], 800);
    assert_eq!(run0["config"]["noise"]["sigma_b"], 0.05);
    assert_eq!(run0["config"]["seeds"], serde_json::json!([0, 1]));
}

#[test]
fn explicit_run_config_file_works() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
name = "tiny"

[run]
horizon = 300
seeds = [0, 1]

[run.spec]
variant = "imitation"
d = 3

[run.theta]
source = "seeded_random"

[run.noise]
sigma_r = 0.1
sigma_b = 0.1
kind = "gaussian"

[run.agent]
agent = "imitation"
c_alpha = 2.0
confidence_delta = 0.05
"#,
    )
    .unwrap();
    run_ok(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let csv = read(dir.path(), "traces.csv");
    assert!(csv.lines().nth(1).unwrap().starts_with("tiny,0,"));
}

#[test]
fn inapplicable_override_exits_2() {
    let out = bin()
        .args(["run", "--experiment", "imitation-log2", "--zeta", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_var_sets_default_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--experiment",
            "imitation-log2",
            "--seeds",
            "2",
            "--T",
            "300",
        ])
        .env("STACKBANDIT_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("traces.csv").exists());
}
