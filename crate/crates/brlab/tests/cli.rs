//! End-to-end tests of the `brlab` binary: flag plumbing, file outputs,
//! exit codes and run-to-run determinism.  Everything runs on deliberately
//! coarse grids so the whole file stays fast.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_brlab"))
}

fn write_config(dir: &Path, name: &str, body: serde_json::Value) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A small layer scenario that solves in a fraction of a second.
fn coarse_layer_config() -> serde_json::Value {
    serde_json::json!({
        "grid": { "n": 1, "h": 0.03125, "half_widths": [1.0], "height": 1.0 },
        "potential": "peierls_nabarro",
        "scenario": { "kind": "layer_trace" },
        "epsilons": [0.25, 0.125],
        "solver": { "tol": 1e-7, "max_sweeps": 20000, "relaxation": null, "newton_iters": 4 },
        "seed": 11
    })
}

#[test]
fn under_resolved_epsilon_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = coarse_layer_config();
    cfg["epsilons"] = serde_json::json!([0.01]);
    let path = write_config(dir.path(), "bad.json", cfg);
    let out = bin().args(["solve", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("epsilon >= 2h"),
        "the error must name the resolution guard: {}",
        stderr_of(&out)
    );
}

#[test]
fn solve_writes_the_field_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "layer.json", coarse_layer_config());
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["solve", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let field = std::fs::read_to_string(out_dir.join("field.csv")).unwrap();
    let mut lines = field.lines();
    assert_eq!(lines.next(), Some("x1,y,u"));
    // 65 x 33 nodes on the coarse grid.
    assert_eq!(lines.count(), 65 * 33);
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "layer.json", coarse_layer_config());
    let mut outputs = Vec::new();
    for (label, workers) in [("a", "1"), ("b", "3")] {
        let out_dir = dir.path().join(label);
        let out = bin()
            .args(["sweep", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(&out_dir)
            .args(["--workers", workers])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
        outputs.push(std::fs::read(out_dir.join("runs.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "runs.csv must be byte-identical across workers");
}

#[test]
fn analyze_constant_scenario_reports_empty_structures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "grid": { "n": 1, "h": 0.03125, "half_widths": [1.0], "height": 1.0 },
        "potential": "quartic_double_well",
        "scenario": { "kind": "constant", "value": 0.0 },
        "epsilons": [0.5, 0.25],
        "analysis": { "eta0": 0.5 },
        "seed": 3
    });
    let path = write_config(dir.path(), "constant.json", cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["analyze", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema"], "brlab/1");
    assert_eq!(report["concentration"]["sigma_points"].as_array().unwrap().len(), 0);

    // The report subcommand summarises the same directory.
    let summary = bin().arg("report").arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(summary.status.code(), Some(0), "stderr: {}", stderr_of(&summary));
    assert!(stdout_of(&summary).contains("brlab/1"), "summary: {}", stdout_of(&summary));
}

#[test]
fn analyze_honors_the_env_var_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "layer.json", coarse_layer_config());
    let out_dir = dir.path().join("from-env");
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&path)
        .env("BRLAB_OUT", &out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(out_dir.join("runs.csv").exists());
}

#[test]
fn validate_reports_failures_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = coarse_layer_config();
    // One sweep can never converge: the oracle checks must FAIL, not error.
    cfg["solver"]["max_sweeps"] = serde_json::json!(1);
    let path = write_config(dir.path(), "crippled.json", cfg);
    let out = bin().args(["validate", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("FAIL"), "validate output: {text}");
    assert!(text.contains("solver_order"), "validate output: {text}");
}

#[test]
fn validate_requires_the_layer_potential() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = coarse_layer_config();
    cfg["potential"] = serde_json::json!("quartic_double_well");
    let path = write_config(dir.path(), "quartic.json", cfg);
    let out = bin().args(["validate", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
}

#[test]
fn report_rejects_an_unknown_schema_major() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("report.json"),
        serde_json::json!({ "schema": "brlab/9", "runs": [] }).to_string(),
    )
    .unwrap();
    let out = bin().arg("report").arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("schema"),
        "the error must mention the schema: {}",
        stderr_of(&out)
    );
}
