use std::path::Path;
use std::process::{Command, Output};

use dirac_ibc::fit::fit_power_law;

const BIN: &str = env!("CARGO_BIN_EXE_dirac-ibc");

const FIG2: &str = r#"
[params]
q = 0.9767710236555245

[model]
c_minus = [1.0, 0.0]
c_plus = [0.3, -0.6]

[run]
t_span = [0.0, 1e6]
tol = 1e-11

[run.trace]
r0 = 0.3
theta0 = 1.1
"#;

const BALANCED: &str = r#"
[params]
q = 0.96

[model]
normalize = true

[track]
p0 = 0.5

[run]
t_span = [0.0, 1.0]
n_paths = 400
grid_points = 11
initial = "vacuum"
dense_trace = true
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(dir).env_remove("DIRAC_IBC_OUT_DIR").output().expect("binary runs")
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(dir.path(), &["teleport"]).status.code(), Some(64));
    assert_eq!(run(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn validate_basis_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["validate-basis", "--order", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("max |residual|"));
    let text = std::fs::read_to_string(dir.path().join("basis_residuals.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 4 * 4 * 2);
    for r in rows {
        let residual: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(residual < 1e-10, "{r}");
    }
}

#[test]
fn coeffs_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[params]\nq = 0.96\n").unwrap();
    let out = run(dir.path(), &["coeffs", "-c", "c.toml"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["coeffs"]["c_r"].as_f64().unwrap() - 2.0 * 1.96 * 0.28 / std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(v["header"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn trace_reproduces_seven_quarters() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fig2.toml"), FIG2).unwrap();
    let out = Command::new(BIN)
        .args(["trace", "-c", "fig2.toml"])
        .current_dir(dir.path())
        .env("DIRAC_IBC_OUT_DIR", "traces")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("traces/trace.csv")).unwrap();
    assert!(text.starts_with("# dirac-ibc"));
    assert!(text.contains("# config: {"));
    let t0: f64 =
        text.lines().find_map(|l| l.strip_prefix("# terminal: absorbed, t0 = ")).expect("absorbed").parse().unwrap();
    let rows = data_rows(&text);
    assert!(rows.iter().all(|r| r.len() == 7));
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r[1] < 1e-6).map(|r| (t0 - r[0], r[1])).collect();
    let fit = fit_power_law(&pts).unwrap();
    assert!((fit.exponent - 1.75).abs() < 0.0175, "exponent {}", fit.exponent);
}

#[test]
fn simulate_needs_seed_and_records_header() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), BALANCED).unwrap();
    let out = run(dir.path(), &["simulate", "-c", "b.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let out = run(dir.path(), &["simulate", "-c", "b.toml", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("events.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["header"]["seed"], 9);
    assert_eq!(lines[0]["header"]["config"]["run"]["seed"], 9);
    assert_eq!(lines[1]["kind"], "initial");
    assert_eq!(lines.last().unwrap()["kind"], "final");
    let again = run(dir.path(), &["simulate", "-c", "b.toml", "--seed", "9", "--out-dir", "again"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(text, std::fs::read_to_string(dir.path().join("again/events.jsonl")).unwrap());
    assert!(dir.path().join("path_trace.csv").is_file());
}

#[test]
fn ensemble_writes_summary_and_histograms() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.toml"), BALANCED).unwrap();
    let out = run(dir.path(), &["ensemble", "-c", "b.toml", "--seed", "3", "--out-dir", "ens"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let ens = dir.path().join("ens");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ens.join("ensemble.json")).unwrap()).unwrap();
    assert_eq!(v["n_paths"], 400);
    assert_eq!(v["header"]["seed"], 3);
    let occ = data_rows(&std::fs::read_to_string(ens.join("occupancy.csv")).unwrap());
    assert_eq!(occ.len(), 11);
    assert!((occ[0][3] - 0.5).abs() < 1e-9);
    for name in ["angles.csv", "event_times.csv"] {
        assert!(ens.join(name).is_file(), "{name}");
    }
}

#[test]
fn invalid_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("q.toml"), "[params]\nq = 0.7\n").unwrap();
    let out = run(dir.path(), &["coeffs", "-c", "q.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sqrt(3)/2"));
    std::fs::write(dir.path().join("d.toml"), "[params]\nq = 0.96\nq = 0.97\n").unwrap();
    let out = run(dir.path(), &["coeffs", "-c", "d.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(run(dir.path(), &["trace", "-c", "missing.toml"]).status.code(), Some(1));
    // unnormalized state is rejected before any path is run
    std::fs::write(dir.path().join("n.toml"), "[params]\nq = 0.96\n[run]\nseed = 1\n").unwrap();
    assert_eq!(run(dir.path(), &["ensemble", "-c", "n.toml"]).status.code(), Some(1));
}

#[test]
fn selftest_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["selftest", "--criterion", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("[PASS] criterion 6"));
}
