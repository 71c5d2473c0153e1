use std::path::Path;
use std::process::{Command, Output};

fn annulus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annulus"))
        .args(args)
        .env_remove("ANNULUS_WORKERS")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classify_prints_verdict() {
    let out = annulus(&["classify", "--lambda", "0.9", "--p", "4.25", "--epsilon", "0.01"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["regime"], "open_gap");
    assert_eq!(v["predicted_count"], "unknown");

    let out = annulus(&["classify", "--lambda", "-0.005", "--p", "3", "--epsilon", "0.01"]);
    assert_eq!(json(&out)["regime"], "i");
}

#[test]
fn missing_half_width_is_a_config_error() {
    let out = annulus(&["classify", "--lambda", "1", "--p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--epsilon"));
}

#[test]
fn several_half_widths_warn_and_use_epsilon() {
    let out = annulus(&["classify", "--lambda", "1", "--p", "3", "--epsilon", "0.1", "--a", "1.0"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
    let eps = json(&out)["inputs_echo"]["epsilon"].as_f64().unwrap();
    assert!((eps - 0.1).abs() < 1e-12);
}

#[test]
fn solve_prints_a_record() {
    let out = annulus(&["solve", "--lambda", "1", "--p", "4.5", "--epsilon", "0.01"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["even_count"], 1);
    assert_eq!(v["non_even_count"], 2);
    assert_eq!(v["consistency"], "consistent");
    assert_eq!(v["morse_indices"], serde_json::json!([2, 1, 1]));
}

#[test]
fn minimize_then_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let plot = dir.path().join("sol.svg");
    let out = annulus(&[
        "minimize",
        "--lambda",
        "1",
        "--p",
        "4.5",
        "--epsilon",
        "0.01",
        "--parity",
        "free",
        "--seed",
        "bump-right",
        "--out",
        sol.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["parity"], "non_even");
    assert!((v["rayleigh"].as_f64().unwrap() - 1.305).abs() < 0.02 * 1.305);
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));

    let out = annulus(&["spectrum", "--solution", sol.to_str().unwrap(), "--k", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["morse_index"], 1);
    assert!(v["max_disagreement"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn spectrum_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"params\": 3}");
    let out = annulus(&["spectrum", "--solution", &bad]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shoot_curve_writes_csv() {
    let out = annulus(&[
        "shoot-curve",
        "--lambda",
        "1",
        "--p",
        "4.5",
        "--epsilon",
        "0.01",
        "--alpha-min",
        "0.5",
        "--alpha-max",
        "50",
        "--points",
        "5",
        "--log",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,first_zero,terminated_by");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].ends_with("zero_found"));
}

#[test]
fn pohozaev_check_reports_signs() {
    let out = annulus(&["pohozaev-check", "--lambda", "0.9", "--p", "3", "--epsilon", "0.01", "--grid-n", "2000"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["even"]["interior"]["negative"], true);
    assert_eq!(v["general"]["interior"]["negative"], true);
    assert_eq!(v["even"]["at_zero"].as_f64().unwrap(), -3.0);
    assert_eq!(v["general"]["in_regime"], true);
}

#[test]
fn sweep_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", r#"{"lambda": [0.5, 1.0], "p": [3.0, 4.5], "epsilon": 0.05}"#);
    let csv = dir.path().join("out.csv");
    let out = annulus(&["sweep", "--config", &cfg, "--out", csv.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("lambda,p,epsilon,a,b,regime,predicted,even_count,non_even_count,rayleigh_list,morse_list,consistency"));
}

#[test]
fn sweep_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", r#"{"lambda": [0.5], "p": [3.0], "epsilon": 0.3}"#);
    let out = annulus(&["sweep", "--config", &cfg, "--epsilon", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((row[2].parse::<f64>().unwrap() - 0.05).abs() < 1e-12);
}

#[test]
fn sweep_reads_workers_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", r#"{"lambda": [0.5], "p": [3.0, 4.0], "epsilon": 0.1}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_annulus"))
        .args(["sweep", "--config", &cfg])
        .env("ANNULUS_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn sweep_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", r#"{"lambda": [0.5], "p": [3.0], "epsilon": 0.1, "budjet": {}}"#);
    let out = annulus(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("budjet"));

    let out = annulus(&["sweep", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_marks_unsupported_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", r#"{"lambda": [1.5], "p": [3.0], "epsilon": 0.01}"#);
    let out = annulus(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
    assert!(stdout(&out).contains("unsupported"));
}

#[test]
fn empty_sweep_prints_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", r#"{"lambda": [], "p": [], "epsilon": 0.01}"#);
    let out = annulus(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
}
