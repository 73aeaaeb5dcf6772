use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiryaev-qsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Header and data rows of a CSV artifact, skipping `#` comment lines.
fn csv(args: &[&str]) -> (String, Vec<Vec<f64>>) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn eigenvalue_plateau() {
    let v = json(&["eigenvalue", "--A", "5", "--format", "json"]);
    assert_eq!(v["result"]["lambda"], 0.125);
    assert_eq!(v["result"]["regime"], "critical-or-supercritical");
    assert_eq!(v["config"]["A"], 5.0);
    assert!(v["version"].is_string());
    let v = json(&["eigenvalue", "--A", "1.2658574", "--format", "json"]);
    assert_eq!(v["result"]["lambda"], 0.125);
    let text = run(&["eigenvalue", "--A", "1"]);
    assert!(String::from_utf8(text.stdout)
        .unwrap()
        .contains("subcritical"));
}

#[test]
fn eigenvalue_domain_error() {
    let out = run(&["eigenvalue", "--A", "0.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn curve_reaches_plateau() {
    let (header, rows) = csv(&["curve", "--A-min", "0.05", "--A-max", "1.27", "--n", "200"]);
    assert_eq!(header, "A,lambda,xi");
    assert_eq!(rows.len(), 200);
    let lambdas: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let plateau = lambdas.iter().position(|&l| l == 0.125).unwrap();
    assert!(lambdas[..plateau].windows(2).all(|w| w[0] < w[1]));
    assert!(lambdas[plateau..].iter().all(|&l| l == 0.125));
    assert!(lambdas[plateau - 1] > 0.124);
    let bad = run(&["curve", "--A-min", "1", "--A-max", "0.5"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn dist_shape() {
    let (header, rows) = csv(&["dist", "--A", "0.1", "--n", "400"]);
    assert_eq!(header, "x,inv_x,pdf,cdf");
    let last = rows.last().unwrap();
    assert_eq!(last[1], 10.0);
    assert_eq!(last[2], 0.0);
    // unimodal in 1/x and cdf nonincreasing along the reciprocal axis
    let pdf: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let peak = pdf
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert!(pdf[..=peak].windows(2).all(|w| w[0] <= w[1]));
    assert!(pdf[peak..].windows(2).all(|w| w[0] >= w[1]));
    assert!(rows.windows(2).all(|w| w[1][3] <= w[0][3]));
}

#[test]
fn dist_branches() {
    let out = run(&["dist", "--A", "10", "--n", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# form: ReducedCritical"));
    let out = run(&["dist", "--A", "1", "--lambda", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    let (_, rows) = csv(&["dist", "--A", "2", "--lambda", "0.06", "--n", "20"]);
    assert!(rows[..19].iter().all(|r| r[2] > 0.0));
}

#[test]
fn simulate_report_is_reproducible() {
    let args = [
        "simulate",
        "--A",
        "2",
        "--x0",
        "4",
        "--dt",
        "1e-3",
        "--horizon",
        "40",
        "--paths",
        "100000",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let r = &v["result"];
    assert_eq!(r["survivors"], 28);
    assert_eq!(r["killed"], 99_972);
    // too few survivors for a KS distance at this horizon
    assert!(r["ks"].is_null() && r["ks_error"].is_string());
    let rate = r["rate_estimate"].as_f64().unwrap();
    assert!((rate - 0.155_431_522_622_239_7).abs() < 1e-12);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(
        r["survivor_histogram"]["counts"].as_array().unwrap().len(),
        50
    );
}

#[test]
fn simulate_errors() {
    let out = run(&["simulate", "--A", "2", "--paths", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_shiryaev-qsd"))
        .args(["simulate", "--A", "2", "--paths", "1000"])
        .env("SHIRYAEV_QSD_STEP_BUDGET", "1e5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_exit_codes() {
    let out = run(&["validate", "--A", "1", "--suite", "analytic"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["pass"], true);
    assert!(v["report"]["checks"].as_array().unwrap().len() >= 12);

    let out = run(&["validate", "--A", "1", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "validate",
        "--A",
        "2",
        "--suite",
        "all",
        "--paths",
        "2000",
        "--horizon",
        "5",
        "--dt",
        "1e-2",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"mc-ks") && names.contains(&"boundary"));
    let expected = if v["report"]["pass"] == true { 0 } else { 1 };
    assert_eq!(out.status.code(), Some(expected));
}

#[test]
fn out_flag_writes_same_bytes() {
    let dir = std::env::temp_dir().join(format!("shiryaev-qsd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let base = ["curve", "--A-min", "0.5", "--A-max", "2", "--n", "7"];
    let stdout = run(&base).stdout;
    let mut with_out = base.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let out = run(&with_out);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn special_function_debug_command() {
    let v = json(&["sf", "eval", "kummer-m", "-0.5", "1", "2"]);
    assert!((v["result"]["value"].as_f64().unwrap() + 0.369_000_423_983_399_5).abs() < 1e-14);
    let out = run(&["sf", "eval", "gamma", "1", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
