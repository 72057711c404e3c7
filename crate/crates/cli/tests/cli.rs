//! End-to-end checks of the command-line surface: exit codes, output
//! schemas, configuration precedence, and the output-directory variable.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_abdirac"))
}

#[test]
fn energy_plain_and_json() {
    let out = bin()
        .args(["energy", "--nu", "0.3", "--a", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lambda          = 0.8"), "{text}");
    assert!(text.contains("subcritical"));

    let out = bin()
        .args(["energy", "--nu", "0.25", "--critical", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["regime"], "critical");
    assert_eq!(v["lambda"].as_f64().unwrap(), 0.0);
    assert_eq!(v["a"].as_f64().unwrap(), 0.25);
}

#[test]
fn energy_exit_codes() {
    // domain error: nu outside (0, 1/2]
    let out = bin()
        .args(["energy", "--nu", "0.7", "--a", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // supercritical
    let out = bin()
        .args(["energy", "--nu", "0.3", "--a", "0.35"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("supercritical"), "{err}");
}

#[test]
fn energy_vs_a_column_is_decreasing_to_zero() {
    let out = bin()
        .args([
            "sweep", "energy-vs-a", "--nu", "0.3", "--a-min", "0", "--steps", "41",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lambdas = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        lambdas.push(cols[2].parse::<f64>().unwrap());
    }
    assert_eq!(lambdas.len(), 41);
    for w in lambdas.windows(2) {
        assert!(w[1] < w[0], "lambda not strictly decreasing: {w:?}");
    }
    assert!(lambdas.last().unwrap().abs() < 1e-12);
}

#[test]
fn eigensolve_sweep_matches_closed_forms() {
    let out = bin()
        .args([
            "sweep",
            "eigensolve",
            "--pairs",
            "0.3:0.1,0.2:0.05",
            "--modes",
            "0,1",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!(row["error"].is_null());
        assert!(row["max_abs_diff"].as_f64().unwrap() <= 1e-6);
    }
}

#[test]
fn failed_rows_set_exit_one_and_carry_errors() {
    // the second pair is supercritical: its rows fail, the sweep exits 1
    let out = bin()
        .args([
            "sweep", "eigensolve", "--pairs", "0.3:0.1,0.3:0.35", "--modes", "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let data_rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data_rows.len(), 2);
    assert!(data_rows[0].ends_with(','), "ok row has empty error: {}", data_rows[0]);
    assert!(
        data_rows[1].contains("supercritical") || data_rows[1].contains("no gap eigenvalue"),
        "unexpected error text: {}",
        data_rows[1]
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("abdirac.conf");
    std::fs::write(&cfg, "grid.n = 500\nsweep.jobs = 2\n").unwrap();
    // config applies
    let out = bin()
        .args(["sweep", "nonrel", "--nu", "0.2", "--a", "0.1", "--c-list", "10,20"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n=500"), "config grid not in provenance: {text}");
    // unknown keys are rejected
    std::fs::write(&cfg, "grid.m = 1\n").unwrap();
    let out = bin()
        .args(["sweep", "nonrel", "--nu", "0.2", "--a", "0.1", "--c-list", "10"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn out_dir_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "sweep", "slope", "--nu", "0.3", "--h-list", "1e-2,1e-3,1e-4", "--out",
            "slope.csv",
        ])
        .env("ABDIRAC_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("slope.csv")).unwrap();
    // divergent slope: |slope| grows as h shrinks
    let slopes: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(slopes[2] > 3.0 * slopes[1] && slopes[1] > slopes[0]);
}

#[test]
fn supercritical_sweep_crosses_zero() {
    let out = bin()
        .args([
            "sweep",
            "supercritical",
            "--nu",
            "0.3",
            "--a",
            "0.35",
            "--eps-list",
            "1e-2,1e-4,1e-6,1e-8,1e-9",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let js: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(js.first().unwrap() > &0.0);
    assert!(js.last().unwrap() < &0.0, "no sign change: {js:?}");
}

#[test]
fn profile_export_has_csv_shape() {
    let out = bin()
        .args(["profile", "eta-star", "--nu", "0.3", "--a", "0.1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "rho,re,im");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!(first[0] > 0.0 && first[1] > 0.0 && first[2] == 0.0);
}

#[test]
fn positron_sweep_reaches_duality() {
    let out = bin()
        .args([
            "sweep", "positron", "--pairs", "0.3:0.1", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &v["rows"][0];
    assert!(row["abs_err"].as_f64().unwrap() <= 1e-6);
}
