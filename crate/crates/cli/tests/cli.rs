use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use circreg::sim::{simulate_dataset, Scenario};
use circreg::write_dataset;
use serde_json::Value;
use tempfile::TempDir;

fn circreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circreg"))
        .args(args)
        .output()
        .expect("spawn circreg")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scenario_json(model: &str, design: &str, x_eval: f64, estimators: &str, runs: usize) -> String {
    format!(
        r#"{{"model":"{model}","design":{design},"n":60,"x_eval":{x_eval},
            "estimators":{estimators},"runs":{runs},"seed":11}}"#
    )
}

const UNIFORM: &str = r#"{"kind":"uniform","a":-5,"b":5}"#;
const ALL: &str = r#"[{"method":"gl"},{"method":"nw"},{"method":"ll"}]"#;

#[test]
fn fit_constant_dataset() {
    let dir = TempDir::new().unwrap();
    let theta = std::f64::consts::FRAC_PI_4;
    let data = write(
        dir.path(),
        "c.csv",
        &format!("x,theta\n0,{theta}\n1,{theta}\n2,{theta}\n"),
    );
    let out = circreg(&["fit", data.to_str().unwrap(), "--at", "0.5,1,1.5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let points = json["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    for p in points {
        let m = p["m_hat"].as_f64().unwrap();
        assert!((m - theta).abs() < 1e-12, "{p}");
    }
}

#[test]
fn fit_missing_header_is_input_error() {
    let dir = TempDir::new().unwrap();
    let data = write(dir.path(), "bad.csv", "0,0.5\n1,0.5\n");
    let out = circreg(&["fit", data.to_str().unwrap(), "--at", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("header"), "{}", stderr(&out));

    let data = write(dir.path(), "nan.csv", "x,theta\n0,0.5\n1,NaN\n");
    let out = circreg(&["fit", data.to_str().unwrap(), "--at", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = circreg(&["fit", dir.path().join("absent.csv").to_str().unwrap(), "--at", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(circreg(&["fit"]).status.code(), Some(2));
    assert_eq!(circreg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        circreg(&["fit", "x.csv", "--at", "0", "--kernel", "triangular"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fit_m1_synthetic_recovers_truth() {
    let dir = TempDir::new().unwrap();
    let scenario = Scenario::from_json(
        r#"{"model":"m1","design":{"kind":"uniform","a":-5,"b":5},"n":500,"x_eval":-2,
            "estimators":[{"method":"gl"}],"runs":1,"seed":1}"#,
    )
    .unwrap();
    let sample = simulate_dataset(&scenario, 0).unwrap();
    let path = dir.path().join("m1.csv");
    write_dataset(&sample, fs::File::create(&path).unwrap()).unwrap();

    let out_path = dir.path().join("fit.json");
    let out = circreg(&[
        "fit",
        path.to_str().unwrap(),
        "--at",
        "-2",
        "--trace",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let p = &json["points"][0];
    let m = p["m_hat"].as_f64().unwrap();
    assert!((m - (-0.69474)).abs() < 0.3, "m_hat = {m}");
    assert_eq!(json["schema_version"], 1);
    let records = p["trace_sine"]["records"].as_array().unwrap();
    assert_eq!(records.len(), (500.0 / 500f64.ln()).floor() as usize);
    assert!(records[0].get("A").is_some() && records[0].get("sqrtV").is_some());
}

#[test]
fn fit_degenerate_point_exit_4_unless_keep_going() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("x,theta\n");
    for i in 0..20 {
        text.push_str(&format!("{},0.3\n", i as f64 / 19.0));
    }
    let data = write(dir.path(), "d.csv", &text);
    let data = data.to_str().unwrap();
    // far points warp to the clamped edge, where the theory grid has no
    // admissible bandwidth
    let out = circreg(&["fit", data, "--at", "0.5", "--grid", "theory", "--c0", "0.04"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = circreg(&["fit", data, "--at", "0.5,1e9", "--grid", "theory"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let out = circreg(&["fit", data, "--at", "0.5,1e9", "--grid", "theory", "--keep-going"]);
    assert_eq!(out.status.code(), Some(4));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["points"][0]["m_hat"].is_number());
    assert!(json["points"][1]["m_hat"].is_null());
    assert!(json["points"][1]["error"].is_string());
}

#[test]
fn simulate_one_run_one_row_per_estimator() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", &scenario_json("m1", UNIFORM, -2.0, ALL, 1));
    let out_dir = dir.path().join("out");
    let out = circreg(&["simulate", s.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("runs.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "run,estimator,h1,h2,sq_error,status");
    assert_eq!(lines.len(), 4);
    let labels: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(labels, ["gl", "nw", "ll"]);
    assert!(!csv.contains('\r'));
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["estimators"].as_array().unwrap().len(), 3);
}

#[test]
fn simulate_is_byte_identical_across_reruns_and_threads() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", &scenario_json("m1", UNIFORM, 1.25, ALL, 6));
    let s = s.to_str().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for (d, threads) in [(&a, "1"), (&b, "1"), (&c, "3")] {
        let out = circreg(&["simulate", s, "--out", d.to_str().unwrap(), "--threads", threads]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["runs.csv", "report.json"] {
        let first = fs::read(a.join(name)).unwrap();
        assert_eq!(first, fs::read(b.join(name)).unwrap(), "{name}");
        assert_eq!(first, fs::read(c.join(name)).unwrap(), "{name}");
    }
    // a different seed changes the draws
    let d = dir.path().join("d");
    circreg(&["simulate", s, "--out", d.to_str().unwrap(), "--seed", "12"]);
    assert_ne!(
        fs::read(a.join("runs.csv")).unwrap(),
        fs::read(d.join("runs.csv")).unwrap()
    );
}

#[test]
fn m3_with_wide_design_names_the_conflict() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", &scenario_json("m3", UNIFORM, 0.5, ALL, 1));
    let out = circreg(&[
        "simulate",
        s.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("m3") && err.contains("design"), "{err}");
}

#[test]
fn scenario_errors_carry_paths() {
    let dir = TempDir::new().unwrap();
    let text = scenario_json("m1", UNIFORM, -2.0, r#"[{"method":"gl","c0_sine":"big"}]"#, 1);
    let s = write(dir.path(), "s.json", &text);
    let out = circreg(&[
        "simulate",
        s.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("estimators[0]"), "{}", stderr(&out));
}

#[test]
fn compare_needs_two_estimators() {
    let dir = TempDir::new().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        &scenario_json("m1", UNIFORM, -2.0, r#"[{"method":"gl"}]"#, 2),
    );
    let out = circreg(&[
        "compare",
        s.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("at least 2"), "{}", stderr(&out));
}

#[test]
fn compare_rows_are_paired_by_run() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", &scenario_json("m1", UNIFORM, -2.0, ALL, 4));
    let out_dir = dir.path().join("o");
    let out = circreg(&["compare", s.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("runs.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 4);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i / 3).to_string());
        assert_eq!(row[1], ["gl", "nw", "ll"][i % 3]);
    }
}

#[test]
fn calibrate_grid_sizes() {
    let dir = TempDir::new().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        &scenario_json("m1", UNIFORM, -2.0, r#"[{"method":"gl"}]"#, 3),
    );
    let s = s.to_str().unwrap();
    let rows = |extra: &[&str]| {
        let out_dir = dir.path().join(format!("cal{}", extra.len()));
        let mut args = vec!["calibrate", s, "--out", out_dir.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = circreg(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        let csv = fs::read_to_string(out_dir.join("calibration.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "c01,c02,median_risk,mean_risk,failures");
        csv.lines().count() - 1
    };
    assert_eq!(rows(&[]), 12);
    assert_eq!(rows(&["--surface"]), 100);
    assert_eq!(rows(&["--c0", "0.01,0.04", "--surface"]), 4);
}

#[test]
fn calibrate_single_cell_matches_simulate() {
    let dir = TempDir::new().unwrap();
    let est = r#"[{"method":"gl","c0_sine":0.04,"c0_cosine":0.04}]"#;
    let s = write(dir.path(), "s.json", &scenario_json("m1", UNIFORM, -2.0, est, 8));
    let s = s.to_str().unwrap();
    let cal = dir.path().join("cal");
    let sim = dir.path().join("sim");
    assert!(
        circreg(&["calibrate", s, "--out", cal.to_str().unwrap(), "--c0", "0.04"])
            .status
            .success()
    );
    assert!(circreg(&["simulate", s, "--out", sim.to_str().unwrap()])
        .status
        .success());
    let table: Value = serde_json::from_str(&fs::read_to_string(cal.join("calibration.json")).unwrap()).unwrap();
    let report: Value = serde_json::from_str(&fs::read_to_string(sim.join("report.json")).unwrap()).unwrap();
    let row = &table["rows"][0];
    let summary = &report["estimators"][0]["summary"];
    assert_eq!(row["median_risk"], summary["median"]);
    assert_eq!(row["mean_risk"], summary["mean"]);
    assert_eq!(row["failures"], summary["failures"]);
}
