use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfourier")).current_dir(dir).args(args).output().expect("spawn rfourier")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,re,im,radius"));
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn ball_value(v: &Value) -> f64 {
    v["value"].as_str().unwrap().parse().unwrap()
}

const SMALL_G: &str = r#"{"schema":"v1","intervals":[["-1/256pi","1/256pi"]]}"#;
const E0: &str = r#"{"schema":"v1","coeffs":[{"n":0,"re":"1/1","im":"0/1"}]}"#;
const E1: &str = r#"{"schema":"v1","coeffs":[{"n":1,"re":"1/1","im":"0/1"}]}"#;
const CANONICAL: &str = r#"{"schema":"v1","family":"rational-point","t0":"1/3"}"#;

#[test]
fn kk_certificate_has_the_log_target_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "g.json", SMALL_G);
    let a = run(d, &["kk", "g.json", "--out", "a"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let cert: Value = serde_json::from_str(&fs::read_to_string(d.join("a/certificate.json")).unwrap()).unwrap();
    let target = ball_value(&cert["bound_target"]);
    assert!((target - 2.0 * std::f64::consts::LN_2 / std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(cert["passed"], Value::Bool(true));

    let b = run(d, &["kk", "g.json", "--out", "b"]);
    assert_eq!(code(&b), 0);
    for f in ["r.json", "p.json", "certificate.json"] {
        assert_eq!(fs::read(d.join("a").join(f)).unwrap(), fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_input_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.json", "{not json");
    assert_eq!(code(&run(tmp.path(), &["kk", "bad.json"])), 2);
    assert_eq!(code(&run(tmp.path(), &["kk", "missing.json"])), 2);
    assert_eq!(code(&run(tmp.path(), &["diverge", "bad.json"])), 2);
    write(tmp.path(), "t.json", CANONICAL);
    assert_eq!(code(&run(tmp.path(), &["diverge", "t.json", "--grid", "1"])), 2);
    assert_eq!(code(&run(tmp.path(), &["frobnicate"])), 2);
}

#[test]
fn diverge_reports_a_gap_and_the_full_series() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "t.json", CANONICAL);
    let o = run(d, &["diverge", "t.json", "--grid", "0,0", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let gaps: Value = serde_json::from_str(&fs::read_to_string(d.join("out/gaps.json")).unwrap()).unwrap();
    let gap = ball_value(&gaps[0]["gap"]);
    assert!(gap > 1.0 / (8.0 * std::f64::consts::PI));

    let f: Value = serde_json::from_str(&fs::read_to_string(d.join("out/f.json")).unwrap()).unwrap();
    let degree = f["coeffs"].as_array().unwrap().iter().map(|c| c["n"].as_i64().unwrap().abs()).max().unwrap();
    let rows = csv_rows(&d.join("out/partial_sums.csv"));
    assert_eq!(rows.len() as i64, degree + 1);

    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["command"], "diverge");
    for c in report["certificates"].as_array().unwrap() {
        assert!(c.get("target").is_some() && c.get("measured").is_some());
    }
}

#[test]
fn diverge_outside_the_covers_is_not_captured() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "t.json", CANONICAL);
    let o = run(tmp.path(), &["diverge", "t.json", "--grid", "0,0", "--t0", "2", "--out", "out"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn fejer_of_e0_is_constant_one() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "e0.json", E0);
    assert_eq!(code(&run(d, &["fejer", "e0.json", "--t0", "1/2", "--n-max", "6", "--out", "a"])), 0);
    let rows = csv_rows(&d.join("a/fejer.csv"));
    assert_eq!(rows.len(), 7);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i as f64);
        assert!((r[1] - 1.0).abs() <= r[3] + 1e-15 && r[2].abs() <= r[3] + 1e-15);
    }
    assert_eq!(code(&run(d, &["fejer", "e0.json", "--t0", "1/2", "--n-max", "0", "--out", "b"])), 0);
    assert_eq!(csv_rows(&d.join("b/fejer.csv")).len(), 1);
}

#[test]
fn fejer_of_an_indicator_test_grows_at_a_captured_point() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "t.json", CANONICAL);
    let o = run(d, &["fejer", "t.json", "--t0", "1/3", "--n-max", "64", "--depth", "3", "--out", "a"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&d.join("a/fejer.csv"));
    assert_eq!(rows.len(), 65);
    assert!(rows[64][1] > rows[0][1] + 1.0);
    assert!(rows[64][1] > 2.0);
}

#[test]
fn carleson_of_e1_at_zero_is_one() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "e1.json", E1);
    assert_eq!(code(&run(d, &["carleson", "e1.json", "--t0", "0", "--out", "a"])), 0);
    let text = fs::read_to_string(d.join("a/carleson.csv")).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - 1.0).abs() <= row[2]);
}

#[test]
fn verify_runs_named_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["verify", "parseval", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["suites"][0]["suite"], "parseval");
    assert_eq!(code(&run(tmp.path(), &["verify", "harmonic"])), 0);
    assert_eq!(code(&run(tmp.path(), &["verify", "no-such-suite"])), 2);
}
