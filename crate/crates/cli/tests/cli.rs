use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cesmul"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn cesmul")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn t6_value_is_inverse_sqrt_two() {
    let cfg = config("t6.json");
    let out = run(&["mult", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&out);
    assert_eq!(rep["regime"], "T6");
    let v = rep["value"].as_f64().unwrap();
    assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4 * std::f64::consts::FRAC_1_SQRT_2);
    assert!(rep["input"]["r"].is_string());
    assert!(rep["quadrature"]["error_estimate"].is_number());
}

#[test]
fn oracle_flag_reports_lower_bound_below_value() {
    let cfg = config("t6.json");
    let out = run(&["mult", "--config", cfg.to_str().unwrap(), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&out);
    let lb = rep["oracle"]["lower_bound"].as_f64().unwrap();
    let v = rep["value"].as_f64().unwrap();
    assert!(lb > 0.0 && lb <= v * 1.0001, "lb {lb} value {v}");
}

#[test]
fn zero_function_has_zero_norm() {
    let cfg = config("norm_zero.json");
    let out = run(&["norm", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"].as_f64(), Some(0.0));
}

#[test]
fn reduce_matches_reduced_power() {
    let cfg = config("reduce.json");
    let out = run(&["reduce", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep = json(&out);
    let v = rep["value"].as_f64().unwrap();
    let four = rep["four_weight_value"].as_f64().unwrap();
    assert!((four - v.sqrt()).abs() < 1e-12);
}

#[test]
fn verify_quick_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["verify", "--seed", "7", "--quick", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let rep: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(rep["failed"], 0);
    assert!(rep["table"].as_array().unwrap().iter().all(|r| r["seed"].is_u64()));
}

#[test]
fn csv_output_has_header() {
    let out = run(&["glue", "--seed", "1", "--n", "3", "--lemma", "SUP_INT", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("lemma,seed"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("missing.json", r#"{"r":"1/2"}"#),
        ("unknown.json", r#"{"space":{"kind":"ces","exponents":["1","1"],"weights":[{"family":"zero"},{"family":"zero"}]},"f":{"family":"zero"},"extra":1}"#),
        ("syntax.json", "{not json"),
    ];
    for (name, body) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        let cmd = if name == "missing.json" { "mult" } else { "norm" };
        let out = run(&[cmd, "--config", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const ONE: &str = r#"{"family":"power","c":1,"alpha":0}"#;

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{"p1":"inf","q1":"1","p2":"1","q2":"1","u1":{ONE},"v1":{ONE},"u2":{ONE},"v2":{ONE},"f":{ONE}}}"#
    );
    let p = write(&dir, "inf.json", &body);
    let out = run(&["reduce", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn degenerate_weight_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(r#"{{"r":"1/2","p":"1","q":"2","u":{ONE},"w":{ONE},"v":{ONE},"f":{ONE}}}"#);
    let p = write(&dir, "flat.json", &body);
    let out = run(&["mult", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
