use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn qbn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbn"))
        .args(args)
        .env_remove("QBN_MAX_COMBINATIONS")
        .output()
        .expect("binary runs")
}

fn fig1() -> String {
    fixture("fig1.qbn").display().to_string()
}

fn json_line(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(&text).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn type1_query() {
    let out = qbn(&["query", &fig1(), "--target", "D=d", "--evidence", "L=l", "--method", "type1"]);
    assert!(out.status.success());
    let v = json_line(&out);
    assert!((num(&v["lower"]) - 0.38615).abs() < 1e-5);
    assert!((num(&v["upper"]) - 0.44615).abs() < 1e-5);
    assert_eq!(v["upper_exact"], "29/65");
    assert_eq!(v["method"], "type1");
    assert_eq!(v["status"]["lower"], "exact");
}

#[test]
fn natural_query_with_and_without_reduction() {
    let f = fig1();
    let base = ["query", &f, "--target", "D=d", "--evidence", "L=l", "--method", "natural", "--policy", "nondescendants"];
    let reduced = json_line(&qbn(&base));
    let mut full_args = base.to_vec();
    full_args.push("--no-reduction");
    let full = json_line(&qbn(&full_args));
    for v in [&reduced, &full] {
        assert_eq!(v["lower_exact"], "21/55");
        assert_eq!(v["upper_exact"], "239/530");
        assert!((num(&v["lower"]) - 0.3818).abs() < 1e-4);
        assert!((num(&v["upper"]) - 0.4509).abs() < 1e-4);
    }
    assert_eq!(reduced["reduction"], true);
    assert_eq!(full["reduction"], false);
}

#[test]
fn policy_none_is_vacuous() {
    let v = json_line(&qbn(&["query", &fig1(), "--target", "D=d", "--evidence", "L=l", "--policy", "none"]));
    assert_eq!(v["lower_exact"], "0/1");
    assert_eq!(v["upper_exact"], "1/1");
    assert_eq!(v["constraints"], 13);
    assert_eq!(v["policy"], "none");
}

#[test]
fn float_mode_has_no_fractions() {
    let v = json_line(&qbn(&["query", &fig1(), "--target", "D=d", "--evidence", "L=l", "--float"]));
    assert!(v.get("lower_exact").is_none());
    assert!((num(&v["upper"]) - 0.450943).abs() < 1e-6);
}

#[test]
fn expectation_query() {
    let v = json_line(&qbn(&["query", &fig1(), "--target", "D=d", "--evidence", "L=l", "--expect", "d=1,dc=-1"]));
    assert_eq!(v["lower_exact"], "-13/55");
    let bad = qbn(&["query", &fig1(), "--target", "D=d", "--expect", "d=1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["query", &fig1(), "--target", "H=h", "--evidence", "L=lc,B=b"];
    let a = qbn(&args);
    let b = qbn(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timing_only_on_request() {
    let args = ["query", &fig1(), "--target", "D=d"];
    assert!(json_line(&qbn(&args)).get("wall_ms").is_none());
    let mut timed = args.to_vec();
    timed.push("--timing");
    assert!(json_line(&qbn(&timed))["wall_ms"].is_number());
}

#[test]
fn dsep() {
    let f = fig1();
    let yes = qbn(&["dsep", &f, "--x", "L", "--z", "H", "--given", "D"]);
    assert_eq!(String::from_utf8_lossy(&yes.stdout).trim(), "true");
    let no = qbn(&["dsep", &f, "--x", "F", "--z", "B", "--given", "H"]);
    assert_eq!(String::from_utf8_lossy(&no.stdout).trim(), "false");
    let marginal = qbn(&["dsep", &f, "--x", "F,L", "--z", "B"]);
    assert_eq!(String::from_utf8_lossy(&marginal.stdout).trim(), "true");
}

#[test]
fn six_vertices() {
    let out = qbn(&["vertices", &fig1(), "--joint-scope", "F,B", "--policy", "nondescendants"]);
    let v = json_line(&out);
    assert_eq!(v["count"], 6);
    let points = v["vertices"].as_array().unwrap();
    assert!(points.iter().any(|p| p == &serde_json::json!(["1/4", "1/4", "1/4", "1/4"])));
    assert!(points.iter().any(|p| p == &serde_json::json!(["2/11", "3/11", "3/11", "3/11"])));
}

#[test]
fn validate_exit_codes() {
    let clean = qbn(&["validate", &fig1()]);
    assert_eq!(clean.status.code(), Some(0));

    let text = std::fs::read_to_string(fixture("fig1.qbn"))
        .unwrap()
        .replace("\"F=f,B=b\": [0.8, 0.2],", "\"F=f,B=b\": [0.8, 0.3],");
    let path = std::env::temp_dir().join(format!("qbn-cli-invalid-{}.qbn", std::process::id()));
    std::fs::write(&path, text).unwrap();
    let dirty = qbn(&["validate", path.to_str().unwrap()]);
    assert_eq!(dirty.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&dirty.stdout).contains("normalization"));
    let query = qbn(&["query", path.to_str().unwrap(), "--target", "D=d"]);
    assert_eq!(query.status.code(), Some(2));
    std::fs::remove_file(path).ok();
}

#[test]
fn errors_are_structured() {
    let out = qbn(&["query", &fig1(), "--target", "Q=q"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "UnknownNode");

    let missing = qbn(&["query", "/nonexistent/net.qbn", "--target", "D=d"]);
    assert_eq!(missing.status.code(), Some(1));

    let capped = Command::new(env!("CARGO_BIN_EXE_qbn"))
        .args(["query", &fig1(), "--target", "D=d", "--method", "type1"])
        .env("QBN_MAX_COMBINATIONS", "3")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&capped.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "CombinationCap");
}
