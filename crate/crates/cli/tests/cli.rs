use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn residua(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_residua"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn analyze_divisor_12_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = residua(&[
        "analyze",
        "--gen",
        "divisor:12",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let profiles = report["profiles"].as_array().unwrap();
    assert_eq!(profiles.len(), 6);
    let twelve = profiles.iter().find(|p| p["element"] == "12").unwrap();
    assert_eq!(twelve["mu"], "2");
    assert_eq!(twelve["core"], "1");
}

#[test]
fn analyze_output_is_deterministic() {
    let a = residua(&["analyze", "--gen", "random:seed=3,size=20"]);
    let b = residua(&["analyze", "--gen", "random:seed=3,size=20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.ends_with(b"\n"));
}

#[test]
fn emitted_lattice_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("lattice.json");
    let first = residua(&[
        "analyze",
        "--gen",
        "divisor:30",
        "--emit-lattice",
        doc.to_str().unwrap(),
    ]);
    assert_eq!(first.status.code(), Some(0));
    let again = dir.path().join("again.json");
    let second = residua(&[
        "analyze",
        "--input",
        doc.to_str().unwrap(),
        "--emit-lattice",
        again.to_str().unwrap(),
    ]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(fs::read(&doc).unwrap(), fs::read(&again).unwrap());
    assert_eq!(json_of(&first)["profiles"], json_of(&second)["profiles"]);
}

#[test]
fn hasse_diagram_in_dot() {
    let out = residua(&["analyze", "--gen", "boolean:2", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph hasse {"));
    assert_eq!(text.matches("->").count(), 4);
}

#[test]
fn laws_pass_on_random_distributive() {
    let out = residua(&["laws", "--gen", "random:seed=7,size=50"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    let laws = report.as_array().unwrap();
    assert!(laws.len() >= 22);
    assert!(laws.iter().all(|r| r["verdict"]["status"] == "pass"));
}

#[test]
fn laws_skip_coframe_laws_on_m3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m3.json");
    fs::write(
        &path,
        r#"{"elements": ["0","a","b","c","1"],
            "relation": [["0","a"],["0","b"],["0","c"],["a","1"],["b","1"],["c","1"]],
            "mode": "covers"}"#,
    )
    .unwrap();
    let out = residua(&["laws", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    let laws = report.as_array().unwrap();
    assert!(laws.iter().any(|r| r["verdict"]["status"] == "skipped"));
    assert!(laws.iter().all(|r| r["verdict"]["status"] != "fail"));
}

#[test]
fn jobs_setting_does_not_change_the_report() {
    let serial = Command::new(env!("CARGO_BIN_EXE_residua"))
        .args(["laws", "--gen", "divisor:60"])
        .env("RESIDUA_JOBS", "1")
        .output()
        .unwrap();
    let parallel = residua(&["laws", "--gen", "divisor:60", "--jobs", "4"]);
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn testbed_layers_and_predicate_disagreements() {
    let out = residua(&["testbed", "--dims", "2", "--bound", "8", "--cb"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"0,inf\"") || text.contains("\"inf,0\""));
}

#[test]
fn testbed_isolation_from_above() {
    let out = residua(&[
        "testbed",
        "--dims",
        "2",
        "--element",
        "inf,0",
        "--above",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("not_isolated"));
}

#[test]
fn group_and_ring_reports() {
    let g = residua(&["group", "--name", "Z4"]);
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(json_of(&g)["frattini"], "{0,2}");
    let r = residua(&["ring", "--n", "12"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(json_of(&r)["jacobson"], "(6)");
}

#[test]
fn bad_input_exits_with_2() {
    assert_eq!(
        residua(&["analyze", "--gen", "nonsense:1"]).status.code(),
        Some(2)
    );
    assert_eq!(residua(&["testbed", "--dims", "9"]).status.code(), Some(2));
    assert_eq!(residua(&["ring", "--n", "1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cycle.json");
    fs::write(
        &path,
        r#"{"elements":["a","b"],"relation":[["a","b"],["b","a"]],"mode":"leq"}"#,
    )
    .unwrap();
    assert_eq!(
        residua(&["analyze", "--input", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
