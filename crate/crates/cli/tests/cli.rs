use std::path::Path;
use std::process::{Command, Output};

use anomalous_core::pack;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anomalous")).args(args).output().expect("binary runs")
}

fn bundled() -> String {
    pack::bundled_dir().to_str().expect("utf-8 path").to_owned()
}

fn first_scenario() -> String {
    let files = pack::scenario_files(&pack::bundled_dir()).unwrap();
    files[0].to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn every_command_passes_on_the_pack() {
    let dir = bundled();
    for cmd in ["approx", "reduce", "pipeline", "verify", "thresholds", "report"] {
        let out = run(&[cmd, "--scenario", &dir]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["schema"], "anomalous-batch/1");
        assert_eq!(v["pass"], true);
        assert_eq!(v["reports"].as_array().unwrap().len(), pack::default_pack().len());
    }
}

#[test]
fn reports_are_deterministic() {
    let file = first_scenario();
    for cmd in ["pipeline", "report"] {
        let a = run(&[cmd, "--scenario", &file, "--seed", "5"]);
        let b = run(&[cmd, "--scenario", &file, "--seed", "5"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert_eq!(json(&a)["seed"], 5, "{cmd}");
    }
}

/// A scenario whose first cloud point no longer satisfies its equation.
fn broken_scenario(dir: &Path) -> String {
    let sc = &pack::default_pack()[0];
    let mut v: Value = serde_json::from_str(&sc.to_json()).unwrap();
    let x = &mut v["cloud"][0]["x"][0][0]["free"][0];
    let num = x["num"].as_str().unwrap().parse::<i64>().unwrap();
    x["num"] = Value::String((num + 1).to_string());
    let path = dir.join("broken.json");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn a_broken_witness_fails_with_status_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = broken_scenario(tmp.path());
    for cmd in ["pipeline", "verify", "report"] {
        let out = run(&[cmd, "--scenario", &path]);
        assert_eq!(out.status.code(), Some(1), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["pass"], false, "{cmd}");
    }
}

#[test]
fn bad_input_is_an_error() {
    let out = run(&["pipeline", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("garbage.json");
    std::fs::write(&path, "{\"schema\": \"nope\"}").unwrap();
    let out = run(&["thresholds", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_and_saved_report_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let file = first_scenario();
    let report = tmp.path().join("pipeline.json");
    let out = run(&["pipeline", "--scenario", &file, "--out", report.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved["schema"], "anomalous-pipeline/1");

    let out = run(&["verify", "--scenario", &file, "--report", report.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["pass"], true);

    // a tampered bound is caught
    let mut v = saved.clone();
    let c = &mut v["witnesses"][0]["centro"]["m"];
    *c = Value::from(c.as_u64().unwrap() + 1);
    std::fs::write(&report, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let out = run(&["verify", "--scenario", &file, "--report", report.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));

    let out = run(&["verify", "--scenario", &bundled(), "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
