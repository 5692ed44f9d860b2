//! End-to-end smoke tests of the command-line interface.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_weightlab"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weightlab-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const GOOD_SCENARIO: &str = r#"{
  "name": "cli-check",
  "seed": 5,
  "task": {
    "kind": "weight-check",
    "params": {
      "weights": [{ "exponent": [1, 2], "dim": 1 }],
      "class": { "ap": { "p": [2, 1] } },
      "expect_in_class": true
    }
  }
}"#;

#[test]
fn schema_prints_formats() {
    let out = bin().arg("schema").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("weight-check"));
    assert!(text.contains("fk-scan"));
    assert!(text.contains("report.json"));
}

#[test]
fn run_scenario_and_write_deterministic_report() {
    let dir = temp_dir("run");
    let file = dir.join("check.json");
    std::fs::write(&file, GOOD_SCENARIO).unwrap();
    let out_dir = dir.join("out");

    let out = bin().arg("run").arg(&file).arg("--out-dir").arg(&out_dir).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"in_class\": true"));

    let report_path = out_dir.join("cli-check.report.json");
    let first = std::fs::read(&report_path).unwrap();
    let out = bin().arg("run").arg(&file).arg("--out-dir").arg(&out_dir).output().unwrap();
    assert!(out.status.success());
    let second = std::fs::read(&report_path).unwrap();
    assert_eq!(first, second, "reports must be byte-identical for a fixed (scenario, seed)");

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn run_rejects_unknown_fields_with_nonzero_exit() {
    let dir = temp_dir("reject");
    let file = dir.join("bad.json");
    std::fs::write(&file, GOOD_SCENARIO.replace("\"seed\": 5", "\"seed\": 5, \"zzz\": 1"))
        .unwrap();
    let out = bin().arg("run").arg(&file).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "diagnostic should carry a position: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn suite_aggregates_and_isolates_failures() {
    let dir = temp_dir("suite");
    std::fs::write(dir.join("a.json"), GOOD_SCENARIO).unwrap();
    std::fs::write(dir.join("b.json"), "{ broken").unwrap();
    let out_dir = dir.join("out");
    let out = bin().arg("suite").arg(&dir).arg("--out-dir").arg(&out_dir).output().unwrap();
    assert!(!out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pass"));
    assert!(stdout.contains("error"));
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("file,name,status"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bundled_scenarios_all_pass() {
    let scenarios = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let out = bin().arg("suite").arg(&scenarios).arg("--jobs").arg("2").output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "stdout: {stdout}\nstderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("all passed: true"));
}
