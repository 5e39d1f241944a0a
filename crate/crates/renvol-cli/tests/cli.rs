//! End-to-end CLI contract tests: exit codes, strict config parsing,
//! byte-level determinism, and output shapes.

use std::process::Command;

fn renvol() -> Command {
    Command::new(env!("CARGO_BIN_EXE_renvol"))
}

#[test]
fn renvol_run_passes_and_reports_json() {
    let out = renvol().args(["renvol", "--cap", "0.0"]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verification"], "renvol");
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().len() >= 3);
}

#[test]
fn identical_config_and_seed_reproduce_bytes() {
    let run = || renvol().args(["identities", "--seed", "11"]).output().unwrap();
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical");
}

#[test]
fn malformed_config_exits_two_and_names_the_key() {
    let dir = std::env::temp_dir().join("renvol-cli-test-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"model": {"name": "hyperbolic"}, "unknown_key": 1}"#).unwrap();
    let out = renvol()
        .args(["renvol", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown_key"), "diagnostic must name the key: {err}");
}

#[test]
fn out_of_range_override_exits_two() {
    let out = renvol().args(["renvol", "--ladder", "0.2,1.5,10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = renvol().args(["renvol", "--cap", "0.9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = renvol().args(["gbrv", "--model", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_ladder_has_one_row_per_rung() {
    let out = renvol()
        .args(["renvol", "--format", "csv", "--ladder", "0.2,0.8,10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let rung_rows = text.lines().filter(|l| l.starts_with("rung,")).count();
    assert_eq!(rung_rows, 10);
    let fit_rows = text.lines().filter(|l| l.starts_with("fit,")).count();
    assert!(fit_rows >= 3);
}

#[test]
fn sweep_csv_has_one_row_per_latitude() {
    let out = renvol().args(["sweep", "--format", "csv"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("sweep,")).count(), 7);
}

#[test]
fn failing_tolerance_exits_one() {
    // an absurdly tight tolerance turns a passing run into a failing one
    let dir = std::env::temp_dir().join("renvol-cli-test-tight");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tight.json");
    std::fs::write(
        &path,
        r#"{"numeric": {"tolerances": {"renvol_rel": 1e-30}}}"#,
    )
    .unwrap();
    let out = renvol().args(["renvol", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_dir_writes_report_files() {
    let dir = std::env::temp_dir().join("renvol-cli-test-out");
    let _ = std::fs::remove_dir_all(&dir);
    let out = renvol().args(["renvol", "--out"]).arg(&dir).output().unwrap();
    assert!(out.status.success());
    let report = std::fs::read_to_string(dir.join("report.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(doc["passed"], true);
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join("renvol-cli-test-override");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfg.json");
    std::fs::write(
        &path,
        r#"{"surface": {"cap": 0.2}, "seed": 3, "numeric": {"ladder": {"eps0": 0.2, "ratio": 0.8, "rungs": 8}}}"#,
    )
    .unwrap();
    // flag wins over the file value
    let out = renvol()
        .args(["renvol", "--cap", "0.1", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["cap"], 0.1);
    assert_eq!(doc["config"]["ladder"]["rungs"], 8);
}
