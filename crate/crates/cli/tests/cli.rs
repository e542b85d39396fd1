use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn apm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apm"))
        .args(args)
        .env_remove("APM_DEFAULT_TOL")
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn e0_with(field: &str, value: &str) -> String {
    let mut v: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("E0.json")).unwrap()).unwrap();
    v[field] = serde_json::from_str(value).unwrap();
    v.to_string()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(
        apm(&["validate", &fixture("E0.json")]).status.code(),
        Some(0)
    );
    assert_eq!(
        apm(&["validate", &fixture("W3X.json")]).status.code(),
        Some(0)
    );

    let dir = tempfile::tempdir().unwrap();
    let asym = write(
        dir.path(),
        "asym.json",
        &e0_with("metric", "[[1,0.5,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]"),
    );
    let out = apm(&["validate", asym.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotSymmetric"));

    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(
        apm(&["validate", bad.to_str().unwrap()]).status.code(),
        Some(3)
    );
    assert_eq!(
        apm(&["validate", "/nonexistent/spec.json"]).status.code(),
        Some(3)
    );
}

#[test]
fn jacobi_violation_stops_before_checks() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "jacobi.json",
        &e0_with("structure_constants", "[[0,1,0,1.0],[0,2,1,1.0]]"),
    );
    let out = apm(&["verify", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("JacobiViolated"));
}

#[test]
fn verify_e0_passes_with_zero_defects() {
    let out = apm(&["verify", &fixture("E0.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"]["class_label"], "W0");
    assert_eq!(v["overall"], "PASS");
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["defect"].as_f64().unwrap(), 0.0, "{}", c["id"]);
        assert!(c["status"] == "PASS" || c["status"] == "SKIPPED");
    }
    let text = apm(&["verify", &fixture("E0.json"), "--format", "text"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("overall: PASS"));
}

#[test]
fn verify_is_byte_deterministic() {
    let a = apm(&["verify", &fixture("W3X.json")]);
    let b = apm(&["verify", &fixture("W3X.json")]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["classification"]["class_label"], "W3_strict");
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_apm"))
        .args(["verify", &fixture("E0.json")])
        .env("APM_DEFAULT_TOL", "1e-6")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"]["tolerance_used"].as_f64(), Some(1e-6));
    let bad = apm(&["verify", &fixture("E0.json"), "--tol", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn search_reproduces_committed_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = apm(&[
        "search-w3",
        "--dim",
        "4",
        "--seed",
        "0",
        "--out",
        d,
        "--name",
        "W3X",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let produced = std::fs::read(dir.path().join("W3X.json")).unwrap();
    assert_eq!(produced, std::fs::read(fixture("W3X.json")).unwrap());
    assert_eq!(
        apm(&["validate", dir.path().join("W3X.json").to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn search_rejects_small_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let out = apm(&[
        "search-w3",
        "--dim",
        "2",
        "--seed",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_batches() {
    let empty = tempfile::tempdir().unwrap();
    let out = apm(&["report", empty.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["files"], 0);

    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("E0.json"), dir.path().join("a_e0.json")).unwrap();
    write(dir.path(), "b_broken.json", "[1, 2");
    let out = apm(&["report", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports[0]["file"], "a_e0.json");
    assert_eq!(reports[0]["overall"], "PASS");
    assert_eq!(reports[1]["overall"], "FAIL");
    assert!(reports[1]["error"].as_str().unwrap().contains("ParseError"));
    assert_eq!(v["summary"]["pass"], 1);
}
