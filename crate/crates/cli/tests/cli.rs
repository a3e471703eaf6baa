use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uhpcflex")).args(args).output().unwrap()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn validate_passes_on_the_bundled_database() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["validate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_file(&out);
    assert_eq!(v["passed"], true);
    let verdicts: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["verdict"].as_str().unwrap()).collect();
    assert!(verdicts.contains(&"blocked"));
    assert!(!verdicts.contains(&"fail"));
}

#[test]
fn validate_flags_a_missed_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("appendix_b.csv")).unwrap();
    let db = dir.path().join("db.csv");
    std::fs::write(&db, text.replacen(",0.50,1.26,CL,", ",0.90,1.26,CL,", 1)).unwrap();
    let o = run(&["validate", "--db", db.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_input_writes_an_error_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mk.json");
    let missing = dir.path().join("nope.json");
    let o = run(&["mk", "--beam", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let v = json_file(&out);
    assert_eq!(v["error"]["exit_code"], 1);
    assert!(v["error"]["kind"].is_string());
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn simulate_writes_csv_and_event_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let beam = data("shao_vf2.0_rho2.10.json");
    let o = run(&["simulate", "--beam", beam.to_str().unwrap(), "--max-defl", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("step,P_kN,defl_mm,drift,event"));
    assert!(csv.lines().count() > 5);
    let log = json_file(&dir.path().join("curve.events.json"));
    assert_eq!(log["name"], "Ductal-vf2.0-rho2.10");
    assert!(log["events"].as_array().unwrap().iter().any(|e| e["event"].is_string()));
}

#[test]
fn explicit_format_overrides_the_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("classify.csv");
    let o = run(&["classify", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_file(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 47);
}

#[test]
fn classify_to_stdout_is_json() {
    let o = run(&["classify"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["accuracy"]["numerical"]["agree"], 25);
}

#[test]
fn material_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("m.json");
    std::fs::write(&rec, r#"{"f_c": 180, "f_t_p": 9, "colour": "grey"}"#).unwrap();
    let o = run(&["material", rec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
