use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_filtration-lab"))
}

fn s1() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/s1.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_report(args: &[&str]) -> (Value, i32) {
    let out = run(&[&["--format", "json"], args].concat());
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

fn find<'a>(list: &'a Value, name: &str) -> &'a Value {
    list.as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no {name}"))
}

fn coords(w: &Value) -> Vec<(String, Value)> {
    w["coords"].as_array().unwrap().iter().map(|c| (c["name"].as_str().unwrap().to_string(), c["time"].clone())).collect()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("filtration-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_json(path: &Path, v: &Value) {
    std::fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

#[test]
fn classify_s1_reports_the_h_witness() {
    let (v, code) = json_report(&["classify", s1().to_str().unwrap()]);
    assert_eq!(code, 0);
    let h = find(&v["sections"][0]["classification"], "H");
    assert_eq!(h["status"], "FAIL");
    let c = coords(&h["witness"]);
    assert_eq!(c, vec![("u".into(), 1.into()), ("s".into(), 1.into()), ("t".into(), 2.into())]);
    assert_eq!(find(&v["sections"][0]["classification"], "HP")["status"], "PASS");
}

#[test]
fn verify_all_is_deterministic() {
    let args = ["verify-all", "--seed", "7", "--count", "50", "--format", "json"];
    let a = bin().args(args).env("FILTRATION_LAB_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("FILTRATION_LAB_THREADS", "4").output().unwrap();
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn pseudo_honest_is_skipped_without_hp() {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(s1()).unwrap()).unwrap();
    v["tau"] = serde_json::json!([0, 1, 2, "inf"]);
    let path = tmp("not_hp.json");
    write_json(&path, &v);
    let args = ["decompose", path.to_str().unwrap(), "--variant", "pseudo_honest"];
    let (report, code) = json_report(&args);
    assert_eq!(code, 0);
    let check = find(&report["sections"][0]["checks"], "decompose/pseudo_honest");
    assert_eq!(check["status"], "SKIPPED-precondition");
    assert_eq!(check["witness"]["check"], "HP");
    let strict = run(&[&["--strict"], &args[..]].concat());
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn s1_stopped_decomposition_of_m() {
    let (v, code) = json_report(&["decompose", s1().to_str().unwrap(), "--variant", "stopped_predictable"]);
    assert_eq!(code, 0);
    let checks = &v["sections"][0]["checks"];
    for name in ["martingale", "equals_canonical", "stopped_identity"] {
        assert_eq!(find(checks, &format!("decompose/stopped_predictable/{name}"))["status"], "PASS");
    }
}

#[test]
fn compensate_s1() {
    let (v, code) = json_report(&["compensate", s1().to_str().unwrap()]);
    assert_eq!(code, 0);
    let hpg = &v["sections"][0]["outputs"]["H^p,G"];
    // H^{p,G}_2 on atom b
    assert_eq!(hpg[2][1], "5/4");
}

#[test]
fn bad_probabilities_exit_with_location() {
    let text = std::fs::read_to_string(s1()).unwrap().replacen("\"1/4\"", "\"3/8\"", 1);
    let path = tmp("nine_eighths.json");
    std::fs::write(&path, text).unwrap();
    let (v, code) = json_report(&["classify", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "validation");
    assert_eq!(v["error"]["pointer"], "/probabilities");
}

#[test]
fn unknown_variant_and_command_are_usage_errors() {
    assert_eq!(run(&["decompose", s1().to_str().unwrap(), "--variant", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn construct_then_classify() {
    let base = tmp("sub.json");
    let realized = tmp("realized.json");
    assert!(run(&["generate", "--seed", "3", "--kind", "submartingale", "--output", base.to_str().unwrap()]).status.success());
    let (v, code) = json_report(&[
        "construct",
        base.to_str().unwrap(),
        "--from-submartingale",
        "F",
        "--output",
        realized.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(find(&v["sections"][0]["checks"], "construct/azema_F")["status"], "PASS");
    let (c, _) = json_report(&["classify", realized.to_str().unwrap()]);
    assert_eq!(find(&c["sections"][0]["classification"], "HP")["status"], "PASS");
}

#[test]
fn extend_realizes_the_field() {
    let out = tmp("s1_ext.json");
    let (v, code) = json_report(&["extend", s1().to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(find(&v["sections"][0]["checks"], "extend/realized_field")["status"], "PASS");
    assert!(out.exists());
}

#[test]
fn info_drift_on_a_cox_market() {
    let path = tmp("cox.json");
    assert!(run(&["generate", "--seed", "2", "--kind", "cox", "--output", path.to_str().unwrap()]).status.success());
    let (v, _) = json_report(&["info-drift", path.to_str().unwrap()]);
    let checks = &v["sections"][0]["checks"];
    assert_eq!(find(checks, "info_drift/G_martingale")["status"], "PASS");
    assert_eq!(find(checks, "info_drift/kw_orthogonality")["status"], "PASS");
    assert!(v["sections"][0]["outputs"]["psi"].is_array());
}

#[test]
fn immerse_independent_time() {
    let path = tmp("indep.json");
    assert!(run(&["generate", "--seed", "5", "--kind", "independent", "--output", path.to_str().unwrap()]).status.success());
    let (v, code) = json_report(&["immerse", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
}
