use std::process::{Command, Output};

fn octoform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octoform"))
        .args(args)
        .env_remove("OCTOFORM_TABLES_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn expand_theta() {
    let o = octoform(&["expand", "theta", "--prec", "5", "--format", "json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["coefficients"], serde_json::json!(["1", "2", "0", "0", "2"]));
}

#[test]
fn expand_named_forms() {
    let o = octoform(&["expand", "E_4,1,chi8", "--prec", "3", "--format", "json"]);
    assert_eq!(json(&o)["coefficients"][0], "11/2");
    let o = octoform(&["expand", "f_{4,6}", "--prec", "2", "--format", "csv"]);
    assert_eq!(stdout(&o), "n,coefficient\n0,0\n1,1\n");
}

#[test]
fn unknown_name_suggests() {
    let o = octoform(&["expand", "f_{4,9}", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let doc = json(&o);
    assert!(doc["error"].as_str().unwrap().contains("f_{4,8}"));
    assert_eq!(doc["exit_code"], 2);
}

#[test]
fn formula_document() {
    let o = octoform(&["formula", "5", "0", "2", "1", "0", "--format", "json"]);
    assert!(o.status.success());
    let doc = json(&o);
    assert_eq!(doc["space"], "M4_48_triv");
    assert_eq!(doc["terms"].as_array().unwrap().len(), 30);
    assert_eq!(doc["terms"][0]["symbol"], "f1");
    assert_eq!(doc["terms"][0]["coefficient"], "7/600");
    assert_eq!(doc["terms"][0]["divisor_sum"], "14/5");
    assert_eq!(doc["terms"][12]["coefficient"], "-4/5");
}

#[test]
fn low_precision_is_a_usage_error() {
    for args in [
        &["formula", "0", "0", "6", "2", "--prec", "20"][..],
        &["basis", "M4_48_chi8", "--prec", "33"],
        &["rank", "--prec", "10"],
    ] {
        let o = octoform(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn out_of_scope_form_is_a_finding() {
    let o = octoform(&["formula", "0", "0", "0", "8", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["error"].is_string());
    let o = octoform(&["verify", "8", "0", "0", "0", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_exponents_are_usage_errors() {
    assert_eq!(octoform(&["formula", "1", "1", "1"]).status.code(), Some(2));
    assert_eq!(octoform(&["formula", "x", "0", "6", "2"]).status.code(), Some(2));
    assert_eq!(octoform(&["count", "1", "1"]).status.code(), Some(2));
    assert_eq!(octoform(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_with_trailing_nmax() {
    let o = octoform(&["verify", "0", "0", "4", "2", "2", "100", "--format", "json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let doc = json(&o);
    assert_eq!(doc["status"], "match");
    assert_eq!(doc["n_max"], 100);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 101);
    assert_eq!(doc["table"]["status"], "match");

    let o = octoform(&["verify", "0", "0", "6", "2", "40", "--format", "json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["n_max"], 40);
}

#[test]
fn verify_blocked_space_exits_one() {
    let o = octoform(&["verify", "1", "1", "1", "5", "0", "--nmax", "10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    assert_eq!(doc["status"], "blocked");
    assert!(doc["detail"].as_str().unwrap().contains("F19"));
}

#[test]
fn count_points() {
    let o = octoform(&["count", "1", "1", "1", "1", "1", "1", "1", "1", "1"]);
    assert_eq!(stdout(&o), "16\n");
    let o = octoform(&["count", "1", "1", "1", "1", "1", "1", "1", "1", "2", "--format", "json"]);
    assert_eq!(json(&o)["count"], "112");
}

#[test]
fn basis_csv_dump() {
    let o = octoform(&["basis", "m4_16_chi8", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("symbol,label,n,coefficient"));
    assert_eq!(text.lines().count(), 1 + 8 * 34);
}

#[test]
fn rank_reports_dependencies() {
    let o = octoform(&["rank", "M4_48_chi24", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let doc = json(&o);
    assert_eq!(doc[0]["rank"], 26);
    assert_eq!(doc[0]["dimension"], 28);
    assert!(octoform(&["rank", "M4_48_chi8"]).status.success());
}

#[test]
fn tables_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let shipped = include_str!("../../core/data/tables/table03.txt");
    std::fs::write(dir.path().join("table03.txt"), shipped).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_octoform"))
        .args(["tables", "3", "--format", "csv"])
        .env("OCTOFORM_TABLES_DIR", dir.path())
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("table,key,status,detail,position,symbol,derived,published\n"));

    let missing = dir.path().join("nowhere");
    let o = octoform(&["tables", "3", "--tables-dir", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--all", "--nmax", "20", "--format", "csv", "--jobs", "4"];
    let a = octoform(&args);
    let b = octoform(&["verify", "--all", "--nmax", "20", "--format", "csv", "--jobs", "1"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1));
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 1 + 84 + 203);
    assert!(text.contains("00422,M4_48_triv,match"));
}
