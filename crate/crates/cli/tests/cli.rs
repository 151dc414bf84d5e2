use std::process::{Command, Output};

use serde_json::Value;

fn subcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subcrit")).args(args).env_remove("SUBCRIT_CACHE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = subcrit(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn unlabelled_rooted_trees() {
    let v = json(&["coeffs", "--class", "trees", "--flavor", "unlabelled", "-N", "7"]);
    let counts: Vec<&str> = v["rows"].as_array().unwrap()[1..].iter().map(|r| r["count"].as_str().unwrap()).collect();
    assert_eq!(counts, ["1", "1", "2", "4", "9", "20", "48"]);
}

#[test]
fn labelled_cactus_forests() {
    let v = json(&["coeffs", "--class", "cacti", "--kind", "all", "-N", "4"]);
    let counts: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["count"].as_str().unwrap()).collect();
    assert_eq!(counts, ["1", "1", "2", "8", "57"]);
    assert_eq!(v["rows"][4]["coefficient"], "19/8");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(subcrit(&["coeffs", "--class", "trees", "--kind", "bogus"]).status.code(), Some(2));
    assert_eq!(subcrit(&["coeffs", "--class", "nope"]).status.code(), Some(2));
    assert_eq!(subcrit(&["coeffs", "--class", "sp", "--flavor", "unlabelled", "--kind", "connected"]).status.code(), Some(2));
    assert_eq!(subcrit(&["degree", "--class", "trees", "--flavor", "unlabelled"]).status.code(), Some(2));
    assert_eq!(subcrit(&["check", "11"]).status.code(), Some(2));
    assert_eq!(subcrit(&["growth", "--class", "trees", "--prec", "8"]).status.code(), Some(2));
}

#[test]
fn tree_blocks_are_deterministic() {
    let v = json(&["limitlaw", "--class", "trees", "--param", "blocks"]);
    assert_eq!(v["rows"][0]["mu"], "1");
    assert_eq!(v["rows"][0]["sigma2"], "0");
    assert_eq!(v["rows"][0]["positivity"], "computed-zero");
}

#[test]
fn json_is_deterministic_and_versioned() {
    let args = ["growth", "--class", "trees", "-N", "12", "--prec", "128", "--format", "json"];
    let (a, b) = (subcrit(&args), subcrit(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "growth");
    let gamma: f64 = v["rows"][0]["gamma"].as_str().unwrap().parse().unwrap();
    assert!((gamma - std::f64::consts::E).abs() < 1e-12, "{gamma}");
}

#[test]
fn csv_has_header_and_rows() {
    let o = subcrit(&["coeffs", "--class", "trees", "-N", "3", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,coefficient,count");
    assert_eq!(lines[4], "3,3/2,9");
}

#[test]
fn spec_emit_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = subcrit(&["spec", "--emit", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let file = dir.path().join("cacti-labelled.spec");
    assert!(file.exists());
    let printed = subcrit(&["spec", "--spec", file.to_str().unwrap()]);
    assert_eq!(stdout(&printed), std::fs::read_to_string(&file).unwrap());
    let v = json(&["coeffs", "--spec", file.to_str().unwrap(), "-N", "5"]);
    let builtin = json(&["coeffs", "--class", "cacti", "-N", "5"]);
    assert_eq!(v["rows"], builtin["rows"]);
}

#[test]
fn bad_spec_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.spec");
    std::fs::write(&file, "class broken labelled { C = z*Exp(; }").unwrap();
    let o = subcrit(&["coeffs", "--spec", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn oracle_caches_censuses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let first = json(&["oracle", "--class", "trees", "-N", "5", "--cache-dir", cache]);
    assert_eq!(first["labelled"], 125);
    assert_eq!(first["unlabelled"], 3);
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
    let second = json(&["oracle", "--class", "trees", "-N", "5", "--cache-dir", cache]);
    assert_eq!(first, second);
    let fresh = json(&["oracle", "--class", "trees", "-N", "5", "--no-cache"]);
    assert_eq!(first, fresh);
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let o = subcrit(&["degree", "--class", "trees", "-K", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let d1: f64 = v["rows"][0]["d_k"].as_str().unwrap().parse().unwrap();
    assert!((d1 - (-1f64).exp()).abs() < 1e-15);
}

#[test]
fn check_reports_and_sets_exit_code() {
    let pass = subcrit(&["check", "5", "--format", "json"]);
    assert_eq!(pass.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&pass.stdout).unwrap();
    assert_eq!(v["criteria"][0]["id"], 5);
    assert_eq!(subcrit(&["check", "4"]).status.code(), Some(4));
    assert_eq!(subcrit(&["check", "4", "--allow-known"]).status.code(), Some(0));
}
