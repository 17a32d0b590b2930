use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-ech")).args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_toric-ech"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn capacity_of_the_unit_ball() {
    let rows = lines(&run(&["capacity", "--domain", "E(1,1)", "--k", "5"]));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["schema"], "toric-ech/capacity/v1");
    assert_eq!(rows[0]["c"], "2");
}

#[test]
fn capacity_ranges_give_one_row_per_k() {
    let rows = lines(&run(&["capacity", "--domain", "P(3/2,1)", "--k", "0-4"]));
    let cs: Vec<&str> = rows.iter().map(|r| r["c"].as_str().unwrap()).collect();
    assert_eq!(cs, ["0", "1", "2", "5/2", "7/2"]);
}

#[test]
fn index_of_a_hyperbolic_edge() {
    let rows = lines(&run(&["index", "--gen", "h(1,1)"]));
    assert_eq!(rows[0]["I"], 3);
    assert_eq!(rows[0]["h"], 1);
}

#[test]
fn minimal_reports_absence_as_null() {
    let rows = lines(&run(&["minimal", "--domain", "P(1,1)", "--k", "1"]));
    assert!(rows[0]["generator"].is_null());
    let rows = lines(&run(&["minimal", "--domain", "B(3)", "--k", "5"]));
    assert_eq!(rows[0]["generator"], "e(1,1)^2");
}

#[test]
fn check_excludes_below_the_threshold() {
    let rows = lines(&run(&["check", "--domain", "P(2,1)", "--target", "B(299/100)", "--gens", "e(1,1)^3;e(1,1)^4"]));
    assert_eq!(rows[0]["verdict"], "excluded");
    assert_eq!(rows[0]["excluded_by"], "e(1,1)^3");
    assert_eq!(rows[0]["conditional"], false);
}

#[test]
fn certificates_round_trip_through_verify() {
    let out = run(&["check", "--domain", "P(2,1)", "--target", "B(31/10)", "--gens", "e(1,1)^4", "--gens", "e(1,1)^2"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let rows = lines(&out);
    assert_eq!(rows[0]["verdict"], "not_excluded");
    assert_eq!(rows[0]["certificates"].as_array().unwrap().len(), 2);
    let verified = lines(&run_with_stdin(&["verify-certificate"], &text));
    assert_eq!(verified.len(), 2);
    assert!(verified.iter().all(|v| v["valid"] == true));
}

#[test]
fn tampered_certificates_exit_with_three() {
    let out = run(&["check", "--domain", "P(2,1)", "--target", "B(31/10)", "--gens", "e(1,1)^4"]);
    let rows = lines(&out);
    let mut cert = rows[0]["certificates"][0].clone();
    cert["target"] = Value::from("B(2)");
    let out = run_with_stdin(&["verify-certificate", "--file", "-"], &cert.to_string());
    assert_eq!(out.status.code(), Some(3));
    let out = run_with_stdin(&["verify-certificate"], "not json");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exhausted_budget_exits_with_two() {
    let out = run(&["check", "--domain", "P(2,1)", "--target", "B(29/10)", "--gens", "e(1,1)^4", "--budget", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_input_exits_with_one() {
    assert_eq!(run(&["capacity", "--domain", "Q(1)", "--k", "1"]).status.code(), Some(1));
    assert_eq!(run(&["capacity", "--domain", "B(1)", "--k", "x"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bound_finds_the_polydisk_threshold() {
    let rows = lines(&run(&["bound", "--domain", "P(3/2,1)", "--family", "ball", "--dmax", "3"]));
    assert_eq!(rows[0]["c"], "5/2");
}

#[test]
fn scan_rows_follow_grid_order() {
    let rows = lines(&run(&["--jobs", "2", "scan", "--grid", "1,2,3/2", "--dmax", "3"]));
    let got: Vec<(&str, &str)> = rows.iter().map(|r| (r["a"].as_str().unwrap(), r["bound"].as_str().unwrap())).collect();
    assert_eq!(got, [("1", "2"), ("2", "3"), ("3/2", "5/2")]);
}

#[test]
fn csv_has_a_header_and_no_schema_column() {
    let out = run(&["--format", "csv", "capacity", "--domain", "B(1)", "--k", "1-2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut it = text.lines();
    assert_eq!(it.next(), Some("domain,k,c,decimal"));
    assert_eq!(it.count(), 2);
}

#[test]
fn enumerate_lists_generators_and_factorizations() {
    let rows = lines(&run(&["enumerate", "--index", "2"]));
    let mut gens: Vec<&str> = rows.iter().map(|r| r["generator"].as_str().unwrap()).collect();
    gens.sort();
    assert_eq!(gens, ["e(0,1)", "e(1,0)"]);
    let rows = lines(&run(&["enumerate", "--gen", "e(1,0)^2 e(1,1)", "--n", "2"]));
    assert_eq!(rows.len(), 2);
}
