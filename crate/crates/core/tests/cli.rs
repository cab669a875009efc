use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extremal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Output lines without the leading manifest comment.
fn body(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn enumerate_lists_trees_and_classes() {
    let o = run(&["enumerate", "3", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&o), vec!["P(e,S(e,e))", "classes: 1"]);
    assert!(stdout(&o).starts_with("# manifest {"));

    let o = run(&["enumerate", "2", "1"]);
    assert_eq!(body(&o), vec!["P(e,e)", "classes: 1"]);

    let o = run(&["enumerate", "3", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(body(&o), vec!["classes: 0"]);

    let o = run(&["enumerate", "4", "2", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classes"], 1);
    assert_eq!(v["trees"].as_array().unwrap().len(), 2);
    assert_eq!(v["manifest"]["command"], "enumerate");
}

#[test]
fn enumerate_rejects_bad_ranges() {
    assert_eq!(run(&["enumerate", "13", "2"]).status.code(), Some(64));
    assert_eq!(run(&["enumerate", "4", "0"]).status.code(), Some(64));
    assert_eq!(run(&["enumerate", "x", "1"]).status.code(), Some(64));
}

#[test]
fn weights_are_exact() {
    let o = run(&["weights", "P(e,S(e,e,e))"]);
    assert_eq!(body(&o), vec!["e0 1", "e1 1", "e2 1", "e3 1"]);
    let o = run(&["weights", "P(e,S(e,P(e,e)))"]);
    assert_eq!(body(&o), vec!["e0 1", "e1 1", "e2 3/4", "e3 3/4"]);
}

#[test]
fn weights_report_input_errors() {
    let o = run(&["weights", "S(e,e)"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parallel"));
    let o = run(&["weights", "P(e,x)"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 4"));
}

#[test]
fn verify_passes_and_catches_corruption() {
    let o = run(&["verify", "2..7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["instances"].as_array().unwrap().len(), 179);

    let o = run(&["verify", "P(e,e)"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cos = v["instances"][0]["target_cos"].as_f64().unwrap();
    assert!((cos - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

    let o = run(&["verify", "2..7", "--tol", "1e-15", "--corrupt-edge", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed: {"));

    let o = run(&["verify", "5", "--k", "2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["instances"].as_array().unwrap().len(), enumerate_count(5, 2));
}

fn enumerate_count(n: usize, k: usize) -> usize {
    extremal_core::sp::enumerate_rooted(n, k).len()
}

#[test]
fn table_matches_known_rows() {
    let o = run(&["table", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = body(&o);
    assert_eq!(rows[0], "n,1,2,3,4,5,6");
    assert_eq!(rows[1], "2,1,,,,,");
    assert_eq!(rows[5], "6,1,3,4,3,1,");
    assert_eq!(rows[6], "7,1,4,8,8,4,1");
    assert_eq!(run(&["table", "8"]).status.code(), Some(64));
    assert_eq!(run(&["table", "10", "--long"]).status.code(), Some(64));
}

#[test]
fn search_reports_classes() {
    let o = run(&["search", "2", "1", "--seed", "7", "--attempts", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["class_count"], 1);
    assert_eq!(v["violation"], false);
    let cos = v["result"]["members"][0]["target_cos"].as_f64().unwrap();
    assert!((cos - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    assert_eq!(v["manifest"]["seed"], 7);

    let o = run(&["search", "4", "2", "--seed", "1", "--attempts", "30"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["class_count"], 1);
}

#[test]
fn search_is_reproducible_and_needs_a_seed() {
    let args = ["search", "3", "1", "--seed", "3", "--attempts", "10"];
    let a: Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    let b: Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    assert_eq!(a["result"], b["result"]);
    assert_eq!(run(&["search", "3", "1"]).status.code(), Some(64));
    assert_eq!(run(&["search", "3", "3", "--seed", "1"]).status.code(), Some(64));
}

#[test]
fn out_writes_a_file() {
    let path = std::env::temp_dir().join(format!("extremal-cli-{}.csv", std::process::id()));
    let o = run(&["table", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("# manifest {\"command\":\"table\""));
    assert!(!text.contains("5,1,2,2,1"));
    assert!(text.contains("4,1,1,1"));
}
