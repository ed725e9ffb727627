//! Black-box invocation tests: exit codes, JSON schema round trips, and
//! seeded determinism of the binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn s5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s5"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn parse_stdout(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write_toy_csv(name: &str, rows: usize, noise_col: bool) -> PathBuf {
    let path = std::env::temp_dir().join(name);
    let mut body = String::from(if noise_col { "y,x1,x2,const\n" } else { "y,x1,x2\n" });
    for i in 0..rows {
        let x1 = (i as f64 * 0.7).sin() * 2.0 + (i as f64) * 0.01;
        let x2 = (i as f64 * 1.3).cos() - (i as f64) * 0.02;
        let y = 2.0 * x1;
        if noise_col {
            body.push_str(&format!("{y},{x1},{x2},1.0\n"));
        } else {
            body.push_str(&format!("{y},{x1},{x2}\n"));
        }
    }
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn exit_codes_follow_the_contract() {
    // usage errors: 2
    assert_eq!(s5(&["select", "--response", "y"]).status.code(), Some(2));
    assert_eq!(s5(&["--definitely-not-a-flag"]).status.code(), Some(2));
    assert_eq!(s5(&["select", "--input", "x.csv", "--response", "y", "--prior", "nope"]).status.code(), Some(2));
    // runtime failure: 1
    let missing = s5(&["select", "--input", "/nonexistent.csv", "--response", "y"]);
    assert_eq!(missing.status.code(), Some(1));
    let err_doc = parse_stdout(&missing);
    assert!(err_doc["error"].is_string());
    // success: 0
    let csv = write_toy_csv("s5_ok.csv", 40, false);
    let ok = s5(&["select", "--input", csv.to_str().unwrap(), "--response", "y", "--qn", "2"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn select_report_has_the_stable_schema() {
    let csv = write_toy_csv("s5_schema.csv", 40, false);
    let out = s5(&[
        "select", "--input", csv.to_str().unwrap(), "--response", "y",
        "--prior", "pimom", "--qn", "2", "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    for key in [
        "command", "config", "map_model", "map_score", "posterior",
        "odds_count_0.001", "metrics", "timing", "warnings", "seed",
    ] {
        assert!(!doc[key].is_null() || key == "metrics", "missing key {key}");
    }
    assert_eq!(doc["command"], "select");
    assert_eq!(doc["map_model"], serde_json::json!([0]));
    assert!(doc["posterior"][0]["prob"].as_f64().unwrap() > 0.99);
    assert!(doc["timing"]["wall_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn constant_columns_are_dropped_with_a_warning() {
    let csv = write_toy_csv("s5_const.csv", 30, true);
    let out = s5(&["select", "--input", csv.to_str().unwrap(), "--response", "y", "--qn", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    let warnings = doc["warnings"].as_array().unwrap();
    assert!(
        warnings.iter().any(|w| w.as_str().unwrap().contains("const")),
        "expected a dropped-column warning, got {warnings:?}"
    );
    assert_eq!(doc["metrics"]["p"], 2);
}

#[test]
fn non_numeric_cell_fails_with_line_number() {
    let path = std::env::temp_dir().join("s5_bad.csv");
    std::fs::write(&path, "y,x1\n1.0,2.0\n3.0,oops\n").unwrap();
    let out = s5(&["select", "--input", path.to_str().unwrap(), "--response", "y"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = parse_stdout(&out);
    let msg = doc["error"].as_str().unwrap();
    assert!(msg.contains("line 3"), "error should name the line: {msg}");
}

#[test]
fn duplicate_headers_are_rejected() {
    let path = std::env::temp_dir().join("s5_dup.csv");
    std::fs::write(&path, "y,x1,x1\n1.0,2.0,3.0\n2.0,1.0,0.0\n").unwrap();
    let out = s5(&["select", "--input", path.to_str().unwrap(), "--response", "y"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(parse_stdout(&out)["error"]
        .as_str()
        .unwrap()
        .contains("duplicated header"));
}

#[test]
fn simulate_checksum_is_seed_deterministic() {
    let args = [
        "simulate", "--case", "2", "--n", "60", "--p", "30",
        "--prior", "pemom", "--tau", "2", "--seed", "1234",
    ];
    let a = parse_stdout(&s5(&args));
    let b = parse_stdout(&s5(&args));
    assert_eq!(
        a["metrics"]["data_checksum"], b["metrics"]["data_checksum"],
        "same seed must generate identical data"
    );
    assert_eq!(a["map_model"], b["map_model"]);
    let mut other = args.to_vec();
    other[12] = "999";
    let c = parse_stdout(&s5(&other));
    assert_ne!(a["metrics"]["data_checksum"], c["metrics"]["data_checksum"]);
}

#[test]
fn low_tau_triggers_the_growth_condition_warning() {
    // τ = 1 with p = 1000 sits below log p ≈ 6.9.
    let out = s5(&[
        "simulate", "--case", "3", "--n", "50", "--p", "1000",
        "--prior", "pemom", "--tau", "1", "--algo", "s5", "--J", "3", "--L", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = parse_stdout(&out);
    let warnings = doc["warnings"].as_array().unwrap();
    assert!(
        warnings
            .iter()
            .any(|w| w.as_str().unwrap().contains("growth condition")),
        "expected the growth-condition warning, got {warnings:?}"
    );
}

#[test]
fn prc_emits_points_and_optional_csv() {
    let curve = std::env::temp_dir().join("s5_curve.csv");
    let out = s5(&[
        "prc", "--case", "3", "--n", "60", "--p", "25", "--prior", "pemom",
        "--tau-grid", "1,2,3", "--replicates", "2", "--seed", "4",
        "--curve-csv", curve.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = parse_stdout(&out);
    assert_eq!(doc["metrics"]["points"].as_array().unwrap().len(), 3);
    assert!(doc["metrics"]["area"].is_number());
    let csv_body = std::fs::read_to_string(curve).unwrap();
    assert!(csv_body.starts_with("hyper,precision,recall"));
    assert_eq!(csv_body.lines().count(), 4);
}

#[test]
fn single_grid_point_is_degenerate() {
    let out = s5(&[
        "prc", "--case", "3", "--n", "50", "--p", "20", "--prior", "gprior",
        "--g-grid", "1000", "--replicates", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_stdout(&out);
    assert!(doc["metrics"]["area"].is_null());
    assert_eq!(doc["metrics"]["degenerate"], true);
}

#[test]
fn compare_search_reports_both_algorithms_per_p() {
    let out = s5(&[
        "compare-search", "--case", "1", "--n", "50", "--p", "20,40",
        "--replicates", "2", "--prior", "pimom", "--N", "60",
        "--J", "8", "--L", "4", "--Mn", "10", "--seed", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = parse_stdout(&out);
    let rows = doc["metrics"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let algos: Vec<&str> = rows.iter().map(|r| r["algo"].as_str().unwrap()).collect();
    assert_eq!(algos, vec!["s5", "sss", "s5", "sss"]);
}

#[test]
fn output_file_round_trips() {
    let csv = write_toy_csv("s5_out.csv", 30, false);
    let json_path = std::env::temp_dir().join("s5_report.json");
    let out = s5(&[
        "select", "--input", csv.to_str().unwrap(), "--response", "y",
        "--qn", "2", "--output", json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&json_path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(doc["command"], "select");
    // stdout stays empty when an output file is requested
    assert!(out.stdout.is_empty());
}
