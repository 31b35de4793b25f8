use std::process::{Command, Output};

use serde_json::Value;

fn freeform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeform"))
        .args(args)
        .env("FREEFORM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn caps_in_every_space_form_are_equality_cases() {
    let out = freeform(&["verify", "thm1", "--family", "caps", "--K", "all", "--k", "all", "--count", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["counts"]["fail"], 0);
    assert_eq!(v["shapes"], 15);
    for r in v["records"].as_array().unwrap() {
        assert!(r["lhs"].as_f64().unwrap().abs() < 1e-10);
        assert!(r["ratio"].is_null(), "equality cases carry no ratio");
    }
}

#[test]
fn low_dimensional_corollary_on_fifty_perturbed_shapes() {
    let out = freeform(&["verify", "cor-lowdim", "--case", "i", "--family", "perturbed", "--count", "50", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 50);
    let two_pi = 2.0 * std::f64::consts::PI;
    for r in recs {
        assert_eq!(r["status"], "pass");
        assert!(r["rhs"].as_f64().unwrap() >= two_pi - 1e-8);
    }
}

#[test]
fn sweep_writes_csv_tending_to_equality() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = freeform(&[
        "sweep", "thm1", "--shape", "profile", "--epsilon", "0:0.3:0.01", "--K", "0", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epsilon,lhs,rhs,ratio"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 31);
    let mut gaps = Vec::new();
    for row in &rows {
        let (lhs, rhs): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        if !row[3].is_empty() {
            assert!(row[3].parse::<f64>().unwrap() <= 1.0);
        }
        gaps.push(rhs - lhs);
    }
    assert!(gaps[0].abs() < 1e-12 && gaps.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_freeform"))
            .args(["verify", "identities", "--count", "2", "--seed", "3"])
            .env("FREEFORM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("5"));
}

#[test]
fn describe_reports_cap_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cap.json");
    std::fs::write(&path, r#"{"kind": "cap", "K": 0, "R": 1, "params": {"rho": 1}}"#).unwrap();
    let out = freeform(&["describe", "--shape", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let pi = std::f64::consts::PI;
    assert!((v["area"].as_f64().unwrap() - 2.0 * pi * (1.0 - 0.5f64.sqrt())).abs() < 1e-10);
    assert!((v["boundary_length"].as_f64().unwrap() - 2.0 * pi / 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn csv_reports_have_the_fixed_header() {
    let out = freeform(&["verify", "thm4", "--family", "caps", "--K", "1", "--count", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,check,kind,n,K,k,lhs,rhs,ratio,status,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn operational_errors_have_distinct_exit_codes() {
    assert_eq!(freeform(&["verify", "thm1", "--K", "2"]).status.code(), Some(2));
    assert_eq!(freeform(&["verify", "perez", "--K", "-1"]).status.code(), Some(2));
    assert_eq!(freeform(&["verify", "thm1", "--shape", "/nonexistent.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    std::fs::write(&path, r#"{"kind": "disk", "K": 1, "R": 3.5}"#).unwrap();
    let out = freeform(&["verify", "thm1", "--shape", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failing_verdicts_exit_with_one() {
    // a two-point rule on one panel cannot resolve the Reilly identity
    let out = freeform(&["verify", "reilly", "--count", "1", "--K", "0", "--quad-order", "2", "--quad-level", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["counts"]["fail"].as_u64().unwrap() > 0);
}

#[test]
fn zero_tolerance_is_a_configuration_error() {
    let out = freeform(&["verify", "identities", "--count", "1", "--rel-tol", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
