//! End-to-end tests of the `qbh` binary: exit codes, output formats, and
//! the documented flag surface.

use std::process::{Command, Output};

fn qbh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbh"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn usage_error_names_the_flag_and_exits_2() {
    let out = qbh(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--suite"), "{err}");

    let out2 = qbh(&["verify", "--no-such-flag"]);
    assert_eq!(out2.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out2.stderr).contains("--no-such-flag"));

    let out3 = qbh(&["frobnicate"]);
    assert_eq!(out3.status.code(), Some(2));
}

#[test]
fn verify_polar_suite_passes_and_emits_schema_1_json() {
    let out = qbh(&[
        "verify",
        "--suite",
        "polar",
        "--samples",
        "50",
        "--seed",
        "42",
        "--json",
        "-",
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "polar suite carries the documented red check"
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["suite"], "polar");
    assert_eq!(doc["seed"], 42);
    let checks = doc["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["id"].is_string());
        assert!(c["paper_ref"].is_string());
        assert!(c["tolerance"].as_f64().unwrap() > 0.0);
    }
    // the only failing polar check is the documented kernel-invariance one
    let failing: Vec<&str> = checks
        .iter()
        .filter(|c| !c["pass"].as_bool().unwrap())
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(failing, vec!["polar.kernel.invariance"]);
}

#[test]
fn verify_calculus_suite_exits_zero() {
    let out = qbh(&[
        "verify",
        "--suite",
        "calculus",
        "--samples",
        "50",
        "--json",
        "-",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["failed"], 0);
}

#[test]
fn trajectory_csv_has_stable_columns_and_conserved_j3() {
    let out = qbh(&[
        "trajectory",
        "--chart",
        "polar",
        "--at",
        "1,0,0,1.2",
        "--steps",
        "2000",
        "--h",
        "0.001",
        "--out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,q1,q2,p1,p2,H,J2,J3,J4");
    let mut j3_min = f64::INFINITY;
    let mut j3_max = f64::NEG_INFINITY;
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols.len(), 9);
        j3_min = j3_min.min(cols[7]);
        j3_max = j3_max.max(cols[7]);
        rows += 1;
    }
    assert_eq!(rows, 2001);
    assert!(
        j3_max - j3_min < 1e-6 * (1.0 + j3_max.abs()),
        "J3 spread {}",
        j3_max - j3_min
    );
}

#[test]
fn trajectory_numbers_round_trip_through_decimal() {
    let out = qbh(&[
        "trajectory",
        "--chart",
        "parabolic",
        "--at",
        "1,1,1,0",
        "--steps",
        "5",
        "--h",
        "0.001",
        "--out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    // parse -> format -> parse is the identity for every cell
    for line in csv.lines().skip(1) {
        for cell in line.split(',') {
            let v: f64 = cell.parse().unwrap();
            let reparsed: f64 = format!("{v}").parse().unwrap();
            assert_eq!(v.to_bits(), reparsed.to_bits(), "cell {cell}");
        }
    }
}

#[test]
fn trajectory_runtime_error_exits_3() {
    // radial plunge into the guarded origin
    let out = qbh(&[
        "trajectory",
        "--chart",
        "polar",
        "--at",
        "0.05,0,-2,0",
        "--steps",
        "10000",
        "--h",
        "0.01",
        "--out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn point_report_contains_documented_observables() {
    let out = qbh(&[
        "point-report",
        "--chart",
        "parabolic",
        "--at",
        "1,1,1,0",
        "--g",
        "1",
        "--json",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["observables"]["K4"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((doc["observables"]["H"].as_f64().unwrap() + 0.25).abs() < 1e-12);
    // the tabulated-coefficient audit flags exactly the beta24 slot
    let flagged: Vec<&str> = doc["forms"]["audit"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["residual"].as_f64().unwrap() > 1e-8)
        .map(|a| a["slot"].as_str().unwrap())
        .collect();
    assert_eq!(flagged, vec!["beta24"]);
    assert_eq!(doc["kernel"]["dimension"], 2);
}

#[test]
fn point_report_polar_includes_oscillator_block() {
    let out = qbh(&[
        "point-report",
        "--chart",
        "polar",
        "--at",
        "1,0,1,1",
        "--alpha0",
        "1",
        "--json",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["oscillator"]["H"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!((doc["oscillator"]["M"]["re"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((doc["oscillator"]["M"]["im"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // spectrum pattern of R1 is visible in the report
    let e3 = doc["recursions"]["R1"]["spectrum"]["e3"]["re"]
        .as_f64()
        .unwrap();
    let e4 = doc["recursions"]["R1"]["spectrum"]["e4"]["re"]
        .as_f64()
        .unwrap();
    assert!(e3.abs() < 1e-10 && e4.abs() < 1e-10);
}

#[test]
fn point_report_rejects_invalid_point_with_exit_3() {
    let out = qbh(&[
        "point-report",
        "--chart",
        "parabolic",
        "--at",
        "0,0,1,1",
        "--json",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn files_are_written_when_requested() {
    let dir = std::env::temp_dir().join(format!("qbh-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json_path = dir.join("report.json");
    let out = qbh(&[
        "verify",
        "--suite",
        "calculus",
        "--samples",
        "10",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let contents = std::fs::read_to_string(&json_path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&contents).unwrap();
    assert_eq!(doc["schema_version"], 1);
    std::fs::remove_dir_all(&dir).ok();
}
