//! End-to-end tests of the binary: JSON in, JSON out, exit codes.

use std::io::Write as _;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fdtrace"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn trace_jordan_splits_weights() {
    let (code, stdout, _) = run_with_stdin(
        &["trace", "jordan", "-"],
        r#"{"algebra":{"blocks":[1,1]},"weights":[2.0,-3.0]}"#,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["plus"]["weights"], serde_json::json!([2.0, 0.0]));
    assert_eq!(v["minus"]["weights"], serde_json::json!([0.0, 3.0]));
    assert_eq!(v["norm_identity_pass"], serde_json::json!(true));
}

#[test]
fn malformed_json_exits_2_with_position() {
    let (code, _, stderr) = run_with_stdin(&["trace", "jordan", "-"], "{\n  \"algebra\": oops");
    assert_eq!(code, 2);
    assert!(stderr.contains("line 2"), "stderr was: {stderr}");
}

#[test]
fn missing_compose_key_exits_2_naming_the_key() {
    let (code, _, stderr) = run_with_stdin(
        &["groupoid", "validate", "-"],
        r#"{"units":[0],"arrows":[{"id":0,"src":0,"rng":0}],"inv":[[0,0]]}"#,
    );
    assert_eq!(code, 2);
    assert!(stderr.contains("compose"), "stderr was: {stderr}");
}

#[test]
fn pair_groupoid_iso_check_passes() {
    let fixture = r#"{
        "units": [0, 1],
        "arrows": [
            {"id": 0, "src": 0, "rng": 0},
            {"id": 1, "src": 1, "rng": 1},
            {"id": "a", "src": 0, "rng": 1},
            {"id": "b", "src": 1, "rng": 0}
        ],
        "compose": [
            [0, 0, 0], [1, 1, 1],
            ["a", 0, "a"], [1, "a", "a"],
            ["b", 1, "b"], [0, "b", "b"],
            ["b", "a", 0], ["a", "b", 1]
        ],
        "inv": [[0, 0], [1, 1], ["a", "b"], ["b", "a"]]
    }"#;
    let (code, stdout, _) = run_with_stdin(&["groupoid", "check-iso", "-"], fixture);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["trace_dim"], serde_json::json!(1));
    assert_eq!(v["measure_dim"], serde_json::json!(1));
    assert_eq!(v["pass"], serde_json::json!(true));
}

#[test]
fn verify_writes_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let status = bin()
        .args([
            "verify",
            "all",
            "--seed",
            "5",
            "--cases",
            "20",
            "--out",
            path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code().unwrap(), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["seed"], serde_json::json!(5));
    assert_eq!(report["cases"], serde_json::json!(20));
    assert_eq!(report["all_passed"], serde_json::json!(true));
    assert_eq!(report["checks"].as_array().unwrap().len(), 12);
}

#[test]
fn dual_lift_inverts_hat() {
    let (code, stdout, _) = run_with_stdin(
        &["dual", "lift", "-"],
        r#"{"algebra":{"blocks":[2,3]},"coords":[1.5,-0.25]}"#,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["hat"]["coords"], serde_json::json!([1.5, -0.25]));
    // LP value: max(|1.5|/2, |0.25|/3)
    assert_eq!(v["dual_value"], serde_json::json!(0.75));
}
