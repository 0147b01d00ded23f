//! Black-box tests of the binary: exit codes, report shape, byte
//! stability, and the env/flag override order.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cocycle"))
}

fn write_instance(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("cocycle-cli-{name}-{}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn solve_reports_an_odd_difference() {
    let path = write_instance(
        "solve",
        r#"{"type":"gcd_congruence","indices":[4,6],"n":1,"a":{"4,6":1,"6,4":-1}}"#,
    );
    let (code, stdout) = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["status"], "ok");
    let x4 = report["x"]["4"].as_i64().unwrap();
    let x6 = report["x"]["6"].as_i64().unwrap();
    assert_eq!((x6 - x4).rem_euclid(2), 1, "x(6) - x(4) must be odd");
    std::fs::remove_file(path).ok();
}

#[test]
fn check_names_the_violating_tuple() {
    let path = write_instance(
        "check",
        r#"{"type":"gcd_congruence","indices":[2],"n":1,"a":{"2,2":1}}"#,
    );
    let (code, stdout) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["status"], "fail");
    assert_eq!(report["witnesses"][0]["tuple"], "2,2,2");
    std::fs::remove_file(path).ok();
}

#[test]
fn counterexample_reports_free_rank_one() {
    let (code, stdout) = run(&["counterexample", "--rank", "3", "--lines", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains(r#""h1_free_rank":1"#));
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["solvable"], false);
}

#[test]
fn reports_are_byte_stable() {
    let (c1, out1) = run(&["counterexample", "--rank", "3", "--lines", "4"]);
    let (c2, out2) = run(&["counterexample", "--rank", "3", "--lines", "4"]);
    assert_eq!((c1, &out1), (c2, &out2));

    let (_, seeded1) = run(&["counterexample", "--rank", "3", "--lines", "4", "--seed", "9"]);
    let (_, seeded2) = run(&["counterexample", "--rank", "3", "--lines", "4", "--seed", "9"]);
    assert_eq!(seeded1, seeded2);
}

#[test]
fn timing_is_opt_in() {
    let (_, plain) = run(&["counterexample", "--rank", "3", "--lines", "4"]);
    assert!(!plain.contains("timing_ms"));
    let (_, timed) = run(&["--timing", "counterexample", "--rank", "3", "--lines", "4"]);
    assert!(timed.contains("timing_ms"));
}

#[test]
fn malformed_input_exits_one_with_a_message() {
    let path = write_instance(
        "bad-field",
        r#"{"type":"gcd_congruence","indices":[4,6],"n":1,"unknown":true}"#,
    );
    let (code, stdout) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["status"], "error");
    assert!(report["message"].as_str().unwrap().contains("unknown"));
    std::fs::remove_file(path).ok();

    let path = write_instance("bad-json", r#"{"type": "gcd_congruence", "indices": [4,"#);
    let (code, stdout) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert!(report["message"].as_str().unwrap().contains("line"));
    std::fs::remove_file(path).ok();

    let (code, stdout) = run(&["check", "/nonexistent/instance.json"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("nonexistent"));
}

#[test]
fn stdin_is_accepted_for_the_input() {
    let mut child = bin()
        .args(["solve", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"type":"gcd_congruence","indices":[4,6],"n":1,"a":{"4,6":1}}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code().unwrap(), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains(r#""status":"ok""#));
}

#[test]
fn flags_beat_environment_caps() {
    let path = write_instance(
        "cap",
        r#"{"type":"gcd_congruence","indices":[4,6,9],"n":1}"#,
    );
    let out = bin()
        .args(["cohomology", path.to_str().unwrap(), "--degree", "1"])
        .env("COCYCLE_MAX_DEGREE", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 1, "the env cap must apply");

    let out = bin()
        .args([
            "cohomology",
            path.to_str().unwrap(),
            "--degree",
            "1",
            "--max-degree",
            "2",
        ])
        .env("COCYCLE_MAX_DEGREE", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 0, "the flag must beat the env cap");
    std::fs::remove_file(path).ok();
}

#[test]
fn lattice_rejects_the_four_lines_family() {
    let path = write_instance(
        "lines",
        r#"{"type":"subgroup_family","ambient_rank":3,"members":[[[1,0,0]],[[0,1,0]],[[0,0,1]],[[1,1,1]]]}"#,
    );
    let (code, stdout) = run(&["lattice", path.to_str().unwrap(), "--max-closure", "60"]);
    assert_eq!(code, 2, "a distributivity witness must be found");
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["distributive"], false);
    assert!(report["witness"]["triple"].is_array());
    std::fs::remove_file(path).ok();
}

#[test]
fn selftest_smoke_passes() {
    let (code, stdout) = run(&["selftest", "--scale", "0"]);
    assert_eq!(code, 0, "selftest failed: {stdout}");
    assert!(stdout.contains(r#""status":"ok""#));
}

#[test]
fn unknown_instance_types_are_rejected() {
    let path = write_instance("unknown-type", r#"{"type":"mystery","indices":[2]}"#);
    let (code, stdout) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.contains("mystery"));
    std::fs::remove_file(path).ok();
}
