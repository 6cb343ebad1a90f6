//! End-to-end tests of the `ring-verify` binary: exit codes, report
//! shapes, and the documented trace formats.

mod common;

use std::process::{Command, Output};

use common::{solver_config, suite_protocol_path};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ring-verify"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn run_with_solver(args: &[&str]) -> Output {
    let config = solver_config();
    binary()
        .args(args)
        .args(["--solver-cmd", &config.command_template])
        .output()
        .expect("binary runs")
}

fn suite(file: &str) -> String {
    suite_protocol_path(file).display().to_string()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).to_string()
}

#[test]
fn verify_frozen_protocol_is_safe() {
    let output = run_with_solver(&[
        "verify",
        "--protocol",
        &suite("constant-false.rpf"),
        "--ring",
        "y > 6",
        "--bad",
        "x1 = x2 or x2 = x3 or x1 = x3",
        "--mode",
        "sync",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("verdict: SAFE"));
}

#[test]
fn verify_adjacent_step_violates_semisync() {
    let output = run_with_solver(&[
        "verify",
        "--protocol",
        &suite("adjacent-step.rpf"),
        "--ring",
        "y > 2",
        "--bad",
        "x1 = x2",
        "--mode",
        "semisync",
        "--json",
    ]);
    assert_eq!(output.status.code(), Some(1), "stderr: {}", stderr(&output));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["verdict"], "VIOLATION");
    let witness = &report["witness"];
    assert!(witness["n"].as_u64().unwrap() > 2);
    assert_eq!(witness["mode"], "semisync");
    let start: Vec<u64> = witness["start"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    let successor: Vec<u64> = witness["successor"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(start.len(), 2);
    // The successor is a collision the start has not reached yet.
    assert_ne!(start[0], start[1]);
    assert_eq!(successor[0], successor[1]);
}

#[test]
fn verify_async_needs_a_certificate() {
    let output = run_with_solver(&[
        "verify",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--ring",
        "y > 2",
        "--bad",
        "x1 = x2",
        "--mode",
        "async",
    ]);
    assert_eq!(output.status.code(), Some(3), "stdout: {}", stdout(&output));
    assert!(stderr(&output).contains("uniquely-sequentializable"));
}

#[test]
fn verify_async_with_certificate_goes_through() {
    let output = run_with_solver(&[
        "verify",
        "--protocol",
        &suite("constant-false.rpf"),
        "--ring",
        "y > 2",
        "--bad",
        "x1 = x2",
        "--mode",
        "async",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("verdict: SAFE"));
    assert!(text.contains("uniquely-sequentializable"));
}

#[test]
fn check_validity_verdicts() {
    let output = run_with_solver(&[
        "check",
        "validity",
        "--protocol",
        &suite("larger-gap-first.rpf"),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("verdict: VALID"));

    let dir = tempfile::tempdir().unwrap();
    let weak = dir.path().join("weak.rpf");
    std::fs::write(&weak, "x1 >= 1\n").unwrap();
    let output = run_with_solver(&[
        "check",
        "validity",
        "--protocol",
        weak.to_str().unwrap(),
        "--robots",
        "2",
    ]);
    assert_eq!(output.status.code(), Some(1), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("verdict: INVALID"));
    assert!(text.contains("counterexample view"));
}

#[test]
fn check_uniqseq_verdicts() {
    // No distance variable appears, so the robot count must be given.
    let output = run_with_solver(&[
        "check",
        "uniqseq",
        "--protocol",
        &suite("constant-false.rpf"),
        "--robots",
        "2",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("verdict: UNIQSEQ"));

    let output = run_with_solver(&[
        "check",
        "uniqseq",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--json",
    ]);
    assert_eq!(output.status.code(), Some(1), "stderr: {}", stderr(&output));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["verdict"], "NOT-UNIQSEQ");
    assert!(report["movers"]["movers"].as_array().unwrap().len() >= 2);
}

#[test]
fn simulate_one_sync_step() {
    let output = run(&[
        "simulate",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--n",
        "5",
        "--positions",
        "0,1",
        "--mode",
        "sync",
        "--steps",
        "1",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("step=0 mode=sync p=0,1"));
    assert!(text.contains("step=1 mode=sync p=4,2"));
}

#[test]
fn simulate_fixed_point_and_reach() {
    let output = run(&[
        "simulate",
        "--protocol",
        &suite("constant-false.rpf"),
        "--n",
        "6",
        "--positions",
        "1,4",
        "--mode",
        "sync",
        "--steps",
        "3",
    ]);
    let text = stdout(&output);
    for step in 0..=3 {
        assert!(text.contains(&format!("step={step} mode=sync p=1,4")));
    }

    let output = run(&[
        "simulate",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--n",
        "4",
        "--positions",
        "0,1",
        "--mode",
        "sync",
        "--reach",
    ]);
    let text = stdout(&output);
    assert_eq!(text.lines().collect::<Vec<_>>(), vec!["n=4; p=0,1", "n=4; p=3,2"]);
}

#[test]
fn simulate_async_traces_phases() {
    let output = run(&[
        "simulate",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--n",
        "5",
        "--positions",
        "0,1",
        "--mode",
        "async",
        "--steps",
        "2",
    ]);
    let text = stdout(&output);
    assert!(text.contains("step=0 mode=async p=0,1 phases=LL"));
    assert!(text.lines().count() >= 3);
    assert!(text.lines().all(|l| l.contains("phases=")));
}

#[test]
fn crosscheck_agreement_and_exit_codes() {
    let output = run(&[
        "crosscheck",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--n-max",
        "5",
        "--mode",
        "sync",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("agreement"));

    let output = run(&[
        "crosscheck",
        "--protocol",
        &suite("constant-false.rpf"),
        "--robots",
        "2",
        "--n-max",
        "4",
        "--mode",
        "async",
        "--json",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert!(report["pairs_checked"].as_u64().unwrap() > 0);
}

#[test]
fn goal_is_parsed_then_refused() {
    // A malformed goal is a parse error first.
    let output = run(&[
        "verify",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--ring",
        "y > 2",
        "--bad",
        "x1 = x2",
        "--goal",
        "x1 <",
        "--mode",
        "sync",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("expected a term"));

    // A well-formed goal is refused with the explanation.
    let output = run(&[
        "verify",
        "--protocol",
        &suite("larger-gap-first.rpf"),
        "--ring",
        "y > 2",
        "--bad",
        "x1 = x2",
        "--goal",
        "x1 = x2",
        "--mode",
        "sync",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("undecidable"));
}

#[test]
fn solver_template_from_environment() {
    let config = solver_config();
    let output = binary()
        .args([
            "check",
            "uniqseq",
            "--protocol",
            &suite("constant-false.rpf"),
            "--robots",
            "2",
        ])
        .env("RING_VERIFY_SOLVER", &config.command_template)
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("verdict: UNIQSEQ"));
}

#[test]
fn keep_smt_leaves_the_document_behind() {
    let output = run_with_solver(&[
        "check",
        "uniqseq",
        "--protocol",
        &suite("constant-false.rpf"),
        "--robots",
        "2",
        "--keep-smt",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stderr(&output);
    let line = text
        .lines()
        .find(|l| l.contains("kept SMT-LIB document at "))
        .expect("the kept path is reported");
    let path = line.rsplit("at ").next().unwrap().trim();
    let contents = std::fs::read_to_string(path).expect("kept file exists");
    assert!(contents.contains("(check-sat)"));
    let _ = std::fs::remove_file(path);
}

#[test]
fn usage_errors_exit_three() {
    let output = run(&[
        "verify",
        "--protocol",
        "/nonexistent/protocol.rpf",
        "--ring",
        "y > 2",
        "--bad",
        "x1 = x2",
        "--mode",
        "sync",
    ]);
    assert_eq!(output.status.code(), Some(3));

    // Robot count below the largest index in use.
    let output = run(&[
        "crosscheck",
        "--protocol",
        &suite("k3-dominant-gap.rpf"),
        "--robots",
        "2",
        "--n-max",
        "4",
        "--mode",
        "sync",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("--robots"));

    // Parse errors carry positions.
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.rpf");
    std::fs::write(&broken, "x1 >\n").unwrap();
    let output = run(&[
        "check",
        "uniqseq",
        "--protocol",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3));
}
