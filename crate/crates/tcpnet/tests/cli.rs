use std::path::PathBuf;
use std::process::Command;

use tcpnet::cli::{run, EXIT_CAP_EXCEEDED, EXIT_DATA, EXIT_DIRECTED, EXIT_INFEASIBLE, EXIT_NOT_IMPLIED, EXIT_NO_INPUT, EXIT_OK, EXIT_USAGE};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tcpnet(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        std::iter::once("tcpnet").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), text).unwrap();
    file
}

#[test]
fn check_reports_conditionally_acyclic() {
    let (code, out, _) = tcpnet(&["check", &fixture("flight.tcp")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("conditionally acyclic"));
}

#[test]
fn check_reports_directed_nets() {
    let net = temp_file(
        "tcpnet 1\nvar A : a0 a1\nvar B : b0 b1\nvar Z : z0 z1\ncp A -> B\nci A ~ B | Z\n\
         cpt A : a0 > a1\ncpt B | A=a0 : b0 > b1\ncpt B | A=a1 : b1 > b0\ncpt Z : z0 > z1\n\
         cit A ~ B | Z=z0 : B > A\n",
    );
    let (code, out, _) = tcpnet(&["check", net.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_DIRECTED, "{out}");
}

#[test]
fn dominates_prints_one_flip_witness() {
    let evening = fixture("evening.tcp");
    let (code, out, _) = tcpnet(&[
        "dominates",
        &evening,
        "--better",
        "J=black,P=white,S=white",
        "--worse",
        "J=white,P=black,S=white",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("implied by 1 flip"));
    assert!(out.contains("I-flip"));
    let (code, _, _) = tcpnet(&[
        "dominates",
        &evening,
        "--better",
        "J=white,P=white,S=white",
        "--worse",
        "J=black,P=black,S=red",
    ]);
    assert_eq!(code, EXIT_NOT_IMPLIED);
}

#[test]
fn search_streams_the_verified_optimum() {
    let (code, out, err) = tcpnet(&[
        "search",
        &fixture("evening.tcp"),
        "--constraints",
        &fixture("suits.con"),
        "--all",
        "--verify",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().next(), Some("J=black,P=white,S=white"));
    assert!(err.contains("verified against the oracle"));
}

#[test]
fn search_reports_infeasibility() {
    let evening = fixture("evening.tcp");
    let none = temp_file("allow (J): (black)\nallow (J): (white)\n");
    let (code, _, _) = tcpnet(&["search", &evening, "--constraints", none.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_INFEASIBLE);
}

#[test]
fn porcelain_emits_json_lines() {
    let (code, out, _) = tcpnet(&[
        "--porcelain",
        "search",
        &fixture("evening.tcp"),
        "--constraints",
        &fixture("suits.con"),
        "--first",
    ]);
    assert_eq!(code, EXIT_OK);
    let records: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records[0]["event"], "solution");
    assert_eq!(records[0]["outcome"]["P"], "white");
    let done = records.last().unwrap();
    assert_eq!(done["event"], "done");
    assert_eq!(done["dominance_queries"], 0);
}

#[test]
fn optimal_respects_given_values() {
    let (code, out, _) = tcpnet(&["optimal", &fixture("flight.tcp")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "A=ba,C=b,D=1d,S=1s,T=m");
    let (_, out, _) = tcpnet(&["optimal", &fixture("evening.tcp"), "--given", "J=white"]);
    assert_eq!(out.trim(), "J=white,P=black,S=white");
}

#[test]
fn oracle_closure_is_the_total_order() {
    let (code, out, _) = tcpnet(&["oracle", &fixture("ab.tcp"), "--closure"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 6);
    assert!(out.contains("A=a1,B=b2 > A=a2,B=b1"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(tcpnet(&["search", &fixture("evening.tcp")]).0, EXIT_USAGE);
    assert_eq!(tcpnet(&["frobnicate"]).0, EXIT_USAGE);
    let (code, _, err) = tcpnet(&["optimal", &fixture("evening.tcp"), "--given", "Q=1"]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn parse_errors_carry_a_span() {
    let net = temp_file("tcpnet 1\nvar A : a0 a1\ncpt Q : q0 > q1\n");
    let (code, _, err) = tcpnet(&["check", net.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("3:5"), "{err}");
}

#[test]
fn missing_input_exits_66() {
    assert_eq!(tcpnet(&["check", "/nonexistent/net.tcp"]).0, EXIT_NO_INPUT);
}

#[test]
fn outcome_cap_comes_from_the_environment() {
    let output = Command::new(env!("CARGO_BIN_EXE_tcpnet"))
        .args(["oracle", &fixture("evening.tcp"), "--acyclic"])
        .env("TCPNET_OUTCOME_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_CAP_EXCEEDED));
    assert!(String::from_utf8_lossy(&output.stderr).contains("TCPNET_OUTCOME_CAP"));
}

#[test]
fn output_is_deterministic() {
    let args = ["oracle", &fixture("flight.tcp")[..], "--closure"];
    assert_eq!(tcpnet(&args), tcpnet(&args));
    let args = ["search", &fixture("evening.tcp")[..], "--constraints", &fixture("suits.con")[..]];
    let first = tcpnet(&args);
    assert_eq!(first, tcpnet(&args));
}
