#[path = "support/cli.rs"]
mod support;

use serde_json::Value;
use support::*;
use xnli_core::{load_csv, PreferenceStore};
use xnli_service::Session;

fn s(args: &[&str]) -> Vec<String> {
    args.iter().map(|a| a.to_string()).collect()
}

fn data() -> String {
    movies_path().display().to_string()
}

fn stderr_code(out: &std::process::Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"]["code"].as_str().unwrap().to_string()
}

#[test]
fn scenario_one_matches_golden_files() {
    for c in scenario_one() {
        check_case(&c).unwrap();
    }
}

#[test]
fn scenario_two_matches_golden_files() {
    for c in scenario_two() {
        check_case(&c).unwrap();
    }
}

#[test]
fn explain_shows_two_filter_steps() {
    let out = xnli(&s(&["explain", "--data", &data(), "--query", Q1_2]));
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let filters = v["trace"]["steps"].as_array().unwrap().iter().filter(|st| st["op"] == "Filter").count();
    assert_eq!(filters, 2);
}

#[test]
fn empty_query_is_an_input_error() {
    let out = xnli(&s(&["interpret", "--query", ""]));
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr_code(&out), "EmptyQuery");
}

#[test]
fn bad_arguments_exit_with_one() {
    let out = xnli(&s(&["frobnicate"]));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "Usage");

    let out = xnli(&s(&["hint", "--data", &data(), "--query", Q1_2, "--adjust", r#"{"type":"Nope"}"#]));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "BadAdjustment");

    let out = xnli(&s(&["explain", "--data", "/no/such.csv", "--query", "show genre"]));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "Io");

    let out = xnli(&s(&["explain", "--data", &data(), "--query", "show zzzz qqqq"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_goes_to_stdout() {
    let out = xnli(&s(&["--help"]));
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("explain"));
}

#[test]
fn examples_are_seeded() {
    let spec = r#"{"data":{"name":"movies"},"mark":"bar","encoding":{"x":{"field":"Genre","type":"nominal"},"y":{"aggregate":"count","type":"quantitative"}}}"#;
    let args = s(&["examples", "--data", &data(), "--spec", spec, "--seed", "7"]);
    let a = xnli(&args);
    let b = xnli(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(!v["valid"].as_array().unwrap().is_empty());
    assert!(v["valid"].as_array().unwrap().contains(&v["recommended"]));
}

#[test]
fn cli_output_equals_service_response() {
    let ds = load_csv(std::fs::File::open(movies_path()).unwrap(), "movies").unwrap();
    let mut session = Session::new("s-1", ds.id());
    for q in [Q1_1, Q1_2, Q1_3] {
        let served = serde_json::to_value(session.post_query(&ds, q).unwrap()).unwrap();
        let out = xnli(&s(&["explain", "--data", &data(), "--query", q]));
        let cli: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(cli, served, "{q}");
    }
    // The session learned nothing, so a fresh preference store agrees.
    assert_eq!(session.prefs, PreferenceStore::new());
}
