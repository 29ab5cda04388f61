//! Runs the `xnli` binary on the bundled movies table and compares outputs
//! with the checked-in golden files. Set `XNLI_UPDATE_GOLDEN=1` to rewrite
//! them.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub const Q1_1: &str = "show low budget and high gross movies, group by genre";
pub const Q1_2: &str = "show budget less than 100M and Gross more than 100M, group by genre";
pub const Q1_3: &str =
    "How many movies in each Genre whose Worldwide Gross is over 100M and Production Budget is under 100M";
pub const Q2_1: &str = "show the rating and box office";
pub const Q2_2: &str = "show the rating and worldwide gross";
pub const Q2_3: &str = "show the rating and worldwide gross of super hero movies released after 2009";

pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
}

fn case(name: &'static str, args: &[&str]) -> Case {
    let mut all = args.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    all.insert(1, "--data".into());
    all.insert(2, movies_path().display().to_string());
    Case { name, args: all }
}

pub fn movies_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/movies.csv")
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

pub fn scenario_one() -> Vec<Case> {
    vec![
        case("scenario1_q1_explain", &["explain", "--query", Q1_1]),
        case(
            "scenario1_q1_remove_title",
            &["hint", "--query", Q1_1, "--adjust", r#"{"type":"RemoveAttribute","field":"Title"}"#],
        ),
        case("scenario1_q2_explain", &["explain", "--query", Q1_2]),
        case("scenario1_q2_to_point", &["hint", "--query", Q1_2, "--adjust", r#"{"type":"ChangeMark","mark":"point"}"#]),
        case("scenario1_q3_explain", &["explain", "--query", Q1_3]),
    ]
}

pub fn scenario_two() -> Vec<Case> {
    vec![
        case("scenario2_q1_explain", &["explain", "--query", Q2_1]),
        case(
            "scenario2_q2_resolve",
            &["hint", "--query", Q2_2, "--adjust", r#"{"type":"ResolveAmbiguity","token":"rating","field":"IMDB Rating"}"#],
        ),
        case("scenario2_q3_explain", &["explain", "--query", Q2_3, "--prefer", "rating=IMDB Rating"]),
        case(
            "scenario2_q3_remove_year",
            &["hint", "--query", Q2_3, "--prefer", "rating=IMDB Rating", "--adjust", r#"{"type":"RemoveFilter","index":1}"#],
        ),
    ]
}

pub fn xnli(args: &[String]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xnli")).args(args).output().expect("run xnli")
}

/// Runs the case and returns its parsed stdout, checking it against the
/// golden file.
pub fn check_case(c: &Case) -> Result<serde_json::Value, String> {
    let out = xnli(&c.args);
    if !out.status.success() {
        return Err(format!("{}: exit {:?}: {}", c.name, out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let stdout = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let path = golden_path(c.name);
    if std::env::var_os("XNLI_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).map_err(|e| e.to_string())?;
    }
    let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if golden != stdout {
        return Err(format!("{}: output differs from {}", c.name, path.display()));
    }
    serde_json::from_str(&stdout).map_err(|e| e.to_string())
}
