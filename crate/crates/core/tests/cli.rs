mod common;

use std::process::{Command, Output};

use common::{data_file, TRACE_MOUFANG, TRACE_SELFDIST};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agmloop"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).unwrap()
}

#[test]
fn mean_prints_agm() {
    let v: f64 = stdout(&["mean", "agm", "1", "2"]).trim().parse().unwrap();
    assert!((v - 1.4567910310469068).abs() < 1e-15);
    let doc = json(&["mean", "hm", "2", "3"]);
    assert_eq!(doc["kind"], "hm");
    assert!((num(&doc["value"]) - 2.4).abs() < 1e-15);
}

#[test]
fn star_identity_example() {
    let v: f64 = stdout(&["star", "1", "2.5"]).trim().parse().unwrap();
    assert!((v - 2.5).abs() <= 2.5e-9);
}

#[test]
fn nome_reports_residual() {
    let doc = json(&["nome", "2"]);
    assert!(num(&doc["q"]) < 0.0);
    assert!(num(&doc["residual"]) <= 1e-14);
    assert_eq!(code(&["nome", "0"]), 2);
    assert_eq!(code(&["nome", "-3"]), 2);
}

#[test]
fn json_numbers_have_seventeen_digits() {
    let out =
        String::from_utf8(run(&["--format", "json", "mean", "agm", "1", "2"]).stdout).unwrap();
    assert!(out.contains("\"value\": 1.4567910310469068e0"), "{out}");
}

#[test]
fn laws_pass_on_default_and_custom_grid() {
    assert_eq!(code(&["laws"]), 0);
    let doc = json(&["laws", "--grid", "1:2:0.5"]);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["grid"].as_array().unwrap().len(), 3);
    assert_eq!(code(&["laws", "--grid", "1:2"]), 2);
    assert_eq!(code(&["laws", "--tol", "-1"]), 2);
}

#[test]
fn too_tight_tolerance_fails_should_hold_laws() {
    let doc = json(&["laws", "--grid", "1:2:1", "--tol", "1e-300"]);
    assert_eq!(doc["pass"], false);
    assert_eq!(code(&["laws", "--grid", "1:2:1", "--tol", "1e-300"]), 1);
}

#[test]
fn loose_tolerance_makes_should_fail_laws_hold() {
    // a should-fail law whose defect drops under the tolerance is a failure
    assert_eq!(code(&["laws", "--grid", "1:2:1", "--tol", "10"]), 1);
}

#[test]
fn counterexamples_confirmed() {
    let doc = json(&["counterexamples"]);
    assert_eq!(doc["pass"], true);
    let list = doc["counterexamples"].as_array().unwrap();
    let gates = list.iter().filter(|c| c["role"] == "gate");
    for c in gates {
        assert_eq!(c["exceeds"], true, "{c}");
    }
}

#[test]
fn models_command() {
    let doc = json(&["models", "--max-order", "5"]);
    assert_eq!(doc["pass"], true);
    let counts: Vec<u64> = doc["orders"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["structures"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![1, 0, 1, 0, 6]);
    assert_eq!(code(&["models", "--max-order", "7"]), 2);
    assert_eq!(code(&["models", "--max-order", "0"]), 2);
}

#[test]
fn proof_check_both_traces() {
    for name in [TRACE_MOUFANG, TRACE_SELFDIST] {
        let path = data_file(name);
        let doc = json(&["proof", "check", path.to_str().unwrap()]);
        assert_eq!(doc["pass"], true, "{name}");
        assert_eq!(doc["dag_valid"], true);
    }
}

#[test]
fn proof_check_with_enumerated_models() {
    let path = data_file(TRACE_MOUFANG);
    let doc = json(&[
        "proof",
        "check",
        path.to_str().unwrap(),
        "--model-order",
        "5",
        "--replay-budget",
        "1000",
    ]);
    assert_eq!(doc["model_check"].as_array().unwrap().len(), 6);
    assert_eq!(doc["pass"], true);
    // no model of order 2 exists
    assert_eq!(
        code(&[
            "proof",
            "check",
            path.to_str().unwrap(),
            "--model-order",
            "2"
        ]),
        2
    );
}

fn temp(name: &str, body: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("agmloop-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn unsound_trace_fails_model_check() {
    let p = temp("unsound.txt", "1 x * y = y * x # label(goal).  [].\n2 x * e = x.  [].\n3 x * y = x.  [2].\n4 c1 * c2 != c2 * c1.  [1].\n5 $F.  [4,3].\n");
    let out = run(&["--format", "json", "proof", "check", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["model_check"][0]["failures"][0]["step"], 3);
    let _ = std::fs::remove_file(p);
}

#[test]
fn malformed_trace_reports_position() {
    let p = temp("bad.txt", "1 x = x.  [].\n2 m(x,,y) = x.  [1].\n");
    let out = run(&["proof", "check", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    let _ = std::fs::remove_file(p);
    assert_eq!(code(&["proof", "check", "/nonexistent/trace.txt"]), 2);
}

#[test]
fn output_file_matches_stdout() {
    let p = std::env::temp_dir().join(format!("agmloop-cli-{}-out.json", std::process::id()));
    let args = ["--format", "json", "counterexamples"];
    let direct = run(&args).stdout;
    let mut with_out = args.to_vec();
    let ps = p.to_str().unwrap().to_string();
    with_out.extend(["--output", &ps]);
    let out = run(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&p).unwrap(), direct);
    let _ = std::fs::remove_file(p);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["mean", "median", "1", "2"]), 2);
    assert_eq!(code(&["mean", "agm", "1"]), 2);
    assert_eq!(code(&["--format", "xml", "mean", "agm", "1", "2"]), 2);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["star", "1", "nan"]), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let path = data_file(TRACE_SELFDIST);
    for args in [
        vec!["--format", "json", "laws"],
        vec!["--format", "json", "models"],
        vec!["--format", "json", "proof", "check", path.to_str().unwrap()],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout, "{args:?}");
    }
}
