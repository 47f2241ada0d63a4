use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use cofix::solver::{SolveReport, TwoMapOutcome};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn cofix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cofix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(cmd: &str, file: &str, extra: &[&str]) -> Output {
    let path = problem(file);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    cofix(&args)
}

fn structured(cmd: &str, file: &str, extra: &[&str]) -> (i32, Value) {
    let mut args = vec!["--format", "structured"];
    args.extend_from_slice(extra);
    let out = run(cmd, file, &args);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    });
    let code = out.status.code().unwrap();
    assert_eq!(v["exit_code"], code);
    (code, v)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn halving_check_passes() {
    let out = run("check", "halving.json", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn identity_check_reports_the_violating_pair() {
    let (code, v) = structured("check", "identity.json", &[]);
    assert_eq!(code, 1);
    let cond = &v["report"]["condition"];
    assert_eq!(cond["satisfied"], false);
    assert_eq!(cond["worst_pair"], serde_json::json!([0, 1]));
    assert!(cond["worst_margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn identity_solve_converges_but_is_not_certified() {
    let (code, v) = structured("solve", "identity.json", &[]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["uniqueness"], "not_certified");
    assert_eq!(v["report"]["solve"]["status"]["status"], "converged");
}

#[test]
fn malformed_file_is_a_schema_error() {
    let out = run("check", "malformed.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("schema"), "{}", stderr(&out));

    let (code, v) = structured("solve", "malformed.json", &[]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["stage"], "schema");
}

#[test]
fn missing_file_is_an_input_error() {
    let out = cofix(&["check", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn halving_solve_reaches_zero() {
    let (code, v) = structured("solve", "halving.json", &[]);
    assert_eq!(code, 0);
    let solve = &v["report"]["solve"];
    assert_eq!(solve["limit"], 0);
    assert_eq!(solve["iterations"], 4);
    assert_eq!(solve["rate_k"], 0.5);
    assert!(solve["trace"]["iterates"].as_array().unwrap().is_empty());
    assert_eq!(v["report"]["uniqueness"], "certified");
}

#[test]
fn trace_flag_includes_every_iterate() {
    let (code, v) = structured("solve", "halving.json", &["--trace"]);
    assert_eq!(code, 0);
    let trace = &v["report"]["solve"]["trace"];
    assert_eq!(trace["iterates"], serde_json::json!([3, 2, 1, 0, 0]));
    assert_eq!(trace["steps"], serde_json::json!([8.0, 4.0, 2.0, 0.0]));
    let bounds = v["report"]["solve"]["apriori_bounds"].as_array().unwrap();
    assert_eq!(bounds.len(), 5);
}

#[test]
fn x0_accepts_labels_and_indices() {
    // label "2" is index 2; "#1" forces index 1; "4" is the label of index 3
    for (x0, steps) in [("2", 3), ("#1", 2), ("4", 4), ("0", 1)] {
        let (code, v) = structured("solve", "halving.json", &["--x0", x0]);
        assert_eq!(code, 0, "{x0}");
        assert_eq!(v["report"]["solve"]["iterations"], steps, "{x0}");
    }
    let out = run("solve", "halving.json", &["--x0", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn max_iters_cap_fails_the_solve() {
    let (code, v) = structured("solve", "halving.json", &["--max-iters", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["solve"]["status"]["status"], "max_iterations");
}

#[test]
fn structured_reports_round_trip() {
    let (_, v) = structured("solve", "halving.json", &["--trace"]);
    let report = v["report"].clone();
    let outcome: TwoMapOutcome = serde_json::from_value(report.clone()).unwrap();
    assert_eq!(outcome.solve.trace.len(), 5);
    let again = serde_json::to_value(&outcome).unwrap();
    for key in ["hypotheses", "uniqueness", "solve"] {
        assert_eq!(again[key], report[key], "{key}");
    }
    let solve: SolveReport = serde_json::from_value(report["solve"].clone()).unwrap();
    assert!(solve.converged());
}

#[test]
fn euclidean_line_converges_to_zero() {
    let (code, v) = structured("solve", "euclidean_line.json", &[]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["report"]["coefficients"]["origin"], "synthesized");
    let z = v["report"]["solve"]["limit"][0].as_f64().unwrap();
    assert!(z.abs() < 1e-10, "{z}");
    assert!(v["report"]["solve"]["iterations"].as_u64().unwrap() <= 200);
    assert_eq!(v["seed"], 1);
}

#[test]
fn seed_and_samples_override_the_sampler() {
    let (code, v) = structured("check", "euclidean_line.json", &["--seed", "99", "--samples", "500"]);
    assert_eq!(code, 0);
    assert_eq!(v["seed"], 99);
    assert_eq!(v["report"]["condition"]["pairs_checked"], 500);
}

#[test]
fn three_collapse_lifts_to_zero() {
    let (code, v) = structured("solve3", "three_collapse.json", &[]);
    assert_eq!(code, 0, "{v}");
    let r = &v["report"]["result"];
    assert_eq!(r["outcome"], "common_fixed_point");
    assert_eq!(r["common_fixed_point"], 0);
}

#[test]
fn three_escape_fails_at_the_induction_stage() {
    let out = run("solve3", "three_escape.json", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("[induce_three]"), "{}", stderr(&out));

    let (code, v) = structured("solve3", "three_escape.json", &[]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["stage"], "induce_three");
}

#[test]
fn four_shared_and_euclidean_three_lift() {
    let (code, v) = structured("solve4", "four_shared.json", &[]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["report"]["result"]["common_fixed_point"], 0);

    let (code, v) = structured("solve3", "euclidean_three.json", &[]);
    assert_eq!(code, 0, "{v}");
    let p = v["report"]["result"]["common_fixed_point"].as_array().unwrap();
    assert!((p[0].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(p[1].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn coincidence_only_stops_before_lifting() {
    let (code, v) = structured("solve3", "three_collapse.json", &["--coincidence-only"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["result"]["point_of_coincidence"], 0);
    assert!(v["report"]["result"]["common_fixed_point"].is_null());
}

#[test]
fn arity_mismatch_is_an_input_error() {
    assert_eq!(run("solve", "three_collapse.json", &[]).status.code(), Some(2));
    assert_eq!(run("solve3", "halving.json", &[]).status.code(), Some(2));
    assert_eq!(run("reduce", "halving.json", &[]).status.code(), Some(2));
}

#[test]
fn reduce_prints_a_commuting_witness() {
    let (code, v) = structured("reduce", "three_collapse.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["commutes"], true);
    assert_eq!(v["report"]["witness"]["restriction"]["kind"], "finite");
}

#[test]
fn oracle_enumerates_finite_and_refuses_euclidean() {
    let (code, v) = structured("oracle", "halving.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["common_fixed_points"], serde_json::json!([0]));

    let out = run("oracle", "euclidean_line.json", &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn declared_incomplete_subspace_refuses_to_solve() {
    let text = std::fs::read_to_string(problem("three_collapse.json")).unwrap();
    let mut file: Value = serde_json::from_str(&text).unwrap();
    file["assumptions"] = serde_json::json!({ "complete_subspace": false });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("incomplete.json");
    std::fs::write(&path, file.to_string()).unwrap();

    let out = cofix(&["solve3", path.to_str().unwrap(), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["stage"], "assumptions");
}

#[test]
fn fuzz_agrees_with_the_oracle() {
    let out = cofix(&["fuzz", "--seed", "7", "--instances", "100", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &v["report"];
    assert_eq!(r["generated"], 100);
    assert_eq!(r["disagreements"].as_array().unwrap().len(), 0);
    assert_eq!(r["agreements"], r["solver_runs"]);
}

#[test]
fn fuzz_with_identity_maps_verifies_nothing() {
    let out = cofix(&["fuzz", "--instances", "5", "--n-max", "6", "--mode", "identity", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["verified"], 0);
    assert_eq!(v["report"]["unverified"], 5);
}
