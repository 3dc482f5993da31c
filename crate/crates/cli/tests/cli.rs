//! End-to-end tests against the built binary, including the final
//! acceptance criterion: two-path entropy agreement on the shipped
//! fixtures and byte-idempotent Bayesian refitting.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_finstat-cli");

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn check_accepts_valid_pipelines() {
    for name in ["fp_chain.json", "single_bang.json", "suboptimal_chain.json"] {
        let out = run(&["check", &fixture(name)]);
        assert_eq!(exit_code(&out), 0, "{name}");
        let json = stdout_json(&out);
        assert_eq!(json["valid"], true);
    }
}

#[test]
fn check_rejects_mismatched_intermediate() {
    let text = std::fs::read_to_string(fixture("fp_chain.json")).unwrap();
    // perturb only the second stage's domain distribution (the last of
    // the two [0.6, 0.4] occurrences); the stage stays valid in isolation
    // but no longer matches stage 1's codomain
    let needle = "\"weights\": [0.6, 0.4]";
    let at = text.rfind(needle).unwrap();
    let mut corrupted = text.clone();
    corrupted.replace_range(at..at + needle.len(), "\"weights\": [0.5, 0.5]");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, corrupted).unwrap();

    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let json = stdout_json(&out);
    assert_eq!(json["valid"], false);
    let message = json["error"].as_str().unwrap();
    assert!(message.contains("stage"), "{message}");
}

#[test]
fn check_rejects_garbage_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let missing = run(&["check", "/nonexistent/pipeline.json"]);
    assert_eq!(exit_code(&missing), 2);
}

#[test]
fn entropy_values_match_oracles() {
    let out = run(&["entropy", &fixture("fp_chain.json")]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    assert!(json["total"].as_f64().unwrap() <= 1e-10);

    let out = run(&["entropy", &fixture("single_bang.json")]);
    let json = stdout_json(&out);
    let total = json["total"].as_f64().unwrap();
    assert!((total - 2.0_f64.ln()).abs() <= 1e-12, "total {total}");

    let out = run(&["entropy", &fixture("suboptimal_chain.json")]);
    let json = stdout_json(&out);
    let total = json["total"].as_f64().unwrap();
    // 0.15 ln(1/2) + 0.45 ln(3/2) + 0.6 ln(6/5) + 0.4 ln(4/5)
    let expected = 0.15 * 0.5_f64.ln()
        + 0.45 * 1.5_f64.ln()
        + 0.6 * 1.2_f64.ln()
        + 0.4 * 0.8_f64.ln();
    assert!((total - expected).abs() <= 1e-12, "total {total}");
    let stages = json["per_stage"].as_array().unwrap();
    assert_eq!(stages.len(), 2);
}

#[test]
fn entropy_functor_flag_selects_support_functor() {
    // equal supports along the suboptimal chain: G gives 0 per stage
    let out = run(&["entropy", &fixture("suboptimal_chain.json"), "--functor", "G"]);
    let json = stdout_json(&out);
    assert_eq!(json["total"].as_f64().unwrap(), 0.0);

    // the single-bang fixture has q = (1, 0) against a full-support
    // hypothesis: supports differ, so G jumps to infinity
    let out = run(&["entropy", &fixture("single_bang.json"), "--functor", "G"]);
    let json = stdout_json(&out);
    assert_eq!(json["total"], serde_json::json!("inf"));
}

#[test]
fn laws_re_passes_and_broken_fails() {
    let out = run(&["laws", "--functor", "RE", "--seed", "7", "--trials", "200"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["passed"], true);

    let out = run(&["laws", "--functor", "broken-fixture", "--trials", "100"]);
    assert_eq!(exit_code(&out), 1);
    let json = stdout_json(&out);
    assert_eq!(json["passed"], false);
    // a witness pair must be carried in the failing report
    let has_witness = json["reports"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| !r["violations"].as_array().unwrap().is_empty());
    assert!(has_witness);
}

#[test]
fn laws_support_functor_reports_distinguisher() {
    let out = run(&["laws", "--functor", "G", "--seed", "3", "--trials", "300"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["passed"], true);
    assert!(json["distinguisher"].is_array(), "witness pair expected");
}

#[test]
fn laws_rejects_unknown_functor() {
    let out = run(&["laws", "--functor", "entropy-squared"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn laws_is_deterministic_per_seed() {
    let args = ["laws", "--seed", "11", "--trials", "150"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

fn total_entropy(path: &Path) -> f64 {
    let out = run(&["entropy", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    stdout_json(&out)["total"].as_f64().expect("finite total")
}

#[test]
fn criterion_10_cli_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let mut max_path_deviation = 0.0f64;
    let mut max_refit_total = 0.0f64;
    let mut idempotent = true;

    for name in ["fp_chain.json", "single_bang.json", "suboptimal_chain.json"] {
        // two-path agreement at the file level
        let out = run(&["entropy", &fixture(name)]);
        assert_eq!(exit_code(&out), 0, "{name}");
        let json = stdout_json(&out);
        let deviation = json["path_deviation"].as_f64().unwrap();
        max_path_deviation = max_path_deviation.max(deviation);

        // refit, then measure the refit pipeline's entropy
        let fitted = dir.path().join(format!("fitted_{name}"));
        let out = run(&[
            "bayes",
            &fixture(name),
            "--output",
            fitted.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{name}");
        max_refit_total = max_refit_total.max(total_entropy(&fitted));

        // refitting the refit must reproduce the file byte for byte
        let refitted = dir.path().join(format!("refitted_{name}"));
        let out = run(&[
            "bayes",
            fitted.to_str().unwrap(),
            "--output",
            refitted.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{name}");
        idempotent &= std::fs::read(&fitted).unwrap() == std::fs::read(&refitted).unwrap();
    }

    let passed = max_path_deviation <= 1e-8 && max_refit_total <= 1e-9 && idempotent;
    println!(
        "criterion 10: {} — two-path deviation {max_path_deviation:.2e} (tol 1e-8) on 3 \
         fixtures; refit total {max_refit_total:.2e} (tol 1e-9); refit idempotent: {idempotent}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed);
}
