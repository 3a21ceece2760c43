//! End-to-end tests of the `semigen` binary: exit codes, record shapes,
//! numerical agreement with closed forms, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn semigen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semigen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout_str(out)
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("each stdout line is JSON"))
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exits")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("numeric field")
}

// ---------------------------------------------------------------------------
// classify

#[test]
fn classify_resolves_the_index_diagonal_with_a_consistent_hierarchy() {
    let out = semigen(&["classify", "--symbol", "j", "--jmax", "20000"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    assert!(!rows.is_empty());

    let has = |condition: &str, status: &str| {
        rows.iter()
            .any(|r| r["condition"] == condition && r["status"] == status)
    };
    assert!(has("A-BDD", "refuted"), "no global constant exists");
    assert!(has("M-TOP", "certified"));
    assert!(has("TOP", "certified"));
    assert!(has("NEW1", "certified"));
    assert!(has("NEW2", "certified"));

    // The per-column certificates keep q = p with geometric rate p.
    for r in rows.iter().filter(|r| {
        r["condition"] == "M-TOP" && r["status"] == "certified" && r["p"] == "k=2"
    }) {
        assert_eq!(r["q"], "k=2");
        let summary = r["mu_summary"].as_str().unwrap();
        assert!(summary.contains("2^n"), "rate should be p: {summary}");
    }
    assert!(
        stderr_str(&out).contains("hierarchy consistent"),
        "stderr: {}",
        stderr_str(&out)
    );
}

#[test]
fn identical_invocations_produce_identical_bytes() {
    let args = ["classify", "--symbol", "j", "--jmax", "20000"];
    let first = semigen(&args);
    let second = semigen(&args);
    assert_eq!(code(&first), code(&second));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn malformed_symbols_are_configuration_errors() {
    let out = semigen(&["classify", "--symbol", "j^"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("parse error"));
}

#[test]
fn conflicting_operator_flags_are_rejected_by_the_parser() {
    let out = semigen(&["classify", "--symbol", "j", "--taylor-shift"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn space_and_operator_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("space.toml");
    let operator = dir.path().join("op.toml");
    std::fs::write(&space, "kind = \"rapid-decay\"\norder = \"inf\"\n").unwrap();
    std::fs::write(&operator, "kind = \"diagonal\"\nsymbol = \"log(j)\"\n").unwrap();
    let out = semigen(&[
        "classify",
        "--space",
        space.to_str().unwrap(),
        "--operator",
        operator.to_str().unwrap(),
        "--jmax",
        "5000",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    assert!(rows.iter().all(|r| r["op_id"]
        .as_str()
        .unwrap()
        .contains("log j")));
    // On the rapid-decay grading the log diagonal has no geometric rates,
    // but the optimal-constant and series conditions hold.
    assert!(rows
        .iter()
        .any(|r| r["condition"] == "M-TOP" && r["status"] == "refuted"));
    assert!(rows
        .iter()
        .any(|r| r["condition"] == "TOP" && r["status"] == "certified"));
    assert!(rows
        .iter()
        .any(|r| r["condition"] == "NEW1" && r["status"] == "certified"));
}

#[test]
fn unknown_weight_families_are_configuration_errors() {
    let out = semigen(&["classify", "--family", "mystery", "--symbol", "j"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_str(&out).contains("unknown weight family"));
}

// ---------------------------------------------------------------------------
// evaluate

#[test]
fn evaluate_reaches_the_exponential_of_the_symbol() {
    let out = semigen(&[
        "evaluate",
        "--family",
        "rapid-decay",
        "--symbol",
        "log(j)",
        "--unit",
        "4",
        "--t",
        "0,1",
        "--horizon",
        "2",
        "--p",
        "1",
        "--window",
        "5",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 2);

    // t = 0 echoes the input exactly.
    assert_eq!(f(&rows[0]["t"]), 0.0);
    assert_eq!(rows[0]["n_used"], 0);
    assert_eq!(f(&rows[0]["tail"]), 0.0);
    assert_eq!(rows[0]["coords"], serde_json::json!([0.0, 0.0, 0.0, 1.0, 0.0]));

    // t = 1 multiplies coordinate 4 by e^{ln 4} = 4.
    let tail = f(&rows[1]["tail"]);
    assert!(tail > 0.0 && tail < 1e-10);
    let c4 = f(&rows[1]["coords"][3]);
    assert!((c4 - 4.0).abs() <= tail + 1e-12, "got {c4}");
    for idx in [0, 1, 2, 4] {
        assert_eq!(f(&rows[1]["coords"][idx]), 0.0);
    }
}

#[test]
fn evaluate_refuses_times_beyond_the_certified_horizon() {
    let out = semigen(&[
        "evaluate", "--symbol", "j", "--unit", "1", "--t", "1.5", "--horizon", "1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr_str(&out).contains("--piecewise"));
}

#[test]
fn piecewise_composition_crosses_the_horizon() {
    let out = semigen(&[
        "evaluate", "--symbol", "j", "--unit", "1", "--t", "2.5", "--horizon", "1",
        "--piecewise", "0.9", "--p", "1", "--window", "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 1);
    let c1 = f(&rows[0]["coords"][0]);
    let e25 = 12.182493960703473_f64; // e^2.5
    assert!((c1 - e25).abs() <= f(&rows[0]["tail"]) + 1e-9, "got {c1}");
}

#[test]
fn taylor_shift_translates_polynomial_coefficients_exactly() {
    let out = semigen(&[
        "evaluate",
        "--family",
        "rapid-decay",
        "--taylor-shift",
        "--x",
        "1,2,1",
        "--t",
        "1,-1",
        "--p",
        "1",
        "--window",
        "4",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    // (1 + z)² translated by 1 is (2 + z)²; translated by −1 it is z².
    assert_eq!(rows[0]["coords"], serde_json::json!([4.0, 4.0, 1.0, 0.0]));
    assert_eq!(f(&rows[0]["tail"]), 0.0);
    assert_eq!(rows[1]["coords"], serde_json::json!([0.0, 0.0, 1.0, 0.0]));
    assert_eq!(f(&rows[1]["tail"]), 0.0);
}

#[test]
fn unbounded_symbols_without_series_certificates_are_unresolved() {
    // exp(j) outruns every geometric rate, so no horizon can be certified.
    let out = semigen(&[
        "evaluate", "--symbol", "exp(j)", "--unit", "1", "--t", "0.5", "--jmax", "200",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr_str(&out).contains("no series certificate"));
}

// ---------------------------------------------------------------------------
// verify

#[test]
fn verify_passes_on_the_index_diagonal() {
    let out = semigen(&[
        "verify", "--symbol", "j", "--unit", "2", "--horizon", "1.2", "--p", "1,2",
        "--hsteps", "4",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    assert!(rows.iter().any(|r| r["check"] == "law"));
    assert!(rows.iter().any(|r| r["check"] == "generator"));
    assert!(rows.iter().any(|r| r["check"] == "modulus"));
    assert!(rows.iter().all(|r| r["within"] == true));
    // Difference quotients tighten as h halves.
    let gen_residuals: Vec<f64> = rows
        .iter()
        .filter(|r| r["check"] == "generator" && r["p"] == 2)
        .map(|r| f(&r["residual"]))
        .collect();
    assert!(gen_residuals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn corrupted_residuals_fail_verification() {
    let out = semigen(&[
        "verify",
        "--symbol",
        "j",
        "--unit",
        "2",
        "--horizon",
        "1.2",
        "--p",
        "2",
        "--hsteps",
        "2",
        "--self-test-corrupt-tail",
    ]);
    assert_eq!(code(&out), 1);
    let rows = json_lines(&out);
    let corrupted: Vec<&Value> = rows
        .iter()
        .filter(|r| r["self_test_corrupted"] == true)
        .collect();
    assert!(!corrupted.is_empty());
    assert!(corrupted.iter().all(|r| r["within"] == false));
}

// ---------------------------------------------------------------------------
// witness

#[test]
fn ramp_construction_selects_the_first_vanishing_rows() {
    let out = semigen(&["witness", "cor44", "--family", "omega", "--count", "5"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 1);
    // Column n of the omega grading first vanishes at row n + 1.
    assert_eq!(rows[0]["selected_rows"], serde_json::json!([2, 3, 4, 5, 6]));
    let expected = rows[0]["expected"].as_array().unwrap();
    assert!(expected.contains(&serde_json::json!(["A-BDD", "refuted"])));
    assert!(expected.contains(&serde_json::json!(["M-TOP", "certified"])));
}

#[test]
fn ramp_construction_is_inapplicable_on_positive_weight_columns() {
    let out = semigen(&["witness", "cor44", "--family", "rapid-decay", "--jmax", "500"]);
    assert_eq!(code(&out), 1);
    assert!(stderr_str(&out).contains("inapplicable"));
}

#[test]
fn divergence_witness_dominates_its_geometric_lower_bound() {
    let out = semigen(&["witness", "hd-divergence", "--k", "10"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    let exact = f(&rows[0]["exact_value"]);
    assert!((exact - 627.2419099807739).abs() < 1e-9);
    assert_eq!(f(&rows[0]["lower_bound"]), 57.6650390625); // 1.5^10
    assert_eq!(rows[0]["dominates"], true);
}

#[test]
fn frequency_witness_beats_the_claimed_domination() {
    let out = semigen(&[
        "witness", "cinfty", "--p", "1", "--q", "3", "--mu", "2,4,8",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let rows = json_lines(&out);
    assert_eq!(rows[0]["n"], 3);
    assert_eq!(rows[0]["witness"]["k"], 9); // ⌊μ₃⌋ + 1 with μ₃ = 8
    assert!(f(&rows[0]["log_excess"]) > 0.0);
}

#[test]
fn frequency_witness_rejects_wrong_constant_counts() {
    let out = semigen(&["witness", "cinfty", "--p", "1", "--q", "3", "--mu", "2,4"]);
    assert_eq!(code(&out), 2);
}

// ---------------------------------------------------------------------------
// report-merge

fn classify_to(path: &Path) {
    let out = semigen(&[
        "classify",
        "--symbol",
        "j",
        "--jmax",
        "20000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
}

#[test]
fn merging_identical_runs_deduplicates_without_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    classify_to(&a);
    classify_to(&b);
    let merged = dir.path().join("merged.jsonl");
    let out = semigen(&[
        "report-merge",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--out",
        merged.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_str(&out));
    let single = std::fs::read_to_string(&a).unwrap().lines().count();
    let merged_lines = std::fs::read_to_string(&merged).unwrap().lines().count();
    assert_eq!(single, merged_lines);
}

#[test]
fn contradictory_runs_are_flagged_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    classify_to(&a);
    let flipped = std::fs::read_to_string(&a)
        .unwrap()
        .replace("\"status\":\"certified\"", "\"status\":\"refuted\"");
    let b = dir.path().join("b.jsonl");
    std::fs::write(&b, flipped).unwrap();
    let out = semigen(&["report-merge", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr_str(&out).contains("conflict"));
}

#[test]
fn malformed_record_files_are_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"op_id\": \"x\"\nnot json\n").unwrap();
    let out = semigen(&["report-merge", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

// ---------------------------------------------------------------------------
// csv output

#[test]
fn csv_tables_have_one_row_per_record() {
    let out = semigen(&["classify", "--symbol", "j", "--jmax", "20000", "--csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout_str(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("op_id,condition,status"));
    let json_out = semigen(&["classify", "--symbol", "j", "--jmax", "20000"]);
    assert_eq!(lines.count(), json_lines(&json_out).len());
}
