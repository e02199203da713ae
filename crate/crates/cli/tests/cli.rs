use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use groupoidal::report::digest;
use groupoidal::{parse_model, run_suite, RunOptions, Suite};
use serde_json::{json, Value};

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn groupoidal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groupoidal")).args(args).output().unwrap()
}

fn run_json(file: &Path, extra: &[&str]) -> (i32, Value) {
    let mut args = vec!["run", file.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = groupoidal(&args);
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (out.status.code().unwrap(), report)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no {name}"))
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("groupoidal-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn validate_minimal_and_broken() {
    let ok = temp("minimal.json", r#"{groupoid:{}}"#.replace("{}", r#"{"kind":"transformation","size":1,"act":[0]}"#).replace("groupoid", "\"groupoid\"").as_str());
    let out = groupoidal(&["validate", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: transformation groupoid, 1 units"));

    let bad = temp("bad.json", r#"{"groupoid":{"kind":"transformation","size":2,"act":[0,0]}}"#);
    let out = groupoidal(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error at groupoid.act: not a permutation"));

    let out = groupoidal(&["run", bad.to_str().unwrap(), "--suite", "axioms"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn canonical_output_matches_file() {
    let file = model("shift3.json");
    let out = groupoidal(&["validate", "--canonical", file.to_str().unwrap()]);
    assert_eq!(out.stdout, std::fs::read(&file).unwrap());
}

#[test]
fn axioms_on_swap_pass() {
    let (code, report) = run_json(&model("shift2.json"), &["--suite", "axioms"]);
    assert_eq!(code, 0);
    assert_eq!(check(&report, "axioms.groupoid")["status"], "pass");
    assert_eq!(report["summary"], json!({"pass": 1, "fail": 0, "indeterminate": 0, "skipped": 0}));
}

#[test]
fn kms_on_swap_records_both_sides() {
    let (code, report) = run_json(&model("shift2.json"), &["--suite", "kms", "--seed", "3"]);
    assert_eq!(code, 0);
    let boundary = check(&report, "kms.boundary");
    assert_eq!(boundary["status"], "pass");
    let (lhs, rhs) = (boundary["values"]["lhs"].as_array().unwrap(), boundary["values"]["rhs"].as_array().unwrap());
    assert_eq!(lhs.len(), 50);
    assert_eq!(lhs, rhs);
    assert!(lhs.iter().any(|v| v != &json!([[0, 1], [0, 1]])));
    let modular = check(&report, "kms.modular");
    assert_eq!(modular["values"]["unimodular"], false);
    assert_eq!(modular["values"]["total_mass"], json!([3, 1]));
}

#[test]
fn index_on_three_point_shift() {
    let (code, report) = run_json(&model("shift3.json"), &["--suite", "index"]);
    assert_eq!(code, 0);
    let value = check(&report, "index.value");
    assert_eq!(value["status"], "pass");
    assert_eq!(value["values"]["value"], json!([-1, 1]));
    assert_eq!(value["values"]["stable"], true);
    assert_eq!(value["values"]["agrees"], true);
    assert_eq!(report["window"], 8);
}

#[test]
fn rotation_document_index() {
    let (code, report) = run_json(&model("rotation.json"), &["--suite", "index"]);
    assert_eq!(code, 0);
    let v = check(&report, "index.value")["values"]["value"].as_f64().unwrap();
    assert!((v + 1.0).abs() < 1e-9);
    assert_eq!(report["regime"], "float");
}

#[test]
fn reports_are_deterministic_and_sorted() {
    let file = model("deaconu4.json");
    let bytes = std::fs::read(&file).unwrap();
    let doc = parse_model(&bytes).unwrap();
    let opts = RunOptions { seed: 11, ..RunOptions::default() };
    let a = run_suite(&doc, &bytes, &[Suite::All], opts);
    let b = run_suite(&doc, &bytes, &[Suite::All], opts);
    assert_eq!(a.to_value(false), b.to_value(false));
    let names: Vec<_> = a.checks.iter().map(|c| c.name.clone()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(a.input_digest, digest(&bytes));

    let other = run_suite(&doc, &bytes, &[Suite::All], RunOptions { seed: 12, ..opts });
    assert_ne!(a.to_value(false), other.to_value(false));
}

#[test]
fn digest_and_version_in_report() {
    let file = model("integers.json");
    let (_, report) = run_json(&file, &["--suite", "cocycle"]);
    assert_eq!(report["input_digest"], digest(&std::fs::read(&file).unwrap()));
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["schema"], 1);
    for c in report["checks"].as_array().unwrap() {
        assert!(c["elapsed_ms"].as_f64().unwrap() >= 0.0);
        assert!(c.get("witness").is_some());
    }
}

#[test]
fn failing_axioms_exit_one() {
    // ℤ/2 with a non-associative, non-group product
    let doc = r#"{"groupoid":{"kind":"explicit","units":[0],"range":[0,0],"source":[0,0],"inverse":[0,1],"product":[[0,1],[1,1]]}}"#;
    let (code, report) = run_json(&temp("broken.json", doc), &["--suite", "axioms"]);
    assert_eq!(code, 1);
    let c = check(&report, "axioms.groupoid");
    assert_eq!(c["status"], "fail");
    assert!(c["witness"].as_str().unwrap().contains('#'));
}

#[test]
fn indeterminate_only_exits_three() {
    let doc = r#"{"groupoid":{"kind":"pair","size":2},"cocycle":{"kind":"potential","values":[0.0,1e-9]}}"#;
    let (code, report) = run_json(&temp("tiny.json", doc), &["--suite", "cocycle"]);
    assert_eq!(check(&report, "cocycle.exactness")["status"], "indeterminate");
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(code, 3);
}

#[test]
fn missing_prerequisites_are_skipped() {
    let doc = r#"{"groupoid":{"kind":"pair","size":2}}"#;
    let (code, report) = run_json(&temp("bare.json", doc), &["--suite", "kms"]);
    assert_eq!(code, 3);
    assert_eq!(report["skipped"], json!([{"name": "kms", "reason": "document has no measure"}]));
}

#[test]
fn document_suites_and_overrides() {
    let doc = r#"{"groupoid":{"kind":"transformation","size":3,"act":[1,2,0]},"suites":["cocycle"],"window":4}"#;
    let file = temp("suites.json", doc);
    let (code, report) = run_json(&file, &[]);
    assert_eq!(code, 0);
    assert_eq!(report["suite"], "cocycle");
    assert_eq!(report["window"], 4);
    let (_, report) = run_json(&file, &["--window", "6", "--tol", "1e-9"]);
    assert_eq!(report["window"], 6);
    assert_eq!(report["tolerance"], 1e-9);
}

#[test]
fn text_format_and_unknown_suite() {
    let file = model("pair_potential.json");
    let out = groupoidal(&["run", file.to_str().unwrap(), "--suite", "cocycle", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("pass") && l.contains("cocycle.coboundary")));
    assert!(text.trim_end().ends_with("4 passed, 0 failed, 0 indeterminate, 0 skipped"));

    let out = groupoidal(&["run", file.to_str().unwrap(), "--suite", "spectral"]);
    assert_eq!(out.status.code(), Some(2));
}
