use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qrf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json", "--trials", "20"]);
    let out = qrf(&all);
    let v = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().unwrap(), v)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == name)
        .unwrap_or_else(|| panic!("no {name} record"))
}

#[test]
fn list_prints_every_builtin() {
    let out = qrf(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "z2-sharp",
        "z2-noisy",
        "z4-parity",
        "z6-regular",
        "d4-regular",
        "c3-on-triangle",
        "z2-unsharp-localizable",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(name)),
            "{name} missing from\n{text}"
        );
    }
}

#[test]
fn sharp_scenario_passes() {
    let (code, r) = json_report(&["run", "--scenario", "z2-sharp", "--seed", "42"]);
    assert_eq!(code, 0);
    assert_eq!(r["pass"], true);
    assert_eq!(r["seed"], 42);
    assert_eq!(r["classification"]["sharp"], true);
    assert_eq!(r["classification"]["localizable"], true);
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] != false));
    let reported: Vec<&str> = checks
        .iter()
        .filter(|c| c["pass"].is_null())
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert_eq!(reported, ["yen.injective"]);
}

#[test]
fn noisy_scenario_reports_multiplicativity_as_data() {
    let (code, r) = json_report(&["run", "--scenario", "z2-noisy", "--seed", "42"]);
    assert_eq!(code, 0);
    let m = check(&r, "integrate.multiplicative");
    assert_eq!(m["pass"], Value::Null);
    assert_eq!(m["note"], "not asserted (non-sharp)");
    assert!(m["delta"].as_f64().unwrap() > 0.0);
    assert_eq!(check(&r, "yen.injective")["note"], "skipped (not localizable)");
}

#[test]
fn broken_covariance_fixture_exits_one() {
    let path = format!("file:{}", fixture("broken-covariance.json").display());
    let (code, r) = json_report(&["run", "--scenario", &path]);
    assert_eq!(code, 1);
    assert_eq!(r["pass"], false);
    let c = check(&r, "frame.covariance");
    assert_eq!(c["pass"], false);
    assert_eq!(c["delta"].as_f64().unwrap(), 1.0);
}

#[test]
fn text_output_names_failures() {
    let path = format!("file:{}", fixture("broken-covariance.json").display());
    let out = qrf(&["run", "--scenario", &path, "--trials", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines()
            .any(|l| l.contains("FAIL") && l.contains("frame.covariance")),
        "{text}"
    );
    assert!(text.contains("overall: FAIL"));
}

#[test]
fn malformed_json_is_a_load_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"group\": {\"order\": 2,\n").unwrap();
    let out = qrf(&["run", "--scenario", &format!("file:{}", path.display())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "{err}");
}

#[test]
fn load_time_invariant_violation_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nonunital.json");
    let text = std::fs::read_to_string(fixture("broken-covariance.json"))
        .unwrap()
        .replace(
            r#"{"dim": 2, "re": [[0, 0], [0, 1]]}"#,
            r#"{"dim": 2, "re": [[0, 0], [0, 0.5]]}"#,
        );
    std::fs::write(&path, text).unwrap();
    let out = qrf(&["run", "--scenario", &format!("file:{}", path.display())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sum to the identity"), "{err}");
}

#[test]
fn unknown_scenario_and_bad_flags_exit_two() {
    assert_eq!(qrf(&["run", "--scenario", "nope"]).status.code(), Some(2));
    assert_eq!(
        qrf(&["run", "--scenario", "z2-sharp", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qrf(&["run", "--scenario", "z2-sharp", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = qrf(&[
        "run",
        "--scenario",
        "z4-parity",
        "--trials",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("scenario,check,"), "{header}");
    assert!(text.lines().any(|l| l.contains("yen.cp_n3")));
}

#[test]
fn repeated_runs_are_identical_apart_from_timing() {
    let strip = |mut v: Value| {
        v["wall_time"] = Value::Null;
        v
    };
    let (_, a) = json_report(&["run", "--scenario", "d4-regular", "--seed", "7"]);
    let (_, b) = json_report(&["run", "--scenario", "d4-regular", "--seed", "7"]);
    assert_eq!(strip(a.clone()), strip(b));
    let (_, c) = json_report(&["run", "--scenario", "d4-regular", "--seed", "8"]);
    assert_ne!(strip(a), strip(c));
}
