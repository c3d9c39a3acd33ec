use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstar-pmu")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hopf_on_pair3_passes_with_nine_dimensional_legs() {
    let o = bin(&["hopf", "--instance", "pair3"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("dim A-hat 9  dim A 9"), "{text}");
    assert!(text.contains("hopf true"));
}

#[test]
fn broken_composition_names_the_axiom() {
    let o = bin(&["check-groupoid", &data("broken.spec")]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL  groupoid axioms"));
    assert!(text.contains("range mismatch"), "{text}");
}

#[test]
fn json_report_has_pentagon_residual() {
    let o = bin(&["report", "--instance", "z2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "report");
    let checks = v["checks"].as_array().unwrap();
    let pent = checks.iter().find(|c| c["name"] == "pentagon").unwrap();
    assert_eq!(pent["status"], "pass");
    assert!(pent["residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["derived"]["dim_hat"], 2);
}

#[test]
fn text_and_json_agree_and_repeat_byte_for_byte() {
    let file = data("pair2-skew.spec");
    let a = bin(&["legs", &file]);
    let b = bin(&["legs", &file]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
    let j = bin(&["legs", &file, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    let text = stdout(&a);
    for c in v["checks"].as_array().unwrap() {
        let status = match c["status"].as_str().unwrap() {
            "pass" => "PASS",
            "fail" => "FAIL",
            _ => "SKIP",
        };
        assert!(text.contains(&format!("{status}  {}", c["name"].as_str().unwrap())));
    }
}

#[test]
fn file_and_builtin_agree() {
    let from_file = bin(&["build-pmu", &data("pair2-skew.spec"), "--format", "json"]);
    let builtin = bin(&["build-pmu", "--instance", "pair2-skew", "--format", "json"]);
    let mut a: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    let mut b: serde_json::Value = serde_json::from_slice(&builtin.stdout).unwrap();
    a["instance"] = "x".into();
    b["instance"] = "x".into();
    assert_eq!(a["derived"], b["derived"]);
    assert_eq!(a["passed"], true);
}

#[test]
fn parse_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.spec");
    std::fs::write(&path, "[arrows]\na b\n[units]\na\n[range]\na a\nb c\n").unwrap();
    let o = bin(&["check-groupoid", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 7, column 3"), "{err}");
    assert_eq!(bin(&["check-groupoid", "/nonexistent.spec"]).status.code(), Some(2));
    assert_eq!(bin(&["legs", "--instance", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["legs"]).status.code(), Some(2));
}

#[test]
fn tolerance_flag_is_respected() {
    let o = bin(&["build-pmu", "--instance", "z3", "--tol", "1e-30", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["tolerance"].as_f64().unwrap() / 1e-30 - 1.0).abs() < 1e-12);
}

#[test]
fn instances_lists_the_corpus() {
    let o = bin(&["instances"]);
    assert_eq!(stdout(&o).lines().count(), 16);
}
