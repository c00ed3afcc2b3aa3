use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hypcert_cli::format::{parse_symbol_str, to_canonical_json};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn hypcert(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hypcert"));
    c.args(args).env_remove("HYPCERT_THREADS");
    if let Some(t) = threads {
        c.env("HYPCERT_THREADS", t);
    }
    c.output().expect("binary runs")
}

fn certify(name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec!["certify", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    hypcert(&args, None)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn fixtures_match_golden_reports_and_exit_codes() {
    let cases = [
        ("b1", 0, "CERTIFIED"),
        ("b2", 0, "CERTIFIED"),
        ("classical", 0, "CERTIFIED"),
        ("b2_r2", 1, "FAILED"),
        ("nonsingular", 1, "FAILED"),
        ("b2_marginal", 2, "MARGINAL"),
    ];
    for (name, code, status) in cases {
        let out = certify(&format!("{name}.json"), &[]);
        assert_eq!(out.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["status"], status, "{name}");
        let golden = std::fs::read(fixture(&format!("{name}.report.json"))).unwrap();
        assert!(out.stdout == golden, "{name}: report differs from golden");
    }
}

#[test]
fn b2_certificate_numbers() {
    let r = json(&certify("b2.json", &[]));
    let s = &r["certificate"]["summary"];
    for k in ["c_est", "kappa_est", "kappa_target", "nonneg_min", "negative_t_min"] {
        assert!(s[k].is_number(), "{k} missing");
    }
    let w = r["classification"]["witness"]["re"].as_f64().unwrap();
    assert!((w - 0.5f64.sqrt()).abs() < 1e-8);
    assert_eq!(r["time_function"]["phi"], "x1");
    assert!(s["kappa_est"].as_f64().unwrap() <= 0.505);
    assert!(s["c_est"].as_f64().unwrap() >= 0.9);
    assert_eq!(r["certificate"]["one_sided"]["negative_for_negative_t"], true);
    assert_eq!(r["certificate"]["label"], "empirical");
    assert_eq!(r["tool"]["name"], "hypcert");
    assert_eq!(r["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn classical_example_is_two_sided() {
    let r = json(&certify("classical.json", &[]));
    assert_eq!(r["certificate"]["one_sided"]["negative_for_negative_t"], false);
    assert_eq!(r["time_function"]["condition"]["value"], "-1");
}

#[test]
fn bbis_variant_fails_at_classification() {
    let r = json(&certify("b2_r2.json", &[]));
    assert_eq!(r["stage"], "classification");
    assert_eq!(r["classification"]["effective"], false);
    for e in r["classification"]["eigenvalues"].as_array().unwrap() {
        assert!(e["re"].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn nonsingular_reports_offending_derivative() {
    let r = json(&certify("nonsingular.json", &[]));
    assert_eq!(r["stage"], "singularity");
    assert_eq!(r["singularity"]["nonzero_derivatives"]["dp/dt"], "1");
    assert!(r["reason"].as_str().unwrap().contains("dp/dt"));
}

#[test]
fn marginal_text_names_the_eigenvalue() {
    let out = certify("b2_marginal.json", &["--format", "text"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("marginal"));
    assert!(text.contains("0.000000005"));
}

#[test]
fn text_report_carries_grid_and_version() {
    let out = certify("b2.json", &["--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
    assert!(text.contains("1185921 points"));
    assert!(text.contains("kappa_est = 0.5"));
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let path = fixture("b2.json");
    let p = path.to_str().unwrap();
    let one = hypcert(&["certify", p], Some("1"));
    let again = hypcert(&["certify", p], Some("1"));
    let eight = hypcert(&["certify", p], Some("8"));
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn usage_errors_exit_3() {
    let b2 = fixture("b2.json");
    let b2 = b2.to_str().unwrap();
    assert_eq!(hypcert(&["certify", "/nonexistent.json"], None).status.code(), Some(3));
    assert_eq!(hypcert(&["certify"], None).status.code(), Some(3));
    assert_eq!(hypcert(&["frobnicate", b2], None).status.code(), Some(3));
    assert_eq!(hypcert(&["certify", b2, "--format", "xml"], None).status.code(), Some(3));
    assert_eq!(hypcert(&["certify", b2, "--grid", "2"], None).status.code(), Some(3));
    assert_eq!(hypcert(&["certify", b2, "--slack", "abc"], None).status.code(), Some(3));
    assert_eq!(hypcert(&["certify", b2, "--region", "0.1,0.1"], None).status.code(), Some(3));
    assert_eq!(hypcert(&["certify", b2], Some("zero")).status.code(), Some(3));
    assert_eq!(hypcert(&["--help"], None).status.code(), Some(0));
}

#[test]
fn malformed_files_exit_3_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema_version\": 1,\n  \"dim\": oops\n}").unwrap();
    let out = hypcert(&["certify", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let empty = dir.path().join("empty.json");
    std::fs::write(
        &empty,
        r#"{"schema_version": 1, "dim": 1, "base_point": {"t": "0", "x": ["0"], "tau": "0", "xi": ["1"]}, "symbol": []}"#,
    )
    .unwrap();
    let out = hypcert(&["certify", empty.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("schema error"));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("r.json");
    let out = certify("b1.json", &["--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let golden = std::fs::read(fixture("b1.report.json")).unwrap();
    assert_eq!(std::fs::read(&target).unwrap(), golden);
}

#[test]
fn missing_normal_form_is_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("classical.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("normal_form");
    let path = dir.path().join("plain.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = hypcert(&["certify", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "NOT_APPLICABLE");
    // classification alone still succeeds
    let out = hypcert(&["classify", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["classification"]["effective"], true);
}

#[test]
fn mismatched_normal_form_fails() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("b2.json")).unwrap();
    let text = text.replacen("\"coeff\": \"1/2\", \"exp\": {\"xi1\": 2}", "\"coeff\": \"1/3\", \"exp\": {\"xi1\": 2}", 1);
    let path = dir.path().join("mismatch.json");
    std::fs::write(&path, text).unwrap();
    let out = hypcert(&["certify", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["stage"], "normal_form");
}

#[test]
fn flags_override_the_file() {
    let r = json(&certify("b2.json", &["--grid", "9", "--slack", "1/10", "--region", "0.05,0.05,0.05"]));
    assert_eq!(r["status"], "CERTIFIED");
    assert_eq!(r["region"]["points"], 9);
    assert_eq!(r["region"]["t_max"], 0.05);
    assert_eq!(r["time_function"]["kappa_target"], "11/20");
    assert_eq!(r["certificate"]["c_est"]["grid"]["points"], 9 * 9 * 9 * 9);
}

#[test]
fn classify_verb() {
    let out = hypcert(&["classify", fixture("b2.json").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["certificate"].is_null());
    assert_eq!(r["classification"]["spectrum_class"], "real-pair-present");
    let out = hypcert(&["classify", fixture("b2_r2.json").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn minimize_verb() {
    let b2 = fixture("b2.json");
    let out = hypcert(&["minimize", b2.to_str().unwrap(), "--theta", "0.01,-0.02,0,0.01,0.005"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["m"], 2.0);
    assert_eq!(r["theta_layout"][4], "eps");
    let out = hypcert(&["minimize", b2.to_str().unwrap(), "--theta", "0.1"], None);
    assert_eq!(out.status.code(), Some(3));
    let plain = hypcert(&["minimize", fixture("nonsingular.json").to_str().unwrap()], None);
    assert_eq!(plain.status.code(), Some(3));
}

#[test]
fn check_frame_verb() {
    let good = fixture("identity_frame.json");
    let out = hypcert(&["check-frame", good.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);

    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(&good).unwrap().replace("\"x2\": 1", "\"x1\": 1");
    let bad = dir.path().join("bad_frame.json");
    std::fs::write(&bad, text).unwrap();
    let out = hypcert(&["check-frame", bad.to_str().unwrap(), "--format", "text"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn canonical_files_round_trip() {
    for name in ["b1", "b2", "b2_r2", "b2_marginal", "nonsingular", "classical"] {
        let text = std::fs::read_to_string(fixture(&format!("{name}.json"))).unwrap();
        let canonical = to_canonical_json(&parse_symbol_str(&text).unwrap());
        let again = to_canonical_json(&parse_symbol_str(&canonical).unwrap());
        assert_eq!(canonical, again, "{name}");
    }
}

#[test]
fn fixture_terms() {
    let text = std::fs::read_to_string(fixture("b2.json")).unwrap();
    let f = parse_symbol_str(&text).unwrap();
    assert_eq!(f.symbol.len(), 5);
    assert_eq!(f.dim, 2);
}
