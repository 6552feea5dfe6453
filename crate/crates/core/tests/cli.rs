use std::path::Path;
use std::process::Command;

fn tiltcheck(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tiltcheck")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bound_check_on_rademacher() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "pm1.json", r#"{"atoms": [[1.0, 1.0]]}"#);
    let (code, out, _) = tiltcheck(&["bound-check", "--dist", &path, "--h", "1", "--w", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["margin"].as_f64().unwrap() - 0.413607).abs() < 1e-6);
    assert_eq!(v["holds"], true);

    let (code, out, _) = tiltcheck(&["eval", "--dist", &path, "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("h,w,tilted_mean,second_moment\n"));
}

#[test]
fn bad_inputs_fail_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"atoms": [[1.0, 0.4]]}"#);
    let (code, out, err) = tiltcheck(&["bound-check", "--dist", &bad]);
    assert_eq!(code, 2);
    assert!(out.is_empty() && err.contains("probabilities"));

    let (code, _, err) = tiltcheck(&["eval", "--dist", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());

    let (code, _, _) = tiltcheck(&["bound-check", "--dist", &bad, "--h", "-1"]);
    assert_ne!(code, 0);
    let (code, _, err) = tiltcheck(&["prove", "--expr", "exp(w"]);
    assert_eq!(code, 2);
    assert!(err.contains("parse error"));
    let (code, _, _) = tiltcheck(&["verify-proof", "--depth", "0"]);
    assert_ne!(code, 0);
    let (code, _, _) = tiltcheck(&["verify-proof", "--box", "3:1"]);
    assert_ne!(code, 0);
}

#[test]
fn prove_emits_a_certificate() {
    let (code, out, _) = tiltcheck(&["prove", "--expr", "exp(w) - 1 - w"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["sign"], "positive");
    assert!(v["decision"]["Certified"].is_object());
    let (code, out, _) = tiltcheck(&["prove", "--expr", "w - 1", "--format", "text"]);
    assert_eq!(code, 1);
    assert!(out.contains("undetermined"));
}

#[test]
fn extremal_scan_csv() {
    let (code, out, _) = tiltcheck(&["extremal", "--sigma", "0.5,0.1,0.01", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "sigma,sup,ratio,bound_factor,gap");
    let ratio: f64 = lines.next().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((ratio - 1.034717).abs() < 1e-6);
    let (code, _, _) = tiltcheck(&["extremal", "--sigma", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_proof_is_deterministic_and_exits_zero() {
    let args = ["verify-proof", "--depth", "14", "--margin", "0.1"];
    let (code, a, _) = tiltcheck(&args);
    let (_, b, _) = tiltcheck(&args);
    assert_eq!(code, 0, "{a}");
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["battery"]["all_certified"], true);
    let checks = v["structure"]["checks"].as_array().unwrap();
    let boundary = checks.iter().find(|c| c["name"] == "boundary_box_undetermined").unwrap();
    assert_eq!(boundary["status"], "BoundaryExpected");
}

#[test]
fn exit_status_tracks_embedded_failures() {
    // At depth 1 nothing away from trivial boxes certifies, so the run must fail.
    let (code, out, _) = tiltcheck(&["verify-proof", "--depth", "1"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn report_aggregates_everything() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "d.json", r#"{"atoms": [[0.0, 0.5], [2.0, 0.5]]}"#);
    let (code, out, _) = tiltcheck(&["report", "--depth", "14", "--margin", "0.1", "--sigma", "0.5,0.1", "--dist", &path]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["verify", "extremal", "factor_comparison", "bound_check"] {
        assert!(!v[key].is_null(), "{key}");
    }
    assert_eq!(v["passed"], true);
}
