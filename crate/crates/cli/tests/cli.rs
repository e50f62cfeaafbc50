use std::process::{Command, Output};

use serde_json::Value;

fn irrvec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irrvec")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn all_zero(residuals: &Value) -> bool {
    residuals.as_array().unwrap().iter().all(|r| r["status"] == "zero")
}

#[test]
fn construct_rank_two_first_unknown() {
    let out = irrvec(&["construct", "--rank", "2", "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["series"]["g"][0]["text"], "-1/2*c0p*c1^2 + 1/2*c0*c1^2");
    assert_eq!(v["meta"]["K"], 4);
}

#[test]
fn construct_half_rank_two_first_unknown() {
    let out = irrvec(&["construct", "--rank", "3/2", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["series"]["g"][0]["text"], "-4/3*Q*c1^3 + 2/3*c0*c1^3");
}

#[test]
fn verify_half_rank_passes() {
    let out = irrvec(&["verify", "--rank", "5/2", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(all_zero(&v["residuals"]));
    assert_eq!(v["meta"]["rank"], "5/2");
}

#[test]
fn written_series_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.json");
    let path = path.to_str().unwrap();
    let out = irrvec(&["construct", "--rank", "2", "--order", "3", "--output", path]);
    assert_eq!(out.status.code(), Some(0));
    let out = irrvec(&["verify", "--rank", "2", "--order", "3", "--input", path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(all_zero(&json(&out)["residuals"]));
}

#[test]
fn tampered_series_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.json");
    let out = irrvec(&["construct", "--rank", "2", "--order", "3"]);
    let mut v = json(&out);
    let num = &mut v["series"]["g"][0]["terms"][0]["num"];
    *num = Value::String("-3".into());
    std::fs::write(&path, serde_json::to_vec(&v).unwrap()).unwrap();
    let out = irrvec(&["verify", "--rank", "2", "--order", "3", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn frames_determinant_matches_closed_form() {
    let out = irrvec(&["frames", "--rank", "7/2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["frames"]["det_matches"], true);
    assert_eq!(v["frames"]["det"]["text"], "-105/8*c3^(-3)*Lambda^4");
}

#[test]
fn output_is_deterministic() {
    let a = irrvec(&["construct", "--rank", "5/2", "--order", "3"]);
    let b = irrvec(&["construct", "--rank", "5/2", "--order", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = irrvec(&["gauge", "--rank", "2", "--order", "4", "--format", "text"]);
    let b = irrvec(&["gauge", "--rank", "2", "--order", "4", "--format", "text"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_invocations_are_usage_errors() {
    assert_eq!(irrvec(&["construct", "--rank", "4/3"]).status.code(), Some(2));
    assert_eq!(irrvec(&["construct"]).status.code(), Some(2));
    assert_eq!(irrvec(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn gram_reports_exponent_mismatch() {
    let out = irrvec(&["gram", "--rank", "1", "--from", "1", "--to", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["gram"]["determinant"]["proportional"], true);

    let out = irrvec(&["gram", "--rank", "1", "--from", "1", "--to", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let det = &json(&out)["gram"]["determinant"];
    assert_eq!(det["proportional"], false);
    assert_eq!(det["expected_exponent"], 5);
    assert_eq!(det["observed"]["exponent"], 4);
}

#[test]
fn gauge_rank_two_recovers_potential() {
    let out = irrvec(&["gauge", "--rank", "2", "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["gauge"]["potential"]["g0"]["text"], "0");
    assert_eq!(
        v["gauge"]["potential"]["log_exponents"][0]["text"],
        "-1/2*Q*c0p + Q*c0 - 1/4*c0p^2 - 1/2*c0p*c0"
    );
}

#[test]
fn text_format_renders_tree() {
    let out = irrvec(&["frames", "--rank", "3/2", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("frames:"));
    assert!(s.contains("det_matches: true"));
}
