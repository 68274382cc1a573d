//! CLI behavior: exit codes, validation, artifact shape, reference values.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zakframe"))
}

#[test]
fn usage_error_exits_2() {
    let out = bin().args(["frame-bounds", "--gamma", "1", "--a", "0/1", "--b", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("positive"), "stderr: {msg}");

    let out = bin().args(["frame-bounds", "--gamma", "1", "--a", "1/2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "missing --b must be a usage error");

    let out = bin().args(["zak", "--window", "sech", "--gamma", "1", "--unknown-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "unknown flags are rejected");
}

#[test]
fn computation_error_exits_1() {
    let out = bin()
        .args(["dual", "--window", "sech", "--gamma", "1", "--t", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("half-integer"));
}

#[test]
fn json_errors_flag_is_machine_readable() {
    let out = bin()
        .args(["--json-errors", "dual", "--window", "sech", "--gamma", "1", "--t", "1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "too_close_to_half_integer");
}

#[test]
fn dual_point_value_is_printed() {
    let out = bin()
        .args(["dual", "--window", "sech", "--gamma", "1", "--t", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.trim().parse().unwrap();
    assert!((value - 0.809916727230369).abs() < 1e-9, "printed {value}");
}

#[test]
fn verify_identity_reports_pass() {
    let out = bin().args(["verify-identity", "--gamma", "1", "--grid", "32"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"), "stdout: {text}");
    assert!(text.contains("max_rel_residual"));
}

#[test]
fn frame_bounds_critical_density_note() {
    let out = bin()
        .args(["frame-bounds", "--window", "sech", "--gamma", "1", "--a", "1", "--b", "1", "--grid-t", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("not a frame at critical density"), "stdout: {text}");
}

#[test]
fn theta_json_artifact_round_trips() {
    let dir = std::env::temp_dir().join(format!("zakframe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("theta.json");
    let out = bin()
        .args(["theta", "--kind", "4", "--q", "0.5", "--z-re", "0"])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let v = parsed["value_re"].as_f64().unwrap();
    assert!((v - 0.1211242080025805).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn zak_csv_has_documented_columns() {
    let out = bin()
        .args(["zak", "--window", "gauss", "--gamma", "1", "--grid", "8", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,nu,re,im"));
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn limits_csv_lists_gammas() {
    let out = bin()
        .args(["limits", "--gammas", "1,2", "--quad", "256", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gamma,dist_sinc,dist_indicator\n"));
    assert_eq!(text.lines().count(), 3);
}
