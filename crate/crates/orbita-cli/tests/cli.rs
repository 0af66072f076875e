//! End-to-end tests that drive the compiled binary the way a shell user
//! would: flags, config files, output formats, exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orbita"));
    cmd.args(args);
    for (key, value) in env {
        cmd.env(key, value);
    }
    cmd.output().expect("binary should spawn")
}

fn stdout_text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn json_report(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_text(out)).expect("stdout should be a JSON report")
}

fn result_value(doc: &serde_json::Value, name: &str) -> f64 {
    doc["results"]
        .as_array()
        .expect("results array")
        .iter()
        .find(|row| row["name"] == name)
        .unwrap_or_else(|| panic!("missing result {name}"))["value"]
        .as_f64()
        .expect("result value should be a number")
}

fn verdict_status(doc: &serde_json::Value, name: &str) -> String {
    doc["verdicts"]
        .as_array()
        .expect("verdicts array")
        .iter()
        .find(|row| row["name"] == name)
        .unwrap_or_else(|| panic!("missing verdict {name}"))["status"]
        .as_str()
        .expect("status should be a string")
        .to_string()
}

fn all_verdicts_pass(doc: &serde_json::Value) {
    for row in doc["verdicts"].as_array().expect("verdicts array") {
        assert_eq!(
            row["status"], "PASS",
            "verdict {} did not pass",
            row["name"]
        );
    }
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("orbita-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn solve_worked_example_reports_conic_elements() {
    let out = run(&[
        "--format", "json", "solve", "--C", "1", "--pos", "1,0", "--vel", "0,1.2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_text(&out));
    let doc = json_report(&out);
    assert!((result_value(&doc, "eccentricity") - 0.44).abs() < 1e-12);
    assert!((result_value(&doc, "semi-latus rectum") - 1.44).abs() < 1e-12);
    assert!((result_value(&doc, "period") - 14.99332061038137).abs() < 1e-10);
    all_verdicts_pass(&doc);
}

#[test]
fn solve_circular_velocity_gives_zero_eccentricity() {
    let out = run(&[
        "--format", "json", "solve", "--C", "1", "--pos", "1,0", "--vel", "0,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_report(&out);
    assert!(result_value(&doc, "eccentricity").abs() < 1e-12);
}

#[test]
fn radial_launch_is_rejected() {
    let out = run(&["solve", "--C", "1", "--pos", "1,0", "--vel", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_text(&out).contains("angular momentum"));
}

#[test]
fn invalid_ellipse_is_rejected() {
    let out = run(&["ellipse", "--a", "3", "--c", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ellipse_report_is_rectangular_csv_with_passes() {
    let out = run(&[
        "--format",
        "csv",
        "ellipse",
        "--a",
        "5",
        "--c",
        "3",
        "--samples",
        "36",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_text(&out);
    assert!(text.ends_with("\r\n"), "CSV must end with CRLF");
    let lines: Vec<&str> = text.trim_end_matches("\r\n").split("\r\n").collect();
    let width = lines[0].matches(',').count();
    for line in &lines {
        assert_eq!(line.matches(',').count(), width, "ragged row: {line}");
    }
    let verdicts: Vec<&&str> = lines.iter().filter(|l| l.starts_with("verdict,")).collect();
    assert!(!verdicts.is_empty());
    for line in verdicts {
        assert!(line.ends_with(",PASS"), "failing verdict row: {line}");
    }
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let args = |seed: &'static str| {
        vec![
            "--format",
            "csv",
            "--seed",
            seed,
            "ellipse",
            "--a",
            "5",
            "--c",
            "3",
            "--samples",
            "10",
            "--random",
            "5",
        ]
    };
    let first = run(&args("42"));
    let second = run(&args("42"));
    let other = run(&args("43"));
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(
        first.stdout, second.stdout,
        "same seed must reproduce bytes"
    );
    assert_ne!(
        first.stdout, other.stdout,
        "different seed must change samples"
    );
}

#[test]
fn infer_on_circle_skips_fit() {
    let out = run(&[
        "--format", "json", "infer", "--a", "1", "--c", "0", "--T", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "N/A verdicts still exit 0");
    let doc = json_report(&out);
    assert_eq!(verdict_status(&doc, "fitted exponent = -2"), "N/A");
    assert_eq!(
        verdict_status(&doc, "three estimators agree pairwise (rel)"),
        "PASS"
    );
}

#[test]
fn infer_coefficient_scales_with_period_squared() {
    let slow = run(&[
        "--format", "json", "infer", "--a", "5", "--c", "3", "--T", "2",
    ]);
    let fast = run(&[
        "--format", "json", "infer", "--a", "5", "--c", "3", "--T", "1",
    ]);
    let c_slow = result_value(&json_report(&slow), "fitted coefficient");
    let c_fast = result_value(&json_report(&fast), "fitted coefficient");
    assert!(
        (4.0 * c_slow / c_fast - 1.0).abs() < 1e-9,
        "doubling T must quarter the coefficient"
    );
}

#[test]
fn shell_example_matches_closed_form() {
    let out = run(&[
        "--format",
        "json",
        "shell",
        "--R",
        "1",
        "--rho",
        "0.0795775",
        "--d",
        "2",
        "--mesh",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_report(&out);
    assert!((result_value(&doc, "force magnitude") - 0.25).abs() < 1e-6);
    all_verdicts_pass(&doc);
}

#[test]
fn shell_interior_probe_is_rejected() {
    let out = run(&["shell", "--R", "1", "--rho", "1", "--d", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shell_requires_exactly_one_density_flag() {
    let neither = run(&["shell", "--R", "1", "--d", "2"]);
    assert_eq!(neither.status.code(), Some(2));
    let layers_without_profile = run(&[
        "shell", "--R", "1", "--rho", "1", "--d", "2", "--layers", "8",
    ]);
    assert_eq!(layers_without_profile.status.code(), Some(2));
}

#[test]
fn solid_ball_profile_runs_from_file() {
    use std::f64::consts::PI;
    let core_mass = PI / 6.0;
    let mantle_density = (1.0 - core_mass) / (4.0 * PI / 3.0 * (1.0 - 0.125));
    let path = temp_path("profile.csv");
    std::fs::write(
        &path,
        format!("radius,density\n0.5,1\n1,{mantle_density}\n"),
    )
    .unwrap();

    let out = run(&[
        "--format",
        "json",
        "shell",
        "--profile",
        path.to_str().unwrap(),
        "--d",
        "2",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_text(&out));
    let doc = json_report(&out);
    assert!((result_value(&doc, "total mass m2") - 1.0).abs() < 1e-12);
    assert!((result_value(&doc, "force magnitude") - 0.25).abs() < 1e-5);
    all_verdicts_pass(&doc);
}

#[test]
fn kepler3_normalized_strength_gives_unit_period() {
    let out = run(&[
        "--format",
        "json",
        "kepler3",
        "--C",
        "39.478418",
        "--a",
        "1,2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_text(&out));
    let doc = json_report(&out);
    assert!(result_value(&doc, "ratio spread (rel)") < 1e-10);
    all_verdicts_pass(&doc);
}

#[test]
fn twobody_defaults_conserve_barycenter() {
    let out = run(&["--format", "json", "twobody"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_text(&out));
    let doc = json_report(&out);
    assert_eq!(verdict_status(&doc, "barycenter moves uniformly"), "PASS");
    all_verdicts_pass(&doc);
}

#[test]
fn tightened_tolerances_fail_with_exit_1() {
    let out = run(&[
        "--tol-scale",
        "1e-18",
        "ellipse",
        "--a",
        "5",
        "--c",
        "3",
        "--samples",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_supplies_missing_flags_and_flags_win() {
    let path = temp_path("config.json");
    std::fs::write(
        &path,
        r#"{"solve": {"C": 1.0, "pos": "1,0", "vel": "0,1.2"}, "sim": {"rel_tol": 1e-12}}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();

    let from_config = run(&["--format", "json", "--config", cfg, "solve"]);
    assert_eq!(
        from_config.status.code(),
        Some(0),
        "stderr: {}",
        stderr_text(&from_config)
    );
    let doc = json_report(&from_config);
    assert!((result_value(&doc, "eccentricity") - 0.44).abs() < 1e-12);

    let overridden = run(&["--format", "json", "--config", cfg, "solve", "--vel", "0,1"]);
    std::fs::remove_file(&path).ok();
    let doc = json_report(&overridden);
    assert!(
        result_value(&doc, "eccentricity").abs() < 1e-12,
        "flag must beat config value"
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let path = temp_path("bad-config.json");
    std::fs::write(&path, r#"{"solve": {"C": 1.0, "velocity": "0,1"}}"#).unwrap();
    let out = run(&[
        "--config",
        path.to_str().unwrap(),
        "solve",
        "--pos",
        "1,0",
        "--vel",
        "0,1",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = [
        "--format",
        "csv",
        "kepler3",
        "--C",
        "39.478418",
        "--a",
        "1,2,3",
    ];
    let serial = run_with_env(&args, &[("ORBITA_THREADS", "1")]);
    let parallel = run_with_env(&args, &[("ORBITA_THREADS", "4")]);
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(
        serial.stdout, parallel.stdout,
        "reduction order must fix the bytes"
    );
}

#[test]
fn unknown_format_is_rejected() {
    let out = run(&["--format", "yaml", "ellipse", "--a", "5", "--c", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_report_to_file() {
    let path = temp_path("report.csv");
    let out = run(&[
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
        "ellipse",
        "--a",
        "5",
        "--c",
        "3",
        "--samples",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        out.stdout.is_empty(),
        "report should go to the file, not stdout"
    );
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("record,"));
}
