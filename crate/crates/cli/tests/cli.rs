//! Behavioral tests of the `riccati` binary: exit codes, report contents,
//! CSV format and the no-partial-output guarantee.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riccati"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn csv_value(line: &str) -> (f64, Option<f64>, u8) {
    let mut fields = line.split(',');
    let t = fields.next().unwrap().parse().unwrap();
    let y_field = fields.next().unwrap();
    let y = if y_field.is_empty() {
        None
    } else {
        Some(y_field.parse().unwrap())
    };
    let flag = fields.next().unwrap().parse().unwrap();
    (t, y, flag)
}

#[test]
fn solve_tan_family_to_stdout() {
    let output = run(&["solve", "--input", data("tan.json").to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,y,pole_flag");
    assert_eq!(lines.len(), 102);
    let (t, y, flag) = csv_value(lines[51]);
    assert!((t - 0.5).abs() < 1e-12);
    assert_eq!(flag, 0);
    assert!((y.unwrap() - 0.5_f64.tan()).abs() < 1e-9);
}

#[test]
fn solve_explicit_problem_through_detection() {
    // P=1, Q=0, F=1 detects as (c1, c2) = (-1, 0) and solves to tan.
    let output = run(&["solve", "--input", data("detect_unit.json").to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    let (t, y, _) = csv_value(text.lines().nth(6).unwrap());
    assert!((t - 0.5).abs() < 1e-12);
    assert!((y.unwrap() - 0.5_f64.tan()).abs() < 1e-9);
}

#[test]
fn solve_writes_file_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.csv");
    let output = run(&[
        "solve",
        "--input",
        data("tan.json").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,y,pole_flag\n"));
    assert!(!text.contains('\r'));
    assert!(dir.path().read_dir().unwrap().all(|e| !e
        .unwrap()
        .file_name()
        .to_string_lossy()
        .ends_with(".tmp")));
}

#[test]
fn solve_flags_pole_adjacent_rows() {
    let output = run(&["solve", "--input", data("tan_wide.json").to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    let mut saw_flagged = false;
    for line in text.lines().skip(1) {
        let (t, y, flag) = csv_value(line);
        if (t - std::f64::consts::FRAC_PI_2).abs() <= 0.05 {
            assert_eq!(flag, 1, "row at {t} should be flagged");
            assert!(y.is_none());
            saw_flagged = true;
        } else {
            assert_eq!(flag, 0, "row at {t} should not be flagged");
            assert!(y.is_some());
        }
    }
    assert!(saw_flagged);
}

#[test]
fn solve_rejects_non_integrable_explicit_problem() {
    let output = run(&[
        "solve",
        "--input",
        data("not_integrable.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 3);
}

#[test]
fn solve_rejects_malformed_json() {
    let output = run(&["solve", "--input", data("malformed.json").to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn solve_rejects_missing_member() {
    let output = run(&[
        "solve",
        "--input",
        data("missing_member.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("\"g\""));
}

#[test]
fn solve_numeric_failure_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.csv");
    let output = run(&[
        "solve",
        "--input",
        data("q_quadrature_failure.json").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 4);
    assert!(!out.exists());
    assert_eq!(dir.path().read_dir().unwrap().count(), 0);
}

#[test]
fn detect_prints_the_constants() {
    let output = run(&[
        "detect",
        "--input",
        data("detect_exp.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    assert_eq!(text.trim(), "c1=3.00000000000 c2=2.00000000000");

    let output = run(&[
        "detect",
        "--input",
        data("detect_unit.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(stdout(&output).trim(), "c1=-1.00000000000 c2=0");
}

#[test]
fn detect_rejects_non_integrable_form() {
    let output = run(&[
        "detect",
        "--input",
        data("not_integrable.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 3);
    assert_eq!(stdout(&output).trim(), "not integrable form");
}

#[test]
fn verify_tanh_benchmark_passes() {
    let output = run(&["verify", "--input", data("tanh.json").to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    for key in [
        "c1=",
        "max_abs_err=",
        "residual=",
        "fitted_c=",
        "crosscheck_max_abs_diff=",
        "poles=",
        "pass=true",
    ] {
        assert!(text.contains(key), "missing {key} in report:\n{text}");
    }
}

#[test]
fn verify_corrupted_coefficients_fail() {
    let output = run(&[
        "verify",
        "--input",
        data("corrupted.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 5);
    let text = stdout(&output);
    assert!(
        text.contains("detect=not_integrable_form"),
        "report:\n{text}"
    );
    assert!(text.contains("pass=false"));
}

#[test]
fn verify_skips_the_formula_outside_its_regime() {
    let output = run(&["verify", "--input", data("tan_wide.json").to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    assert!(
        text.contains("paper_formula_regime=skipped"),
        "report:\n{text}"
    );
    assert!(text.contains("poles=1.57079632679"));
}

#[test]
fn verify_q_family_instance() {
    let output = run(&["verify", "--input", data("q_family.json").to_str().unwrap()]);
    assert_eq!(
        exit_code(&output),
        0,
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(stdout(&output).contains("pass=true"));
}

#[test]
fn commute_check_structured_form_passes() {
    let output = run(&[
        "commute-check",
        "--input",
        data("form5.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout(&output).contains("pass=true"));
}

#[test]
fn commute_check_rotation_family_fails_with_sqrt_two() {
    let output = run(&[
        "commute-check",
        "--input",
        data("rotation_entries.json").to_str().unwrap(),
        "--samples",
        "2",
    ]);
    assert_eq!(exit_code(&output), 5);
    let text = stdout(&output);
    assert!(text.contains("max_commutator_norm=1.41421356237"), "{text}");
    assert!(text.contains("pass=false"));
}

#[test]
fn commute_check_missing_member_is_an_input_error() {
    let output = run(&[
        "commute-check",
        "--input",
        data("matrix_missing_member.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 2);
}
