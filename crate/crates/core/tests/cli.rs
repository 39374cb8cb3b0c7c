//! End-to-end tests of the `cuboidal` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuboidal"))
        .args(args)
        .env("CUBOIDAL_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn eval_prints_the_fcc_value() {
    let o = run(&["eval", "--A", "1", "--s", "6", "--tol", "1e-10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = csv(&o);
    assert_eq!(header, ["A", "s", "value", "tail_bound", "cutoff"]);
    let value: f64 = rows[0][2].parse().unwrap();
    assert!(rows[0][2].starts_with("12.1318801965"), "{}", rows[0][2]);
    assert!((value - 12.131880196544579717).abs() < 1e-9 * value);
    let tail: f64 = rows[0][3].parse().unwrap();
    assert!(tail > 0.0 && tail <= 1e-10 * value);
}

#[test]
fn verify_passes_at_s3() {
    let o = run(&["verify", "--s", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = csv(&o);
    assert_eq!(header, ["s", "check", "value", "threshold", "passed"]);
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn verify_reports_failure_with_exit_two() {
    // an impossible first-derivative tolerance
    let o = run(&["verify", "--s", "3", "--tol-first", "1e-30"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stdout(&o).contains("first_fd"));
}

#[test]
fn divergent_exponent_is_a_usage_error() {
    let o = run(&["eval", "--A", "1", "--s", "1.4"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("--s") && err.contains("diverges"), "{err}");
}

#[test]
fn validation_errors_name_the_flag() {
    let cases: &[(&[&str], &str)] = &[
        (&["eval", "--A", "-1", "--s", "3"], "--A"),
        (&["eval", "--A", "1/0", "--s", "3"], "--A"),
        (&["eval", "--A", "0.5", "--s", "3", "--tol", "0"], "--tol"),
        (&["eval", "--A", "0.5", "--s", "3", "--cutoff", "2"], "--cutoff"),
        (&["scan", "--s", "3", "--min", "0.2"], "--min"),
        (&["limits", "--direction", "a-to-inf", "--probes", "16,4"], "--probes"),
        (&["kissing", "--A", "abc"], "--A"),
    ];
    for (args, flag) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn tol_and_cutoff_are_exclusive() {
    let o = run(&["eval", "--A", "1", "--s", "6", "--tol", "1e-8", "--cutoff", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--cutoff"));
}

#[test]
fn unattainable_tolerance_exits_three() {
    let o = run(&["eval", "--A", "0.5", "--s", "1.6", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn fraction_hits_the_boundary_but_decimal_does_not() {
    let acc = run(&["kissing", "--A", "1/3"]);
    assert_eq!(csv(&acc).1[0][1], "10");
    let low = run(&["kissing", "--A", "0.3333333"]);
    assert_eq!(csv(&low).1[0][1], "2");
}

#[test]
fn csv_round_trips_to_full_precision() {
    let o = run(&["scan", "--s", "6", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv(&o);
    assert_eq!(rows.len(), 5);
    for row in &rows {
        for cell in &row[..4] {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(cuboidal::cli::format_float(x), *cell);
        }
    }
    let first: f64 = rows[0][0].parse().unwrap();
    assert_eq!(first, 1.0 / 3.0);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["scan", "--s", "3", "--steps", "7", "--tol", "1e-6"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_cuboidal"))
        .args(args)
        .env("CUBOIDAL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn jsonl_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("density.jsonl");
    let o = run(&[
        "density",
        "--A",
        "1/2",
        "--format",
        "jsonl",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    let d = v["density"].as_f64().unwrap();
    assert!((d - std::f64::consts::PI * 3f64.sqrt() / 8.0).abs() < 1e-12);
}

#[test]
fn limits_report_converges() {
    for direction in ["a-to-inf", "a-to-zero", "s-to-inf"] {
        let o = run(&["limits", "--direction", direction]);
        assert_eq!(o.status.code(), Some(0), "{direction}: {}", stderr(&o));
        let (header, rows) = csv(&o);
        assert_eq!(header[0], "direction");
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r[5] == "true"));
    }
}

#[test]
fn figure2_has_four_curves() {
    let o = run(&["figure2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = csv(&o);
    assert_eq!(header, ["A", "s", "value", "tail_bound", "cutoff"]);
    assert_eq!(rows.len(), 4 * 41);
    let kiss: Vec<&Vec<String>> = rows.iter().filter(|r| r[1] == "inf").collect();
    assert_eq!(kiss.len(), 41);
    assert_eq!(kiss[0][2], "10");
    assert_eq!(kiss[10][2], "8");
    assert_eq!(kiss[40][2], "12");
    let bcc = rows
        .iter()
        .find(|r| r[1] == "6" && r[0].parse::<f64>().unwrap() == 0.5)
        .expect("grid contains 1/2");
    let value: f64 = bcc[2].parse().unwrap();
    assert!((value - 9.11418326807535893).abs() <= 1e-8 * value);
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("figure2"));
    let o = run(&["nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}
