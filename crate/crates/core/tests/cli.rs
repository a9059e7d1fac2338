use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sphere-spectra"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn spectrum_csv_lists_requested_roots() {
    let out = run(&["spectrum", "--k", "1", "--x0", "0.9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), sphere_spectra::cli::CSV_HEADER);
    let rows = data_rows(&text);
    assert!(rows.len() >= 5, "{text}");
    for r in &rows {
        assert_eq!(r[0], "0.9");
        assert_eq!(r[3], "0");
        assert_eq!(r[8], "series");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["spectrum", "--k", "2", "--eps", "1.5", "--x0", "0.9"];
    let a = run(&args).stdout;
    let b = bin().args(args).env("SPHERE_SPECTRA_THREADS", "1").output().unwrap().stdout;
    let c = bin().args(args).env("SPHERE_SPECTRA_THREADS", "3").output().unwrap().stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn negative_k_matches_positive_k() {
    let a = run(&["spectrum", "--k", "3", "--x0", "0.9"]).stdout;
    let b = run(&["spectrum", "--k", "-3", "--x0", "0.9"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"k": 5, "x0": 0.5, "M": 120, "format": "json"}"#).unwrap();
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--x0", "0.9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["params"]["k"], 5);
    assert_eq!(v["meta"]["params"]["M"], 120);
    assert_eq!(v["meta"]["params"]["x0"], 0.9);
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"k": 1, "reynolds": 3}"#).unwrap();
    assert_eq!(run(&["spectrum", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_with_code_two() {
    assert_eq!(run(&["spectrum", "--M", "3000"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--x0", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--eps", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["trace", "--sweep", "y:0:1:0.1"]).status.code(), Some(2));
    assert_eq!(run(&["trace"]).status.code(), Some(2));
}

#[test]
fn x0_one_gives_analytic_spectrum() {
    let out = run(&["spectrum", "--k", "2", "--eps", "3", "--x0", "1"]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert!(rows.len() >= 5);
    assert_eq!(rows[0][2], "2.5");
    assert_eq!(rows[1][2], "3.5");
    assert!(rows.iter().all(|r| r[8] == "analytic"));
}

#[test]
fn trace_writes_rows_and_event_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("trace.csv");
    let out = run(&["trace", "--k", "1", "--x0", "0.9", "--sweep", "eps:2:3:0.1", "--smax", "6", "--output", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&std::fs::read_to_string(&out_path).unwrap());
    assert!(rows.iter().any(|r| r[3] != "0"), "expected complex samples");
    let events_path = dir.path().join("trace.events.json");
    assert!(Path::new(&events_path).exists());
    let events: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(events_path).unwrap()).unwrap();
    assert!(!events.as_array().unwrap().is_empty());
}

#[test]
fn verify_subset_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["verify", "--only", "analytic,darboux", "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
    assert_eq!(run(&["verify", "--only", "nonsense"]).status.code(), Some(2));
}

#[test]
fn oracle_command_agrees_with_spectrum() {
    let series = data_rows(&String::from_utf8(run(&["spectrum", "--k", "1", "--x0", "0.9", "--smax", "4"]).stdout).unwrap());
    let oracle = data_rows(&String::from_utf8(run(&["oracle", "--k", "1", "--x0", "0.9", "--smax", "4"]).stdout).unwrap());
    assert_eq!(series.len(), oracle.len());
    for (a, b) in series.iter().zip(&oracle) {
        let (x, y): (f64, f64) = (a[2].parse().unwrap(), b[2].parse().unwrap());
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        assert_eq!(b[8], "oracle");
    }
}
