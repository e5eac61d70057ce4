use std::path::Path;
use std::process::{Command, Output};

use bvsieve_cli::config::{FileConfig, QRule, Task};
use bvsieve_cli::output::format_float;
use serde_json::Value;

fn bvsieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvsieve"))
        .args(args)
        .env_remove("BV_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn empty_argv_prints_help_with_usage_status() {
    let out = bvsieve(&[]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn invalid_values_are_usage_errors() {
    for args in [
        &["bv-scan", "--epsilon", "0.2"][..],
        &["bv-scan", "--epsilon", "0"],
        &["bv-scan", "--x", "1e5,1e4"],
        &["bv-scan", "--x", "1e4,1e4"],
        &["bv-scan", "--x", "2"],
        &["bv-scan", "--A", "3", "--Q", "5"],
        &["bv-scan", "--x", "1e4", "--Q", "200"],
        &["bv-scan", "--x", "1e4", "--Q", "5", "--Q1", "7"],
        &["bv-scan", "--threads", "0"],
        &["bv-scan", "--baseline", "median"],
        &["characters", "--q-max", "2.5"],
        &["no-such-command"],
    ] {
        assert_eq!(code(&bvsieve(args)), 2, "{args:?}");
    }
}

#[test]
fn epsilon_just_below_the_limit_is_accepted() {
    let out = bvsieve(&["bv-scan", "--x", "1e3", "--Q", "3", "--epsilon", "0.0714"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = bvsieve(&["graham", "--length", "100", "--output", "/nonexistent-dir/out.csv"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn oversized_modulus_is_a_resource_error() {
    let out = bvsieve(&["characters", "--q-max", "2000000"]);
    assert_eq!(code(&out), 4);
}

fn scan_csv(dir: &Path, threads: &str, tag: &str) -> Vec<u8> {
    let path = dir.join(format!("{tag}.csv"));
    let out = bvsieve(&[
        "bv-scan", "--x", "1e4,3e4,1e5", "--A", "1", "--threads", threads, "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = String::from_utf8_lossy(&out.stdout);
    assert_eq!(summary.lines().count(), 3, "one summary line per x");
    std::fs::read(path).unwrap()
}

#[test]
fn csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let one = scan_csv(dir.path(), "1", "a");
    let four = scan_csv(dir.path(), "4", "b");
    let again = scan_csv(dir.path(), "3", "c");
    assert_eq!(one, four);
    assert_eq!(one, again);
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("x,Q,Q1,baseline,lhs,rhs_theorem1,rhs_corollary,ratio,wall_time_ms\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(',')), "timing column is empty by default");
}

#[test]
fn timing_fills_the_last_column() {
    let out = bvsieve(&["pi-scan", "--x", "1e4", "--Q", "10", "--timing"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains(",pi_li_style,"));
    assert!(!row.ends_with(','));
}

fn cells_agree(csv: &str, json: &Value) -> bool {
    match json {
        Value::Null => csv.is_empty(),
        Value::Bool(b) => csv == b.to_string(),
        Value::String(s) => csv == s,
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                csv == i.to_string()
            } else {
                csv == format_float(n.as_f64().unwrap())
            }
        }
        _ => false,
    }
}

#[test]
fn csv_and_json_round_trip() {
    let runs: [&[&str]; 4] = [
        &["bv-scan", "--x", "1e4,1e5", "--A", "1", "--baseline", "chebyshev"],
        &["graham", "--length", "500,5000"],
        &["large-sieve", "--trials", "20", "--seed", "7"],
        &["characters", "--q-max", "40"],
    ];
    for args in runs {
        let csv_out = bvsieve(args);
        let json_args: Vec<&str> = args.iter().copied().chain(["--format", "json"]).collect();
        let json_out = bvsieve(&json_args);
        assert_eq!(code(&csv_out), 0);
        assert_eq!(code(&json_out), 0);
        let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
        let headers = reader.headers().unwrap().clone();
        let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        let json: Vec<Value> = serde_json::from_slice(&json_out.stdout).unwrap();
        assert_eq!(rows.len(), json.len(), "{args:?}");
        for (row, obj) in rows.iter().zip(&json) {
            let obj = obj.as_object().unwrap();
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            assert_eq!(keys, headers.iter().collect::<Vec<_>>());
            for (cell, key) in row.iter().zip(headers.iter()) {
                assert!(cells_agree(cell, &obj[key]), "{args:?} {key}: {cell} vs {}", obj[key]);
            }
        }
    }
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.toml");
    std::fs::write(&path, "x = [1e4, 2e4]\nQ = 12.0\nformat = \"json\"\n").unwrap();
    let p = path.to_str().unwrap();

    let out = bvsieve(&["bv-scan", "--config", p]);
    assert_eq!(code(&out), 0);
    let json: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json.len(), 2);
    assert_eq!(json[0]["Q"], 12.0);

    let out = bvsieve(&["bv-scan", "--config", p, "--A", "1", "--format", "csv", "--x", "1e4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("10000,10.8573620475813,"));

    std::fs::write(&path, "x = [1e4]\nwidth = 3\n").unwrap();
    assert_eq!(code(&bvsieve(&["bv-scan", "--config", p])), 2);
    assert_eq!(code(&bvsieve(&["bv-scan", "--config", "/nonexistent/scan.toml"])), 3);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_bvsieve"))
        .args(["graham", "--length", "100"])
        .env("BV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_bvsieve"))
        .args(["graham", "--length", "100"])
        .env("BV_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn rule_selection() {
    use clap::Parser;
    let cli = bvsieve_cli::config::Cli::try_parse_from(["bvsieve", "bv-scan", "--x", "1e6", "--A", "3", "--baseline", "identity"])
        .unwrap();
    let config = bvsieve_cli::config::resolve(cli, None).unwrap();
    match config.task {
        Task::Scan { x_list, q_rule, .. } => {
            assert_eq!(x_list, vec![1e6]);
            assert_eq!(q_rule, QRule::LogPower(3.0));
            assert!((q_rule.modulus_bound(1e6) - 1e3 / 1e6f64.ln().powi(3)).abs() < 1e-12);
        }
        other => panic!("unexpected task {other:?}"),
    }
    assert!(FileConfig::parse("bogus = 1").is_err());
    assert!(FileConfig::parse("n_max = 1e5\nQ1 = 2.0").is_ok());
}

#[test]
fn verification_commands_pass() {
    assert_eq!(code(&bvsieve(&["vaughan-verify", "--n-max", "5000"])), 0);
    assert_eq!(code(&bvsieve(&["characters", "--q-max", "80"])), 0);
    assert_eq!(code(&bvsieve(&["large-sieve", "--trials", "30"])), 0);
}
