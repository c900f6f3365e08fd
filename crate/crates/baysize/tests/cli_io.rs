//! End-to-end checks of the command-line interface: exit codes, output
//! schemas, determinism, and the JSON round trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use baysize::config::RunConfig;
use baysize::report::{Records, Report};
use baysize::runner;

const BIN: &str = env!("CARGO_BIN_EXE_baysize");

const SMALL_CONFIG: &str = r#"
[design]
p_t = 0.3
eps1 = 0.1
eps2 = 0.1
num_doses = 5

[search]
alpha = 0.3
beta = 0.2
n_upper = 30
calib_trials = 60
power_trials = 60
root_seed = 314
n_grid = [15, 30]
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn config_errors_exit_with_code_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SMALL_CONFIG.replace("eps1 = 0.1", "eps1 = 0.4");
    let path = write_config(dir.path(), &bad);
    let out = run(&["power", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("design"), "{stderr}");

    let missing = run(&["power", "--config", "/nonexistent/config.toml"]);
    assert_eq!(missing.status.code(), Some(2));

    let unknown_key = SMALL_CONFIG.replace("root_seed = 314", "root_seed = 314\nbogus = 1");
    let path = write_config(dir.path(), &unknown_key);
    let out = run(&["size", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_byte_identical_across_runs_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_CONFIG);
    for format in ["csv", "json"] {
        let args = [
            "simulate",
            "--config",
            path.to_str().unwrap(),
            "--trials",
            "8",
            "--format",
            format,
        ];
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, second.stdout, "format {format}");
        assert!(!first.stdout.is_empty());
    }
}

#[test]
fn seed_override_changes_output_and_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_CONFIG);
    let base = run(&["simulate", "--config", path.to_str().unwrap(), "--format", "json"]);
    let reseeded = run(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "999",
    ]);
    assert_ne!(base.stdout, reseeded.stdout);
    let report: Report =
        serde_json::from_slice(&reseeded.stdout).expect("valid report JSON");
    assert_eq!(report.root_seed, 999);
    assert_eq!(report.config.search.root_seed, Some(999));
}

#[test]
fn power_csv_has_the_stable_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_CONFIG);
    let out = run(&["power", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "half_effect,alpha,n,power_min,power_max,mc_se,seed,schema_version"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2); // one per configured n
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[6], "314");
        assert_eq!(fields[7], "baysize-1");
        assert!(fields[3].parse::<f64>().is_ok());
    }
}

#[test]
fn table_and_size_commands_emit_writable_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = SMALL_CONFIG.to_string()
        + r#"
alphas = [0.2, 0.4]
half_effects = [0.1]
"#;
    let path = write_config(dir.path(), &config);
    let table_out = dir.path().join("table.csv");
    let out = run(&[
        "table",
        "--config",
        path.to_str().unwrap(),
        "--out",
        table_out.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(&table_out).unwrap();
    // header + 1 half effect × 2 alphas × 2 sizes
    assert_eq!(table.lines().count(), 5);

    // a 0.25 power target is reachable under the 30-patient cap even at
    // this small trial count
    let feasible = config.replace("beta = 0.2", "beta = 0.75");
    let path = write_config(dir.path(), &feasible);
    let size_out = dir.path().join("size.csv");
    let out = run(&[
        "size",
        "--config",
        path.to_str().unwrap(),
        "--out",
        size_out.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let size_csv = fs::read_to_string(&size_out).unwrap();
    assert!(size_csv.starts_with("p_t,eps1,eps2,alpha,beta,scenarios,feasible,n_star,"));
}

#[test]
fn infeasible_size_search_exits_with_code_3_but_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    // a 6-patient cap cannot reach 99% power
    let config = SMALL_CONFIG
        .replace("beta = 0.2", "beta = 0.01")
        .replace("n_upper = 30", "n_upper = 6");
    let path = write_config(dir.path(), &config);
    let out_path = dir.path().join("size.json");
    let out = run(&[
        "size",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report: Report = serde_json::from_str(&fs::read_to_string(out_path).unwrap()).unwrap();
    match report.records {
        Records::Size(record) => match record.outcome {
            baysize::SearchOutcome::Infeasible { power_at_n_upper } => {
                assert!(power_at_n_upper < 0.99);
            }
            other => panic!("expected infeasible outcome, got {other:?}"),
        },
        other => panic!("expected size records, got {other:?}"),
    }
}

#[test]
fn json_report_round_trips_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_CONFIG);
    let out = run(&["power", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();

    // rebuild the run from nothing but the emitted record
    let cfg = RunConfig::from_doc(report.config.clone()).unwrap();
    let rerun = runner::run_power(&cfg);
    assert_eq!(report.records, rerun.records);
    assert_eq!(report.root_seed, rerun.root_seed);
    assert_eq!(report.config, rerun.config);
}
