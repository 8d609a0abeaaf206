//! End-to-end checks of the `plmc-lab` binary: exit codes, file schemas, and
//! bitwise reproducibility of reruns.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plmc-lab"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SAMPLE_CONFIG: &str = r#"{
    "body": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
    "potential": {"kind": "affine_max",
                  "pieces": [{"a": [1.0, 0.0], "b": 0.0}, {"a": [-1.0, 0.0], "b": 0.0}],
                  "known_infimum": 0.0},
    "eta": 0.01,
    "steps": 300,
    "seed": 11,
    "replicas": 4,
    "record_stride": 50
}"#;

#[test]
fn usage_errors_exit_with_code_two() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_of(&out);
    assert!(msg.contains("Usage") || msg.contains("usage"), "{msg}");

    let out = run(&["sample", "--config", "x.json", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["not-a-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_and_malformed_configs_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sample", "--config", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).starts_with("error:"));

    let bad = write_config(dir.path(), "bad.json", "{\n  \"body\": [,]\n}");
    let out = run(&["sample", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr_of(&out);
    assert!(msg.contains("line 2"), "parse position missing: {msg}");

    // Valid JSON, invalid study inputs: eta at the step-size limit.
    let text = SAMPLE_CONFIG.replace("\"eta\": 0.01", "\"eta\": 2.0");
    let cfg = write_config(dir.path(), "too_big.json", &text);
    let out = run(&["sample", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr_of(&out);
    assert!(msg.contains("n / L^2"), "step rule not named: {msg}");
}

#[test]
fn sample_study_writes_schema_tagged_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", SAMPLE_CONFIG);
    let out_dir = dir.path().join("run");
    let out = run(&[
        "sample",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let csv = std::fs::read_to_string(out_dir.join("samples.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "# plmc-lab csv v1");
    assert!(lines.next().unwrap().starts_with("# generator=chacha12-bm53/v1 seed=11"));
    let header = lines.find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "step,time,replica,x1,x2");
    // 4 replicas x (start + 6 strided + final merge) rows, all numeric.
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 4 * 7);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["command"], "sample");
    assert_eq!(summary["generator"], "chacha12-bm53/v1");
    assert_eq!(summary["seed"], 11);
    assert!(summary["results"]["final_moments"]["second_moment"].is_f64());
    assert!(summary["runtime_seconds"].is_f64());
    assert!(out_dir.join("sample_norms.svg").exists());
}

#[test]
fn reruns_are_bitwise_identical_up_to_runtime() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", SAMPLE_CONFIG);
    let run_once = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = run(&[
            "sample",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        out_dir
    };
    let a = run_once("a");
    let b = run_once("b");

    let csv_a = std::fs::read(a.join("samples.csv")).unwrap();
    let csv_b = std::fs::read(b.join("samples.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "sample CSVs differ between identical runs");

    let mut sum_a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    let mut sum_b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(b.join("summary.json")).unwrap()).unwrap();
    // Wall-clock time is the one intentionally non-reproducible field.
    sum_a["runtime_seconds"] = serde_json::json!(0);
    sum_b["runtime_seconds"] = serde_json::json!(0);
    assert_eq!(sum_a, sum_b);

    // A different seed must change the data.
    let out_dir = dir.path().join("c");
    let out = run(&[
        "sample",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "999",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv_c = std::fs::read(out_dir.join("samples.csv")).unwrap();
    assert_ne!(csv_a, csv_c);
    let sum_c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(sum_c["seed"], 999);
}

#[test]
fn schedule_study_round_trips_each_target() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "body": {"kind": "box", "lower": [0.0], "upper": [5.0]},
            "potential": {"kind": "linear", "c": [1.0], "known_infimum": 0.0},
            "x0": [2.5],
            "constants": {"c_ls": 25.0},
            "schedule": {"eps": 100.0, "eps_grid": [150.0, 200.0], "max_steps": 10000000000000000}
        }"#,
    );
    let out_dir = dir.path().join("run");
    let out = run(&[
        "schedule",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(out_dir.join("schedule.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let fields: Vec<f64> =
            row.split(',').map(|f| f.parse().unwrap()).collect();
        let (eps, rhs) = (fields[0], fields[6]);
        assert!(rhs <= eps, "schedule row misses its target: {row}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["results"]["satisfied"], true);
}

#[test]
fn localtime_study_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "body": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
            "potential": {"kind": "zero", "dim": 2},
            "eta": 0.02,
            "times": [0.2, 0.6],
            "replicas": 8,
            "refinement": 8,
            "seed": 3
        }"#,
    );
    let out_dir = dir.path().join("run");
    let out = run(&[
        "localtime",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("satisfied="), "{stdout}");
    let csv = std::fs::read_to_string(out_dir.join("localtime.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(out_dir.join("localtime.svg").exists());
}

#[test]
fn w2_study_runs_on_a_one_dimensional_target() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "body": {"kind": "box", "lower": [0.0], "upper": [5.0]},
            "potential": {"kind": "linear", "c": [1.0], "known_infimum": 0.0},
            "x0": [2.5],
            "eta": 0.005,
            "steps": 4000,
            "replicas": 8,
            "seed": 21,
            "w2": {"oracle": {"kind": "truncated_exponential", "rate": 1.0, "length": 5.0},
                   "samples": 128}
        }"#,
    );
    let out_dir = dir.path().join("run");
    let out = run(&[
        "w2",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    let results = &summary["results"];
    assert_eq!(results["metric"], "1d_exact");
    assert!(results["w2sq_chain_oracle"].as_f64().unwrap() >= 0.0);
    assert!(results["w2sq_oracle_floor"].as_f64().unwrap() >= 0.0);
    assert!(results["satisfied"].is_boolean());
}
