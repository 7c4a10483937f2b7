use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL_PLAN: [&str; 8] = ["--dim", "2", "--budget-multiplier", "200", "--runs", "3", "--functions", "f1,f6"];

fn iurlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iurlab"))
        .args(args)
        .env_remove("IURLAB_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn with_out<'a>(args: &[&'a str], dir: &'a Path) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--out", dir.to_str().unwrap()]);
    v
}

#[test]
fn formula_es_ratio() {
    let r = json(&iurlab(&["formula", "--algo", "es", "--g", "100", "--lambda", "30", "--mu", "15", "--codomain-bits", "32"]));
    assert!((r["ratio"].as_f64().unwrap() - 0.028059).abs() < 5e-7);
}

#[test]
fn formula_mc_is_zero() {
    let r = json(&iurlab(&["formula", "--algo", "mc"]));
    assert_eq!(r["ratio"].as_f64(), Some(0.0));
}

#[test]
fn formula_jade_interval() {
    let r = json(&iurlab(&["formula", "--algo", "jade", "--g", "3", "--s", "10", "--p", "0.2", "--codomain-bits", "32"]));
    assert!((r["ratio"].as_f64().unwrap() - 0.019982).abs() < 5e-7);
    assert!((r["ratio_upper"].as_f64().unwrap() - 0.031424).abs() < 5e-7);
}

#[test]
fn formula_bound() {
    let r = json(&iurlab(&["formula", "--algo", "bound", "--m", "8", "--codomain-bits", "3"]));
    let bound = r["upper_bound"].as_f64().unwrap();
    assert!(bound > 0.0 && bound <= 1.0);
}

#[test]
fn missing_parameter_is_usage_error() {
    assert_eq!(code(&iurlab(&["formula", "--algo", "es", "--g", "10", "--lambda", "30"])), 2);
    assert_eq!(code(&iurlab(&["formula", "--algo", "jade", "--g", "3", "--s", "10"])), 2);
}

#[test]
fn unknown_flag_and_value_are_usage_errors() {
    assert_eq!(code(&iurlab(&["formula", "--algo", "mc", "--bogus", "1"])), 2);
    assert_eq!(code(&iurlab(&["formula", "--algo", "nelder-mead"])), 2);
    assert_eq!(code(&iurlab(&["bench", "--runs", "3"])), 2);
    assert_eq!(code(&iurlab(&[])), 2);
}

#[test]
fn verify_ratio_bounds_small_is_clean() {
    let r = json(&iurlab(&["verify", "theorem1", "--max-m", "3", "--max-n", "2", "--max-g", "2"]));
    assert_eq!(r["violations"].as_u64(), Some(0));
    assert!(r["exhaustive"]["policies_checked"].as_u64().unwrap() > 0);
}

#[test]
fn verify_ratio_bounds_too_large_is_resource_error() {
    assert_eq!(code(&iurlab(&["verify", "theorem1", "--max-m", "20"])), 3);
}

#[test]
fn verify_pi_matches() {
    let r = json(&iurlab(&["verify", "pi", "--max-g", "6"]));
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|c| c["abs_diff"].as_f64().unwrap() <= 1e-12));
}

#[test]
fn exact_compare_with_best() {
    let r = json(&iurlab(&["exact", "--policy", "compare-with-best", "--m", "4", "--g", "3"]));
    assert!((r["report"]["ratio"].as_f64().unwrap() - 0.418390).abs() < 5e-6);
    assert_eq!(code(&iurlab(&["exact", "--ensemble", "all", "--m", "3", "--g", "2"])), 2);
}

#[test]
fn compare_rerun_is_byte_identical_and_independent_of_jobs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let base = [&["compare", "--algos", "mc,lj,es,cmaes", "--pairs", "cmaes:es,lj:mc"][..], &SMALL_PLAN[..]].concat();
    assert_eq!(code(&iurlab(&with_out(&base, a.path()))), 0);
    let mut again = with_out(&base, b.path());
    again.extend(["--jobs", "2"]);
    assert_eq!(code(&iurlab(&again)), 0);
    for name in ["mean_errors.csv", "rankings.csv", "wilcoxon.csv", "manifest.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name} differs");
    }
    let wilcoxon = read(a.path(), "wilcoxon.csv");
    assert_eq!(wilcoxon.lines().count(), 1 + 2 * 2);
    assert!(wilcoxon.contains("cmaes vs es"));
}

#[test]
fn manifest_echoes_resolution_and_reruns() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let base = [&["compare", "--algos", "es,cmaes", "--seed", "9"][..], &SMALL_PLAN[..]].concat();
    assert_eq!(code(&iurlab(&with_out(&base, a.path()))), 0);
    let manifest: Value = serde_json::from_str(&read(a.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["request"]["command"], "compare");
    assert_eq!(manifest["budget"].as_u64(), Some(400));
    assert_eq!(manifest["seeds"], serde_json::json!([9, 10, 11]));
    assert_eq!(manifest["resolved"][0]["config"]["lambda"].as_u64(), Some(30));
    assert_eq!(manifest["resolved"][1]["config"]["lambda"].as_u64(), Some(6));

    let path = a.path().join("manifest.json");
    let rerun = ["compare", "--from-manifest", path.to_str().unwrap(), "--out", b.path().to_str().unwrap()];
    assert_eq!(code(&iurlab(&rerun)), 0);
    for name in ["mean_errors.csv", "rankings.csv", "wilcoxon.csv", "manifest.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name} differs");
    }
    let wrong = ["sweep", "--from-manifest", path.to_str().unwrap(), "--out", b.path().to_str().unwrap()];
    assert_eq!(code(&iurlab(&wrong)), 2);
}

#[test]
fn sweep_writes_one_curve_row_per_mu() {
    let dir = tempfile::tempdir().unwrap();
    let args = [&["sweep", "--lambda", "10", "--mus", "1,2,3,4,5,6,7,8,9,10"][..], &SMALL_PLAN[..]].concat();
    assert_eq!(code(&iurlab(&with_out(&args, dir.path()))), 0);
    let curve = read(dir.path(), "fig2_curve.csv");
    assert_eq!(curve.lines().count(), 1 + 10);
    assert!(curve.starts_with("mu_over_lambda,"));
}

#[test]
fn bench_cmaes_solves_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "bench", "--algo", "cmaes", "--function", "f1", "--dim", "5", "--budget-multiplier", "10000", "--runs", "20",
    ];
    assert_eq!(code(&iurlab(&with_out(&args, dir.path()))), 0);
    let summary = read(dir.path(), "bench_summary.csv");
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "f1");
    let mean: f64 = row[2].parse().unwrap();
    assert!(mean <= 1e-8, "mean error {mean}");
    assert_eq!(read(dir.path(), "bench_runs.csv").lines().count(), 1 + 20);
}

#[test]
fn bench_traces_and_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_iurlab"))
        .args(["bench", "--algo", "lj", "--function", "f2", "--dim", "2", "--budget-multiplier", "50", "--runs", "2", "--traces"])
        .env("IURLAB_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let trace = read(dir.path(), "traces/f2_run0.csv");
    assert_eq!(trace.lines().count(), 1 + 100);
    let manifest: Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 4);
}

#[test]
fn bench_too_small_budget_is_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bench", "--algo", "pso", "--function", "f1", "--dim", "2", "--budget-multiplier", "5", "--runs", "2"];
    assert_eq!(code(&iurlab(&with_out(&args, dir.path()))), 3);
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let args = [&["compare", "--algos", "mc,lj"][..], &SMALL_PLAN[..]].concat();
    assert_eq!(code(&iurlab(&with_out(&args, &blocker))), 4);
    let missing = dir.path().join("absent.json");
    assert_eq!(code(&iurlab(&["compare", "--from-manifest", missing.to_str().unwrap()])), 4);
}
