use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use codegram::codes::{double_trace_code, write_generator};
use codegram::experiment::sha256_hex;

fn codegram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codegram"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let bad_code = codegram(&[
        "spectra", "run", "--code", "golden", "--m", "5", "--p", "4", "--out", &out,
    ]);
    assert_eq!(bad_code.status.code(), Some(1));
    let no_trials = codegram(&[
        "spectra", "run", "--code", "gold", "--m", "5", "--p", "4", "--trials", "0",
    ]);
    assert_eq!(no_trials.status.code(), Some(1));
    let both = codegram(&["spectra", "run", "--code", "gold", "--m", "5", "--p", "4", "--y", "0.5"]);
    assert_eq!(both.status.code(), Some(1));
    let budget = codegram(&[
        "paths", "verify", "--code", "gold", "--m", "3", "--lmax", "11", "--out", &out,
    ]);
    assert_eq!(budget.status.code(), Some(3));
    let unknown_flag = codegram(&["code", "info", "--colour", "red"]);
    assert_eq!(unknown_flag.status.code(), Some(1));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let io = codegram(&[
        "paths",
        "count",
        "--lmax",
        "3",
        "--out",
        &blocker.join("sub").display().to_string(),
    ]);
    assert_eq!(io.status.code(), Some(2));
}

#[test]
fn spectra_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let run = codegram(&[
        "spectra", "run", "--code", "gold", "--m", "5", "--y", "0.5", "--trials", "50", "--seed", "3", "--out", &out,
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));

    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["p"], 16);
    assert_eq!(summary["sup_distance"].as_array().unwrap().len(), 50);
    let bound = summary["theorem_bound"].as_f64().unwrap();
    let expect = codegram::spectra::theorem_bound(31, 16.0 / 31.0).unwrap();
    assert!((bound - expect).abs() < 1e-12);

    let eig = std::fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert!(!eig.contains('\r'));
    assert_eq!(eig.lines().count(), 1 + 50 * 16);
    let esd = std::fs::read_to_string(dir.path().join("esd_vs_mp.csv")).unwrap();
    assert_eq!(esd.lines().next(), Some("z,esd,mp_cdf"));

    let manifest = json(&dir.path().join("manifest.json"));
    let files = manifest["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["eigenvalues.csv", "esd_vs_mp.csv", "summary.json"]);
    for f in files {
        let bytes = std::fs::read(dir.path().join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }
    assert_eq!(manifest["seeds"].as_array().unwrap().len(), 50);
    assert_eq!(manifest["code"]["d_dual"], 5);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        "code = gold\nm = 5\np = 10\ntrials = 40\nlmax = 4\nformat = csv\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let run = codegram(&[
        "moments",
        "run",
        "--config",
        &config.display().to_string(),
        "--trials",
        "7",
        "--out",
        &out.display().to_string(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(out.join("moments.csv").exists());
    assert!(!out.join("moments.json").exists());
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["trials"], 7);
    assert_eq!(manifest["config"]["p"], 10);
    // l_max = 4 is not below sqrt(10)
    assert!(!manifest["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn moments_with_exact_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let run = codegram(&[
        "moments",
        "run",
        "--code",
        "repetition",
        "--m",
        "3",
        "--p",
        "2",
        "--lmax",
        "2",
        "--trials",
        "30",
        "--exact",
        "--out",
        &out,
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let rows = json(&dir.path().join("moments.json"));
    let r = &rows[0];
    assert_eq!(r["l"], 2);
    assert_eq!(r["exact_expectation"].as_f64(), Some(2.0));
    assert!(r["main_term"].as_f64().is_some());
    assert!((r["empirical_mean"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn paths_verify_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let run = codegram(&[
        "paths", "verify", "--code", "gold", "--m", "3", "--lmax", "5", "--out", &out,
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let reports = json(&dir.path().join("paths.json"));
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 1 + 2 + 5 + 15 + 52);
    assert!(reports.iter().all(|r| r["pass"] == true));
    let summary = std::fs::read_to_string(dir.path().join("paths_summary.csv")).unwrap();
    assert!(summary.lines().any(|l| l == "4,15,14,15,0,0"));

    let count_dir = dir.path().join("count");
    let run = codegram(&["paths", "count", "--out", &count_dir.display().to_string()]);
    assert!(run.status.success());
    let rows = json(&count_dir.join("gamma_counts.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), (1..=8).sum::<usize>());
    assert!(rows.iter().all(|r| r["enumerated"] == r["narayana"]));
}

#[test]
fn matrix_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dt.gen");
    std::fs::write(&file, write_generator(&double_trace_code(4, 3).unwrap())).unwrap();
    let run = codegram(&["code", "info", "--matrix-file", &file.display().to_string()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let info: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!((info["n"].as_u64(), info["k"].as_u64()), (Some(15), Some(8)));
    assert_eq!(info["d_dual"], 5);

    let both = codegram(&[
        "code",
        "info",
        "--code",
        "gold",
        "--m",
        "5",
        "--matrix-file",
        &file.display().to_string(),
    ]);
    assert_eq!(both.status.code(), Some(1));
}
