use std::fs;
use std::process::Command as Process;

use approx::assert_relative_eq;
use serde_json::Value;

use puncture_cli::{run_job, CliError, JobConfig};

fn job(text: &str) -> JobConfig {
    JobConfig::from_json(text).unwrap()
}

#[test]
fn criterion_job_on_log_squared_field_diverges() {
    let cfg = job(r#"{"command":"criterion","n":3,"subject":{"field":{"kind":"power_log","c":1,"gamma":0,"s":2}}}"#);
    let bundle = run_job(&cfg).unwrap();
    assert_eq!(bundle.report["divergence"]["verdict"], "Diverges");
    assert_eq!(bundle.report["divergence"]["method"], "symbolic");
    let csv = bundle.traces[0].to_csv();
    assert!(csv.starts_with("epsilon,integral,increment\n"));
    assert_eq!(csv.lines().count(), 1 + 8);
}

#[test]
fn modulus_job_on_unit_e_ring() {
    let cfg = job(r#"{"command":"modulus","n":3,"ring":{"r1":1,"r2":2.718281828459045}}"#);
    let bundle = run_job(&cfg).unwrap();
    let cap = bundle.report["capacity"]["value"].as_f64().unwrap();
    assert_relative_eq!(cap, 4.0 * std::f64::consts::PI, max_relative = 1e-15);
    assert_eq!(bundle.report["capacity"]["method"], "symbolic");
    assert!(bundle.report["oracle"]["relative_error"].as_f64().unwrap() < 1e-2);
}

#[test]
fn analyze_job_on_power_shift() {
    let cfg = job(r#"{"command":"analyze","n":3,
            "subject":{"map":{"kind":"radial","profile":{"kind":"power_shift","alpha":0.5},"n":3}},
            "points":[[0.25,0,0],[0,0,-0.25],[0.15,0.2,0]]}"#);
    let bundle = run_job(&cfg).unwrap();
    for s in bundle.report["samples"].as_array().unwrap() {
        assert_relative_eq!(
            s["inner_dilatation"]["value"].as_f64().unwrap(),
            36.0,
            max_relative = 1e-12
        );
    }
    assert_eq!(bundle.report["limit_set_at_zero"]["kind"], "sphere_set");
}

#[test]
fn fmo_and_removability_jobs() {
    let cfg = job(r#"{"command":"fmo","n":3,"subject":{"field":{"kind":"log_power","shift":0,"power":1}}}"#);
    assert_eq!(run_job(&cfg).unwrap().report["report"]["verdict"], "FMO");
    let cfg = job(r#"{"command":"criterion","n":3,
            "subject":{"map":{"kind":"radial","profile":{"kind":"power_shift","alpha":0.5},"n":3}},
            "phi":{"kind":"power","p":3}}"#);
    let rep = run_job(&cfg).unwrap().report;
    assert_eq!(rep["report"]["conclusion"], "not_established");
    assert_eq!(rep["report"]["ground_truth"], false);
    assert_eq!(rep["report"]["agreement"], true);
}

#[test]
fn radial_map_modulus_job_reports_lower_bound() {
    let cfg = job(r#"{"command":"modulus","n":3,"ring":{"r1":0.01,"r2":0.5},
            "subject":{"map":{"kind":"radial","profile":{"kind":"exp_integral",
              "q":{"kind":"power_log","c":1,"gamma":1,"s":0},"n":3},"n":3}}}"#);
    let rep = run_job(&cfg).unwrap().report;
    assert!(rep["lower_q_check"]["gap"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn errors_carry_exit_codes() {
    let err = JobConfig::from_json(r#"{"command":"modulus","ring":{"r1":1,"r2":2},"extra":0}"#).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let cfg = job(r#"{"command":"modulus","ring":{"r1":0.5,"r2":0.5}}"#);
    let err = run_job(&cfg).unwrap_err();
    assert!(matches!(err, CliError::Core(_)));
    assert_eq!(err.exit_code(), 3);
    let cfg = job(r#"{"command":"analyze","n":3,"subject":{"map":{"kind":"twist","m":2,"n":3}},"points":[[0,0,2]]}"#);
    assert_eq!(run_job(&cfg).unwrap_err().exit_code(), 2);
}

#[test]
fn binary_writes_reports_and_error_objects() {
    let exe = env!("CARGO_BIN_EXE_puncture");
    let dir = tempfile::tempdir().unwrap();
    let job_path = dir.path().join("job.json");
    fs::write(&job_path, r#"{"command":"modulus","n":2,"ring":{"r1":0.1,"r2":0.4}}"#).unwrap();
    let out = dir.path().join("out");
    let status = Process::new(exe)
        .args(["--config", job_path.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(status.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "modulus");
    assert!(out.join("trace-modulus.csv").exists());

    fs::write(&job_path, r#"{"command":"nonsense"}"#).unwrap();
    let res = Process::new(exe)
        .args(["--config", job_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
    let obj: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(obj["error"]["kind"], "validation");
}

#[test]
fn suite_is_reproducible_from_the_binary() {
    let exe = env!("CARGO_BIN_EXE_puncture");
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(w);
        let res = Process::new(exe)
            .args([
                "--workers",
                w,
                "--seed",
                "7",
                "--json-only",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(res.status.success());
        let report: Value = serde_json::from_slice(&res.stdout).unwrap();
        assert_eq!(report["passed"], report["total"]);
        csvs.push(fs::read(out.join("trace-suite.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}
