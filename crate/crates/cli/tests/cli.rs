use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpe")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fpe-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

#[test]
fn list_text_and_json() {
    let out = fpe(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["J1", "g>h>0", "x(t)=πt^α/2", "exponential", "gaussian", "moment", "L2"] {
        assert!(text.contains(needle), "missing {needle}");
    }
    let out = fpe(&["list", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 9);
}

#[test]
fn tabulate_diffusion_csv() {
    let dir = scratch("tab");
    let path = dir.join("d.csv");
    let out = fpe(&[
        "tabulate", "--family", "diffusion", "--x-min", "-4", "--x-max", "4", "--x-step", "0.5", "--times", "1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,t,z,W_exact,J_exact"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 17);
    let w0 = rows.iter().find(|r| r[0] == 0.0).unwrap()[3];
    assert_eq!(format!("{w0:.12}"), "0.282094791774");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn tabulate_exponential_and_moving_support() {
    let out = fpe(&["tabulate", "--family", "exponential", "--x-min", "0", "--x-max", "1", "--x-step", "1", "--times", "1"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let first: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[3], 1.0);
    let out = fpe(&["tabulate", "--family", "J1", "--x-min", "0", "--x-max", "5", "--x-step", "0.1", "--times", "4"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let wall = std::f64::consts::FRAC_PI_2 * 2.0;
    for line in csv.lines().skip(1) {
        let x: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(x <= wall);
    }
    assert_eq!(csv.lines().count() - 1, 32);
}

#[test]
fn usage_and_validation_exit_one() {
    assert_eq!(fpe(&["tabulate", "--family", "J1", "--param", "g=1", "--param", "h=2", "--x-min", "0", "--x-max", "1", "--x-step", "0.1", "--times", "1"]).status.code(), Some(1));
    let out = fpe(&["tabulate", "--family", "J1", "--param", "g=1", "--param", "h=2", "--x-min", "0", "--x-max", "1", "--x-step", "0.1", "--times", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("g>h>0"));
    assert_eq!(fpe(&["verify", "mc", "--family", "diffusion", "--paths", "1000"]).status.code(), Some(1));
    assert_eq!(fpe(&["verify", "pde", "--family", "nope"]).status.code(), Some(1));
    assert_eq!(fpe(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fpe(&["report"]).status.code(), Some(1));
    assert_eq!(fpe(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_residual_report_validates() {
    let dir = scratch("verify");
    let path = dir.join("r.json");
    let out = fpe(&["verify", "residual", "--family", "gamma", "--param", "nu=3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(validator().is_valid(&report));
    assert_eq!(report["pass"], true);
    assert_eq!(report["suite"], "residual");
    assert_eq!(report["params"]["nu"], 3.0);
    assert!(report["metrics"]["ks"].is_null());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn moment_report_records_odd_discrepancy() {
    let out = fpe(&["verify", "residual", "--family", "moment", "--param", "k=1"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = report["details"]["residual"]["moment_integrals"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    let ratio = |k: usize| rows[k]["closed_over_tabulated"].as_f64().unwrap();
    assert!((ratio(3) - 4.0).abs() < 1e-12);
    assert!((ratio(4) - 1.0).abs() < 1e-12);
}

#[test]
fn runtime_failure_gives_error_object_and_exit_two() {
    // A one-cell grid is rejected inside the solver, after validation.
    let out = fpe(&["verify", "pde", "--family", "diffusion", "--cells", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(validator().is_valid(&report));
    assert_eq!(report["pass"], false);
    assert_eq!(report["error"]["stage"], "pde");
    assert_eq!(report["error"]["kind"], "invalid_config");
}

#[test]
fn config_file_precedence() {
    let dir = scratch("cfg");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "family=exponential\nparam.mu=2\nparam.sigma=1\nseed=11\n").unwrap();
    let tab = |extra: &[&str]| {
        let mut args = vec!["--config", cfg.to_str().unwrap(), "tabulate", "--x-min", "0", "--x-max", "0", "--x-step", "1", "--times", "1"];
        args.extend_from_slice(extra);
        let out = fpe(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = String::from_utf8(out.stdout).unwrap();
        csv.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse::<f64>().unwrap()
    };
    assert_eq!(tab(&[]), 2.0);
    assert_eq!(tab(&["--param", "mu=3"]), 3.0);
    let out = fpe(&["--config", cfg.to_str().unwrap(), "verify", "mc", "--paths", "10000", "--dt", "1e-2"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["details"]["mc"]["seed"], 11);
    let out = fpe(&["--config", cfg.to_str().unwrap(), "verify", "mc", "--paths", "10000", "--dt", "1e-2", "--seed", "12"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["details"]["mc"]["seed"], 12);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn mc_is_deterministic_across_workers() {
    let run = |workers: &str| {
        let out = fpe(&["verify", "mc", "--family", "exponential", "--paths", "40000", "--dt", "1e-2", "--workers", workers]);
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        r["metrics"]["ks"].as_f64().unwrap()
    };
    assert_eq!(run("1").to_bits(), run("3").to_bits());
}

#[test]
fn default_seed_is_documented_constant() {
    let out = fpe(&["verify", "mc", "--family", "diffusion", "--paths", "10000", "--dt", "1e-2"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["details"]["mc"]["seed"], fpe_cli::config::DEFAULT_SEED);
}

#[test]
fn single_family_report_is_an_array() {
    let dir = scratch("report");
    let path = dir.join("all.json");
    let out = fpe(&["report", "--family", "exponential", "--paths", "20000", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    let v: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["suite"], "all");
    assert!(validator().is_valid(&v[0]));
    let names: Vec<String> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert_eq!(names, vec!["all.json".to_string()]);
    std::fs::remove_dir_all(dir).unwrap();
}
