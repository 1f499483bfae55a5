use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bft"))
        .args(args)
        .env_remove("BFT_SEED")
        .output()
        .expect("run bft")
}

fn ok_json(args: &[&str]) -> Value {
    let out = bft(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&v).expect("valid schema")
}

fn assert_valid(schema_name: &str, v: &Value) {
    let s = schema(schema_name);
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema_name}: {msgs:?}");
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("bft-cli-{}-{name}", std::process::id()))
}

#[test]
fn bounds_at_threshold_point() {
    let v = ok_json(&["bounds", "--n", "11", "--r", "11", "--epsilon", "2.5e-3", "--bias", "1e4"]);
    assert_valid("bounds.schema.json", &v);
    assert!(v["cnot"]["eps_total"].as_f64().unwrap() <= 6.7e-4);
    assert_eq!(v["injection"]["pass"], true);
}

#[test]
fn bounds_zero_noise_and_flagged() {
    let v = ok_json(&["bounds", "--epsilon", "0", "--bias", "1e4", "--t", "5"]);
    assert_valid("bounds.schema.json", &v);
    for key in ["eps_nd", "eps_mzz", "eps_mzzz", "eps_mx1", "eps_mx2", "eps_d", "eps_total"] {
        assert_eq!(v["cnot"][key], 0.0, "{key}");
    }
    assert_eq!(v["flagged"]["eps_cond_accept"], 0.0);
}

#[test]
fn bounds_rejects_even_n() {
    let out = bft(&["bounds", "--n", "4", "--epsilon", "1e-3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn threshold_reproduces_quoted_values() {
    let v = ok_json(&["threshold", "--bias", "1e4"]);
    assert_valid("threshold.schema.json", &v);
    assert_eq!(v["best_params"]["n"], 11);
    assert!((v["eps_max"].as_f64().unwrap() - 2.50e-3).abs() < 0.01e-3);
    let v = ok_json(&["threshold", "--bias", "1e3"]);
    assert_eq!(v["best_params"]["n"], 7);
    assert!((v["eps_max"].as_f64().unwrap() - 1.54e-3).abs() < 0.01e-3);
}

#[test]
fn threshold_zero_target() {
    let out = bft(&["threshold", "--bias", "1e4", "--target", "0"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid("threshold.schema.json", &v);
    assert_eq!(v["eps_max"], 0.0);
    assert!(v["diagnostic"].is_string());
    assert!(!out.stderr.is_empty());
}

fn sweep_rows(text: &[u8]) -> Vec<(f64, f64, usize, f64)> {
    let mut r = csv::Reader::from_reader(text);
    assert_eq!(r.headers().unwrap(), vec!["epsilon", "bias", "n_opt", "eps1"]);
    r.deserialize().map(|row| row.unwrap()).collect()
}

#[test]
fn sweep_default_grid() {
    let out = bft(&["sweep"]);
    assert!(out.status.success());
    let rows = sweep_rows(&out.stdout);
    assert_eq!(rows.len(), 200);
    let at = |e: f64, b: f64| rows.iter().find(|r| r.0 == e && r.1 == b).copied().unwrap();
    let hi = at(2.5e-3, 1e4);
    assert!(hi.3 <= 6.7e-4 && hi.2 == 11);
    let lo = at(1.54e-3, 1e3);
    assert!(lo.3 <= 6.7e-4 && lo.2 == 7);
    let (a, b) = rows.split_at(100);
    for (x, y) in a.iter().zip(b) {
        assert_eq!(x.0, y.0);
        assert!(y.3 <= x.3, "bias 1e4 above bias 1e3 at {}", x.0);
    }
}

#[test]
fn sweep_single_point_and_guide() {
    let out = bft(&["sweep", "--epsilon", "2.5e-3", "--bias", "1e4"]);
    assert_eq!(sweep_rows(&out.stdout).len(), 1);
    let out = bft(&["sweep", "--points", "5", "--guide"]);
    let rows = sweep_rows(&out.stdout);
    assert_eq!(rows.len(), 15);
    assert!(rows[10..].iter().all(|r| r.1 == 0.0 && r.0 == r.3));
}

#[test]
fn simulate_is_deterministic_and_valid() {
    let args = ["simulate", "--gadget", "cnot", "--n", "3", "--epsilon", "1e-2", "--bias", "1e2", "--trials", "20000", "--seed", "5"];
    let a = bft(&args);
    let b = bft(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_valid("sim_result.schema.json", &v);
    for key in ["trials", "failures", "failure_rate", "ci_lo", "ci_hi", "seed", "gadget", "params"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn simulate_below_bound() {
    let v = ok_json(&["simulate", "--gadget", "cnot", "--n", "7", "--epsilon", "1.54e-3", "--bias", "1e3", "--trials", "1e6", "--preceding-r", "7"]);
    assert_valid("sim_result.schema.json", &v);
    let b = ok_json(&["bounds", "--n", "7", "--epsilon", "1.54e-3", "--bias", "1e3"]);
    assert!(v["ci_hi"].as_f64().unwrap() <= b["cnot"]["eps_total"].as_f64().unwrap());
}

#[test]
fn simulate_zero_noise_and_postselection() {
    for g in ["meas_zl", "error_correct", "cnot", "bell_prep", "bell_meas"] {
        let v = ok_json(&["simulate", "--gadget", g, "--n", "3", "--t", "3", "--epsilon", "0", "--trials", "1000"]);
        assert_eq!(v["failures"], 0, "{g}");
    }
    let v = ok_json(&["simulate", "--gadget", "bell_prep", "--n", "5", "--t", "3", "--epsilon", "1e-2", "--trials", "1e4"]);
    assert_valid("sim_result.schema.json", &v);
    assert!(v["conditional_failure_rate"].is_number());
    assert!(v["accepted"].as_u64().unwrap() < 10_000);
}

#[test]
fn simulate_csv_row() {
    let out = bft(&["simulate", "--gadget", "meas_zl", "--n", "3", "--epsilon", "1e-2", "--trials", "1000", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("gadget,n,epsilon,epsilon_prime,trials,failures,failure_rate,ci_lo,ci_hi,seed"));
}

#[test]
fn verify_suites() {
    let out = bft(&["verify", "--suite", "small", "--trials", "1e5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid("verify.schema.json", &v);
    assert_eq!(v["all_pass"], true);

    let out = bft(&["verify", "--suite", "large"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));

    for args in [&["verify"][..], &["verify", "--suite", ""][..]] {
        let out = bft(args);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("--suite"));
    }
}

#[test]
fn config_file_env_seed_and_out() {
    let cfg = tmp("run.cfg");
    std::fs::write(&cfg, "gadget = meas_zl\nn = 3\nr = 3\nepsilon = 1e-2\ntrials = 5000\nseed = 11\n").unwrap();
    let path = cfg.to_str().unwrap();
    let a = ok_json(&["simulate", "--config", path]);
    assert_eq!(a["seed"], 11);
    assert_eq!(a["params"]["n"], 3);
    let b = ok_json(&["simulate", "--config", path, "--seed", "12", "--n", "5"]);
    assert_eq!((b["seed"].as_u64(), b["params"]["n"].as_u64()), (Some(12), Some(5)));

    std::fs::write(&cfg, "gadget = meas_zl\nn = 3\nepsilon = 1e-2\ntrials = 5000\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bft"))
        .args(["simulate", "--config", path])
        .env("BFT_SEED", "77")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 77);

    let dest = tmp("out.json");
    let out = bft(&["simulate", "--config", path, "--out", dest.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["trials"], 5000);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(bft(&["simulate", "--config", path]).status.code(), Some(2));
    std::fs::remove_file(&cfg).ok();
    std::fs::remove_file(&dest).ok();
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bft(&["simulate", "--trials", "lots"]).status.code(), Some(2));
    assert_eq!(bft(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bft(&["bounds", "--epsilon", "1e-3", "--bias", "0.5"]).status.code(), Some(2));
    assert!(bft(&["--help"]).status.success());
}
