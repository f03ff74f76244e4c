use std::process::{Command, Output};

use serde_json::Value;

fn rk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rk")).args(args).env_remove("RK_PRECISION_BITS").output().expect("rk runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn curves_lists_both_curves() {
    let out = rk(&["curves", "--H", "1", "--I2", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], "rk-1");
}

#[test]
fn trace_is_deterministic() {
    let args = ["verify", "trace", "--H", "1", "--I2", "2", "--seed", "7"];
    let a = rk(&args);
    let b = rk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["pass"], true);
}

#[test]
fn degenerate_parameters_exit_with_one() {
    let out = rk(&["richelot", "--H", "1/2", "--I2", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert!(err["error"].as_str().unwrap().contains("4H² − I2 = 0"), "{err}");
    assert_eq!(err["schema"], "rk-1");
}

#[test]
fn floats_are_refused_for_rational_parameters() {
    let out = rk(&["richelot", "--H", "1.5", "--I2", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precision_above_106_bits_is_a_usage_error() {
    let out = rk(&["verify", "mult2", "--H", "1", "--I2", "2", "--precision", "200"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mult2_reports_the_precision_it_ran_at() {
    let out = rk(&["verify", "mult2", "--H", "1", "--I2", "2", "--samples", "4", "--precision", "106"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["precision_bits"], 106);
    assert_eq!(v["pass"], true);
}

#[test]
fn depth_two_tower_is_exact() {
    let out = rk(&["tower", "--H", "3/2", "--I2", "5", "--depth", "2", "--mode", "exact", "--strategy", "lexicographic-exact"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 2);
    assert!(matches!(v["edges"][0]["delta"].as_str(), Some("1" | "-1")), "{}", v["edges"][0]["delta"]);
    assert_eq!(v["all_verified"], true);
}

#[test]
fn depth_one_tower_is_refused() {
    let out = rk(&["tower", "--H", "3/2", "--I2", "5", "--depth", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn top_simulation_streams_json_lines() {
    let out = rk(&["top", "simulate", "--l", "1,0,1", "--g", "0,1,0", "--t-end", "0.1", "--dt", "1e-3", "--every", "50"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.len() >= 3);
    for key in ["t", "l", "g", "H", "I1", "I2", "gnorm"] {
        assert!(lines[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("rk-igusa-{}.json", std::process::id()));
    let out = rk(&["--out", path.to_str().unwrap(), "igusa", "--curve", "c2", "--H", "1", "--I2", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["schema"], "rk-1");
}
