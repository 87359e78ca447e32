use std::process::{Command, Output};

use serde_json::Value;

fn shorsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shorsim"))
        .args(args)
        .env_remove("SHORSIM_OUT_DIR")
        .env_remove("SHORSIM_TEST_MODE")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn dist_csv_for_q256_r10() {
    let out = shorsim(&["dist", "--q", "256", "--r", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,probability");
    assert_eq!(lines.len(), 257);
    assert_eq!(lines[1], "0,0.100036621094");
    let probs: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!((probs[25] - 0.0255).abs() < 1e-4);
    assert!((probs[26] - 0.0573).abs() < 1e-4);
    assert_eq!(probs[0], probs[128]);
    // 12 significant digits, decimal notation
    for l in &lines[1..] {
        let v = l.split(',').nth(1).unwrap();
        assert!(!v.contains('e'));
        if v != "0" {
            let digits: String = v.chars().filter(|c| c.is_ascii_digit()).collect();
            assert_eq!(digits.trim_start_matches('0').len(), 12, "{v}");
        }
    }
}

#[test]
fn dist_trivial_order() {
    let out = shorsim(&["dist", "--q", "4", "--r", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "c,probability\n0,1.00000000000\n1,0\n2,0\n3,0\n");
}

#[test]
fn dist_is_byte_identical() {
    let a = shorsim(&["dist", "--q", "1024", "--r", "7"]);
    let b = shorsim(&["dist", "--q", "1024", "--r", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dist_rejects_bad_q() {
    assert_eq!(shorsim(&["dist", "--q", "100", "--r", "10"]).status.code(), Some(2));
    assert_eq!(shorsim(&["dist", "--q", "16", "--r", "16"]).status.code(), Some(2));
}

#[test]
fn order_33_5() {
    let out = shorsim(&["order", "--n", "33", "--x", "5", "--seed", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["order"], 10);
    assert_eq!(v["seed"], 1);
    assert_eq!(v["config"]["n"], 33);
    assert!(!v["result"]["trials"].as_array().unwrap().is_empty());
}

#[test]
fn order_gate_level_with_reduced_q_warns() {
    let out = shorsim(&["order", "--n", "33", "--x", "5", "--q", "256", "--backend", "gate-level", "--seed", "4"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(json(&out)["result"]["order"], 10);
}

#[test]
fn factor_15() {
    for seed in ["1", "2", "3"] {
        let out = shorsim(&["factor", "--n", "15", "--seed", seed]);
        assert!(out.status.success());
        let d = json(&out)["result"]["divisor"].as_u64().unwrap();
        assert!(d == 3 || d == 5);
    }
}

#[test]
fn factor_preconditions_exit_2() {
    for n in ["16", "13", "27"] {
        let out = shorsim(&["factor", "--n", n, "--seed", "1"]);
        assert_eq!(out.status.code(), Some(2), "n={n}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["kind"], "precondition");
    }
}

#[test]
fn dlog_11_2_9() {
    let out = shorsim(&["dlog", "--p", "11", "--g", "2", "--target", "9", "--seed", "1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["r"], 6);
}

#[test]
fn dlog_budget_exhausted_exit_3() {
    let out = shorsim(&["dlog", "--p", "23", "--g", "5", "--target", "2", "--trials", "2", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["status"], "budget_exhausted");
    assert_eq!(v["result"]["trials"].as_array().unwrap().len(), 2);
}

#[test]
fn dlog_rejects_non_generator() {
    let out = shorsim(&["dlog", "--p", "11", "--g", "3", "--target", "9", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_same_report() {
    let args = ["factor", "--n", "55", "--seed", "77"];
    assert_eq!(shorsim(&args).stdout, shorsim(&args).stdout);
}

#[test]
fn test_mode_requires_seed() {
    let out = Command::new(env!("CARGO_BIN_EXE_shorsim"))
        .args(["order", "--n", "15", "--x", "7"])
        .env("SHORSIM_TEST_MODE", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = shorsim(&["order", "--n", "15", "--x", "7"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed: "));
}

#[test]
fn verify_bounds_instances() {
    for args in [
        &["verify-bounds", "--n", "33", "--x", "5", "--q", "2048"][..],
        &["verify-bounds", "--p", "11", "--g", "2", "--target", "9"][..],
        &["verify-bounds", "--q", "256", "--r", "10"][..],
    ] {
        let out = shorsim(args);
        assert!(out.status.success(), "{args:?}");
        let v = json(&out);
        assert_eq!(v["status"], "pass");
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }
    let v = json(&shorsim(&["verify-bounds", "--n", "33", "--x", "5", "--q", "2048"]));
    let mass = &v["checks"][1];
    assert_eq!(mass["name"], "order.good_d_mass");
    assert!((mass["bound"].as_f64().unwrap() - 4.0 / 30.0).abs() < 1e-15);
    let v = json(&shorsim(&["verify-bounds", "--p", "11", "--g", "2", "--target", "9"]));
    assert!((v["checks"][2]["bound"].as_f64().unwrap() - 11.0 / 3840.0).abs() < 1e-15);
}

#[test]
fn verify_bounds_needs_an_instance() {
    assert_eq!(shorsim(&["verify-bounds", "--n", "33"]).status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_shorsim"))
        .args(["dist", "--q", "64", "--r", "5"])
        .env("SHORSIM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("dist_q64_r5.csv")).unwrap();
    assert!(text.starts_with("c,probability\n"));

    let file = dir.path().join("explicit.json");
    let out = shorsim(&["dlog", "--p", "11", "--g", "2", "--target", "1", "--seed", "3", "--out", file.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    assert_eq!(v["result"]["r"], 0);
}

#[test]
fn csv_refused_for_run_commands() {
    assert_eq!(shorsim(&["order", "--n", "15", "--x", "7", "--seed", "1", "--format", "csv"]).status.code(), Some(2));
}
