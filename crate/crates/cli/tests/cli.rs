use std::process::{Command, Output};

use serde_json::Value;

fn schlicht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schlicht"))
        .args(args)
        .env_remove("SCHLICHT_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = schlicht(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (v, out.status.code().unwrap())
}

fn check_value(v: &Value, name: &str) -> f64 {
    v["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn koebe_check_reaches_the_difference_bound() {
    let (v, code) = json(&["check", "--family", "koebe", "--order", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "schlicht-kit/1");
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["tolerance"], 1e-9);
    assert!(v["generated_at"].is_string());
    assert_eq!(v["report"]["functionId"], "koebe(theta=0)");
    let d = check_value(&v, "|G3|-|G2| <= 11/6");
    assert!((d - 11.0 / 6.0).abs() < 1e-12);
}

#[test]
fn identity_inline_has_vanishing_log_coefficients() {
    let (v, code) = json(&["coeffs", "--inline", "0,0,0", "--order", "4"]);
    assert_eq!(code, 0);
    for key in ["gamma", "Gamma"] {
        let list = v[key].as_array().unwrap();
        assert_eq!(list.len(), 3);
        for e in list {
            assert_eq!(e["value"]["exact"], "0");
        }
    }
    assert_eq!(v["A"][0]["value"]["exact"], "1");
}

#[test]
fn exact_koebe_coefficients() {
    let (v, _) = json(&["coeffs", "--family", "koebe", "--order", "4"]);
    let a: Vec<&str> = v["A"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"]["exact"].as_str().unwrap())
        .collect();
    assert_eq!(a, ["1", "-2", "5", "-14"]);
    let g: Vec<&str> = v["Gamma"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"]["exact"].as_str().unwrap())
        .collect();
    assert_eq!(g, ["-1", "3/2", "-10/3"]);
}

#[test]
fn search_finds_the_convex_lambda_maximizer() {
    let (v, code) = json(&[
        "search",
        "--family",
        "convex_lambda",
        "--functional",
        "G3minusG2",
        "--maximize",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["mode"], "float");
    let arg = v["result"]["argbest"].as_f64().unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((arg - 0.4f64.sqrt()).abs() < 1e-3, "{arg}");
    assert!((value - 2.0 * 10f64.sqrt() / 75.0).abs() < 1e-5, "{value}");
}

#[test]
fn csv_check_rows() {
    let out = schlicht(&["check", "--family", "halfplane", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("functionId,checkName,value,bound,margin,pass")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7);
    assert!(rows
        .iter()
        .all(|r| r.starts_with("halfplane,") && r.ends_with(",true")));
}

#[test]
fn failed_check_exits_one() {
    // a2 = 3 violates the bound on the second coefficient functional.
    let out = schlicht(&["check", "--inline", "3", "--order", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["check", "--order", "4"],
        vec!["check", "--family", "koebe", "--order", "3"],
        vec![
            "coeffs",
            "--family",
            "convex_lambda",
            "--lambda",
            "sqrt(2/5)",
        ],
        vec![
            "coeffs",
            "--family",
            "convex_lambda",
            "--lambda",
            "3/2",
            "--mode",
            "float",
        ],
        vec!["coeffs", "--family", "nope"],
        vec!["check", "--family", "koebe", "--tolerance", "-1"],
        vec!["frobnicate"],
    ] {
        let out = schlicht(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn float_mode_accepts_irrational_lambda() {
    let (v, code) = json(&[
        "check",
        "--family",
        "convex_lambda",
        "--lambda",
        "sqrt(2/5)",
        "--mode",
        "float",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], "convex");
    let d = check_value(&v, "|G3|-|G2| <= 2sqrt(10)/75");
    assert!((d - 2.0 * 10f64.sqrt() / 75.0).abs() < 1e-10);
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_schlicht"))
        .args(["check", "--family", "koebe", "--format", "json"])
        .env("SCHLICHT_TOLERANCE", "1e-6")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tolerance"], 1e-6);
    assert_eq!(v["report"]["tolerance"], 1e-6);
}

#[test]
fn grunsky_reports_structural_residuals() {
    let (v, code) = json(&["grunsky", "--family", "koebe", "--order", "8"]);
    assert_eq!(code, 0);
    assert_eq!(v["structural"]["maxResidual"], 0.0);
    let table = v["table"].as_array().unwrap();
    // Koebe: omega_{1,1} = -1.
    let w11 = table.iter().find(|e| e[0] == 1 && e[1] == 1).unwrap();
    assert_eq!(w11[2][0], -1.0);
    let (odd, _) = json(&["grunsky", "--family", "koebe", "--order", "6", "--odd"]);
    assert!(odd["table"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e[0].as_u64().unwrap() % 2 == 1 && e[1].as_u64().unwrap() % 2 == 1));
}

#[test]
fn out_path_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = schlicht(&[
        "check",
        "--family",
        "halfplane",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "check");
}

#[test]
fn suite_is_deterministic_apart_from_timestamp() {
    let run = || {
        let (mut v, code) = json(&["suite", "--seed", "7"]);
        assert_eq!(code, 0, "suite failed: {v}");
        v.as_object_mut().unwrap().remove("generated_at");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run(), run());
}
