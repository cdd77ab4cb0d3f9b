use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcalg"))
        .args(args)
        .env_remove("TCALG_HECKE_CATALOG")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    (out.status.code().unwrap(), v)
}

#[test]
fn count_csa_three() {
    let (code, v) = json(&["arthur", "count-csa", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["closed"], 2);
    assert_eq!(v["results"]["brute"], 2);
    assert_eq!(v["command"], "arthur count-csa");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], 1);
    assert_eq!(v["fail"], 0);
}

#[test]
fn exponents_of_v1p() {
    let out = run(&["hecke", "exponents", "--module", "V1p", "--case", "G2-unram"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "[(0,1,-1)]");
    let (_, v) = json(&["hecke", "exponents", "--module", "V1p", "--case", "G2-unram"]);
    assert_eq!(v["results"]["modules"][0]["exponents"][0]["re"], serde_json::json!(["0", "1", "-1"]));
}

#[test]
fn verify_all_cases() {
    for case in ["G2-unram", "G2-ram", "B2ext-unram", "B2ext-ram", "D4-split"] {
        let (code, v) = json(&["--q", "4,9", "hecke", "verify", "--case", case]);
        assert_eq!(code, 0, "{case}");
        assert_eq!(v["fail"], 0);
    }
}

#[test]
fn discrete_series_flags() {
    let (_, v) = json(&["hecke", "ds", "--case", "G2-unram"]);
    let ds: Vec<String> = v["results"]["modules"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|m| m["discrete_series"] == true)
        .map(|m| m["module"].as_str().unwrap().to_string())
        .collect();
    for name in ["steinberg", "V1pp", "V2pp", "V3pp"] {
        assert!(ds.contains(&name.to_string()), "{name} in {ds:?}");
    }
    assert!(!ds.contains(&"trivial".to_string()));
}

#[test]
fn im_of_trivial_is_steinberg_exponents() {
    let (_, im) = json(&["hecke", "im", "--case", "G2-unram", "--module", "trivial"]);
    let (_, st) = json(&["hecke", "exponents", "--case", "G2-unram", "--module", "steinberg"]);
    assert_eq!(im["results"]["modules"][0]["exponents"], st["results"]["modules"][0]["exponents"]);
}

#[test]
fn dps_analyze_is_consistent() {
    let (code, v) = json(&["dps", "analyze", "--family", "I", "--case", "G2-unram"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["consistent"], true);
    let pts = v["results"]["reducibility_points"].as_array().unwrap();
    assert!(!pts.is_empty());
}

#[test]
fn selftest_subset_passes() {
    let (code, v) = json(&["--seed", "42", "selftest", "--only", "3,6,7"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], 3);
    assert_eq!(v["results"]["suites"].as_array().unwrap().len(), 3);
}

#[test]
fn cube_reduce_has_reduced_shape() {
    let (code, v) = json(&["--q", "7", "cube", "reduce", "--params", r#"{"K":"field"}"#]);
    assert_eq!(code, 0);
    let c = v["results"]["result"].as_array().unwrap();
    assert_eq!(c.len(), 8);
    assert_eq!(c[0], "1");
}

#[test]
fn rank_two_aut_order() {
    let (code, v) = json(&["tca", "aut", "--params", r#"{"K":"field"}"#]);
    assert_eq!(code, 0);
    assert!(v["results"]["result"]["order"].as_u64().unwrap() > 0);
}

#[test]
fn fixture_passes() {
    let (code, v) = json(&["--q", "7", "jordan", "fixture", "--samples", "30"]);
    assert_eq!(code, 0);
    assert_eq!(v["fail"], 0);
}

#[test]
fn mult_agrees() {
    let (code, v) = json(&["arthur", "mult", "--case", "k_split_chi_generic", "--sizes", "2,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["closed"], v["results"]["brute"]);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["tca", "make", "--rank", "3"]).status.code(), Some(2));
    assert_eq!(run(&["hecke", "exponents", "--module", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["arthur", "mult", "--case", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let (code, v) = json(&["--q", "6", "fields", "describe"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn computational_failure_exits_one() {
    let (code, v) = json(&["cube", "algebra", "--cube", "[1,0,0,0,1,1,1,1]"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "computation");
}

#[test]
fn catalog_from_env() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/hecke_catalog.json");
    let out = Command::new(env!("CARGO_BIN_EXE_tcalg"))
        .args(["hecke", "verify", "--case", "G2-unram"])
        .env("TCALG_HECKE_CATALOG", path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_tcalg"))
        .args(["hecke", "verify"])
        .env("TCALG_HECKE_CATALOG", "/nonexistent/catalog.json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
