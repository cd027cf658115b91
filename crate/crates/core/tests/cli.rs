use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fundclass"));
    c.env_remove("FUNDCLASS_GUARD_DIGITS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fundclass-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json document")
}

#[test]
fn compute_cyclotomic_document() {
    let out = run(&[
        "compute",
        "--p",
        "5",
        "--family",
        "cyclotomic",
        "--nu",
        "1",
        "--prec",
        "32",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["schema"], "fundclass/1");
    assert_eq!(doc["verification"]["passed"], true);
    assert!(doc["timing"]["millis"].is_string());
    assert_eq!(doc["result"]["kind"], "tuple");
    assert_eq!(doc["result"]["alpha"].as_array().unwrap().len(), 1);
}

#[test]
fn output_is_deterministic_without_timing() {
    let args = [
        "compute",
        "--p",
        "7",
        "--family",
        "tame",
        "--e",
        "3",
        "--f",
        "2",
        "--no-timing",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("timing").is_none());
}

#[test]
fn trivial_extension_has_empty_tuple() {
    let out = run(&[
        "compute",
        "--p",
        "5",
        "--family",
        "unramified",
        "--n",
        "1",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["result"]["alpha"], Value::Array(vec![]));
    assert_eq!(doc["result"]["beta"], Value::Array(vec![]));
}

#[test]
fn tame_beta_table_is_two_by_two() {
    let out = run(&[
        "compute",
        "--p",
        "5",
        "--family",
        "tame",
        "--e",
        "4",
        "--f",
        "2",
        "--route",
        "tame",
        "--no-timing",
    ]);
    let doc = json(&out);
    let beta = doc["result"]["beta"].as_array().unwrap();
    assert_eq!(beta.len(), 2);
    assert!(beta.iter().all(|row| row.as_array().unwrap().len() == 2));
}

#[test]
fn input_errors_exit_2() {
    let out = run(&["compute", "--p", "4", "--family", "unramified", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must be prime"));
    let out = run(&[
        "compute", "--p", "5", "--family", "tame", "--e", "3", "--f", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["compute", "--p", "2", "--family", "cyclotomic", "--nu", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--input", "/nonexistent/doc.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_precision_exits_3() {
    let out = bin()
        .env("FUNDCLASS_GUARD_DIGITS", "0")
        .args([
            "compute",
            "--p",
            "3",
            "--family",
            "cyclotomic",
            "--nu",
            "2",
            "--prec",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision"));
}

#[test]
fn corrupted_cocycle_is_caught_with_witness() {
    let out = run(&[
        "expand",
        "--p",
        "5",
        "--family",
        "unramified",
        "--n",
        "3",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut doc = json(&out);
    let one = doc["result"]["table"]["0|0"].clone();
    doc["result"]["table"]["2|2"] = one;
    let path = scratch("corrupted.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["verify", "--input", path.to_str().unwrap(), "--no-timing"]);
    assert_eq!(out.status.code(), Some(1));
    let re = json(&out);
    assert_eq!(re["verification"]["passed"], false);
    let cocycle = re["verification"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "cocycle")
        .unwrap()
        .clone();
    assert_eq!(cocycle["passed"], false);
    assert_eq!(cocycle["witness"], "1|1|2");
}

#[test]
fn corrupted_tuple_fails_verification() {
    let out = run(&[
        "compute",
        "--p",
        "7",
        "--family",
        "cyclotomic",
        "--nu",
        "1",
        "--no-timing",
    ]);
    let mut doc = json(&out);
    let gamma = doc["result"]["gamma"].clone();
    doc["result"]["alpha"][0] = gamma;
    let path = scratch("corrupted-tuple.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["verify", "--input", path.to_str().unwrap(), "--no-timing"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn artin_reports_image() {
    let out = run(&[
        "artin",
        "--p",
        "5",
        "--family",
        "cyclotomic",
        "--element",
        "2",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["verification"]["passed"], true);
}

#[test]
fn cohomology_oracle_examples() {
    let module = scratch("trivZ4.json");
    std::fs::write(&module, r#"{"factors":[4]}"#).unwrap();
    let out = run(&[
        "cohomology",
        "--group",
        "6",
        "--module",
        module.to_str().unwrap(),
        "--op",
        "h2",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["divisors"], serde_json::json!(["2"]));

    let out = run(&[
        "cohomology",
        "--group",
        "4",
        "--op",
        "genchange",
        "--k",
        "3",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let w = &json(&out)["result"]["witness"];
    assert_eq!(w["degree"], "1");
    assert_eq!(w["values"].as_object().unwrap().len(), 4);

    let out = run(&[
        "cohomology",
        "--group",
        "4",
        "--op",
        "genchange",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format_and_output_file() {
    let path = scratch("tame.txt");
    let out = run(&[
        "compute",
        "--p",
        "5",
        "--family",
        "tame",
        "--e",
        "4",
        "--f",
        "2",
        "--format",
        "text",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("alpha"));
    assert!(text.contains("verification"));
}
