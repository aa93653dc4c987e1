use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn g2lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2lab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn build(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(format!("{name}.json"));
    let p = path.to_str().unwrap().to_string();
    let mut all = vec!["build"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--output", &p]);
    let o = g2lab(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn classify_case(input: &str) -> (i32, Value) {
    let o = g2lab(&["classify", "--input", input]);
    let v = if o.stdout.is_empty() { Value::Null } else { stdout_json(&o) };
    (code(&o), v)
}

fn write_group(dir: &Path, name: &str, diag: &[&str]) -> String {
    let gen: Vec<Vec<Value>> = (0..7)
        .map(|i| (0..7).map(|j| if i == j { json!([diag[i]]) } else { json!(["0"]) }).collect())
        .collect();
    let doc = json!({"schema": "g2lab/1", "field": {"m": 1, "sqrts": []}, "dim": 7, "generators": [gen]});
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, doc.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn poly_g2_verdicts() {
    let o = g2lab(&["poly-g2", "1", "-7", "21", "-35", "35", "-21", "7", "-1"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "g2lab/1");
    assert_eq!(v["type_g2"], true);
    assert_eq!(v["abc"], json!([["6/1"], ["12/1"], ["8/1"]]));

    let o = g2lab(&["poly-g2", "1", "0", "0", "0", "0", "0", "0", "-2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["type_g2"], false);

    // (t−1)(t+1)⁶: s = −2 three times gives a = −6, b = 12, c = −8, and 36 ≠ 24 − 8 + 4.
    let o = g2lab(&["poly-g2", "1", "5", "9", "5", "-5", "-9", "-5", "-1"]);
    assert_eq!(stdout_json(&o)["type_g2"], false);

    let o = g2lab(&["poly-g2", "2", "-14", "42", "-70", "70", "-42", "14", "-2"]);
    assert_eq!(stdout_json(&o)["type_g2"], true);
}

#[test]
fn poly_g2_usage_errors() {
    assert_eq!(code(&g2lab(&["poly-g2", "1", "-6", "15", "-20", "15", "-6", "1"])), 2);
    assert_eq!(code(&g2lab(&["poly-g2", "1", "x", "0", "0", "0", "0", "0", "-1"])), 2);
    assert_eq!(code(&g2lab(&["poly-g2", "0", "1", "0", "0", "0", "0", "0", "-1"])), 2);
    assert_eq!(code(&g2lab(&["no-such-command"])), 2);
}

#[test]
fn built_families_classify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases = [
        ("alpha", vec!["--family", "alpha"], "C_z4xz2"),
        ("beta-sl", vec!["--family", "beta-sl"], "B_gl2_or_sl2"),
        ("beta-gl", vec!["--family", "beta-gl"], "B_gl2_or_sl2"),
        ("gamma-d8", vec!["--family", "gamma", "--preset", "d8"], "A_contained"),
        ("torus", vec!["--family", "torus", "--n1", "3", "--n2", "4"], "A_contained"),
        ("sample", vec!["--family", "g2sample", "--seed", "5"], "A_contained"),
    ];
    for (name, args, expect) in cases {
        let p = build(d, name, &args);
        let (c, v) = classify_case(&p);
        assert_eq!(c, 0, "{name}");
        assert_eq!(v["case"], expect, "{name}");
        assert_eq!(v["elementwise_g2"], true, "{name}");
    }
}

#[test]
fn classify_report_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = build(dir.path(), "alpha", &["--family", "alpha"]);
    let r = dir.path().join("report.json");
    let o = g2lab(&["classify", "--input", &p, "--report", r.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&r).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["order"], 8);
    assert_eq!(v["witt_index"], 2);
    assert_eq!(v["evidence"]["kind"], "z4xz2");
    let back = g2lab::json::report_from_json(&v).unwrap();
    assert_eq!(g2lab::json::report_to_json(&back).unwrap(), v);
}

#[test]
fn build_is_deterministic() {
    let a = g2lab(&["build", "--family", "g2sample", "--seed", "11"]);
    let b = g2lab(&["build", "--family", "g2sample", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn not_elementwise_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_group(dir.path(), "rot", &["-1", "-1", "1", "1", "1", "1", "1"]);
    let o = g2lab(&["classify", "--input", &p, "--witnesses"]);
    assert_eq!(code(&o), 3);
    let v = stdout_json(&o);
    assert_eq!(v["elementwise_g2"], false);
    assert!(v["case"].is_null());
    assert!(v["witnesses"]["failing_matrix"].is_array());
}

#[test]
fn g2_involution_is_contained() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_group(dir.path(), "inv", &["-1", "-1", "-1", "-1", "1", "1", "1"]);
    let (c, v) = classify_case(&p);
    assert_eq!(c, 0);
    assert_eq!(v["case"], "A_contained");
}

#[test]
fn bad_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = build(d, "alpha", &["--family", "alpha"]);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    v["schema"] = json!("g2lab/0");
    let bad_schema = d.join("schema.json");
    fs::write(&bad_schema, v.to_string()).unwrap();
    assert_eq!(code(&g2lab(&["classify", "--input", bad_schema.to_str().unwrap()])), 2);

    let garbage = d.join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    assert_eq!(code(&g2lab(&["classify", "--input", garbage.to_str().unwrap()])), 2);

    let det_minus = write_group(d, "reflection", &["-1", "1", "1", "1", "1", "1", "1"]);
    assert_eq!(code(&g2lab(&["classify", "--input", &det_minus])), 2);

    assert_eq!(code(&g2lab(&["classify", "--input", d.join("missing.json").to_str().unwrap()])), 2);
    assert_eq!(code(&g2lab(&["build", "--family", "gamma", "--preset", "no-such-preset"])), 2);
}

#[test]
fn order_cap_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let p = build(dir.path(), "beta", &["--family", "beta-gl"]);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    v["cap"] = json!(10);
    fs::write(&p, v.to_string()).unwrap();
    assert_eq!(code(&g2lab(&["classify", "--input", &p])), 5);
}

#[test]
fn witt_index_and_repring() {
    let dir = tempfile::tempdir().unwrap();
    let p = build(dir.path(), "beta-sl", &["--family", "beta-sl"]);
    let o = g2lab(&["witt-index", "--input", &p]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["witt_index"], 3);
    assert_eq!(v["isotropic_basis"].as_array().unwrap().len(), 3);

    let o = g2lab(&["repring-check", "--input", &p]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["identity_holds"], true);
    assert_eq!(v["order"], 24);
}

#[test]
fn verify_suite_fast_is_green_and_repeatable() {
    let a = g2lab(&["verify-suite", "--level", "fast", "--seed", "0"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    let text = String::from_utf8_lossy(&a.stdout);
    for id in 1..=12 {
        assert!(text.contains(&format!("PASS [{id}]")), "criterion {id} missing or red:\n{text}");
    }
    assert!(!text.contains("FAIL"));
    let b = g2lab(&["verify-suite", "--level", "fast", "--seed", "0"]);
    assert_eq!(a.stdout, b.stdout);
}
