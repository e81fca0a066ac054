use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn problems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn varitri(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_varitri"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn run_file(cmd: &str, file: &str, extra: &[&str]) -> (i32, Value) {
    let path = problems().join(file);
    let mut args = vec![cmd, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let (code, text) = varitri(&args);
    (code, serde_json::from_str(&text).expect("json report"))
}

fn run_text(cmd: &str, json: &str) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("problem.json");
    std::fs::write(&path, json).unwrap();
    let (code, text) = varitri(&[cmd, "--input", path.to_str().unwrap()]);
    (code, serde_json::from_str(&text).expect("json report"))
}

#[test]
fn euler_lagrange_of_half_ux_squared() {
    let (code, r) = run_file("el", "half_ux2.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["euler_lagrange"][0]["expression"], "-u_[2]");
}

#[test]
fn inline_problem_parses() {
    let (code, r) = run_text(
        "el",
        r#"{"base":["x"],"fields":[{"name":"u","ghost":0}],"lagrangian":"1/2*u_[1]^2"}"#,
    );
    assert_eq!(code, 0);
    assert_eq!(r["status"], "done");
}

#[test]
fn arity_and_undeclared_names_are_input_errors() {
    let (code, r) = run_text("el", r#"{"base":["x"],"fields":[{"name":"u"}],"lagrangian":"u_[1,0]"}"#);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("arity"));
    let (code, r) = run_text("el", r#"{"base":["x"],"fields":[{"name":"u"}],"lagrangian":"v"}"#);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("undeclared"));
    let (code, _) = run_text("el", r#"{"base":["x"], "fields": "#);
    assert_eq!(code, 2);
}

#[test]
fn kdv_current() {
    let (code, r) = run_file("current-check", "kdv.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["currents"][0]["holds"], true);
    let (code, r) = run_file("current-check", "kdv_perturbed.json", &[]);
    assert_eq!(code, 1);
    assert_eq!(r["currents"][0]["residues"][0], "6*u*u_[0,1] + u_[0,3]");
}

#[test]
fn kdv_symmetries_and_helmholtz() {
    let (code, r) = run_file("symmetry-check", "kdv.json", &[]);
    assert_eq!(code, 1);
    let holds: Vec<bool> = r["symmetries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["holds"].as_bool().unwrap())
        .collect();
    assert_eq!(holds, [true, true, false]);
    let (code, r) = run_file("helmholtz", "kdv.json", &[]);
    assert_eq!(code, 1);
    assert_eq!(r["variational"], false);
}

#[test]
fn maxwell_commands() {
    let (code, r) = run_file("bv-master", "maxwell.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["master_equation"], true);
    assert_eq!(r["square_zero"], true);
    let (code, r) = run_file("bv-master", "maxwell_corrupted.json", &[]);
    assert_eq!(code, 1);
    assert!(!r["residues"].as_array().unwrap().is_empty());
    let (code, r) = run_file("noether-check", "maxwell.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["identities"][0]["holds"], true);
    let (code, r) = run_file("kt", "maxwell.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["delta"][2]["image"], "Atstar_[1,0] + Axstar_[0,1]");
    let (_, r) = run_file("bv-h0", "maxwell.json", &[]);
    let reps: Vec<&str> = r["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["representative"].as_str().unwrap())
        .collect();
    assert!(reps.contains(&"-At_[0,1] + Ax_[1,0]"), "{reps:?}");
}

#[test]
fn cohomology_commands() {
    let (code, r) = run_file("cohomology", "free_kt.json", &[]);
    assert_eq!(code, 0);
    let e = &r["table"]["entries"][0];
    assert_eq!(
        (e["degree"].as_i64(), e["betti"].as_i64(), e["certified"].as_bool()),
        (Some(-1), Some(0), Some(true))
    );
    let (_, r) = run_file("cohomology", "free_vertical.json", &[]);
    for e in r["table"]["entries"].as_array().unwrap() {
        if e["degree"].as_i64().unwrap() >= 1 {
            assert_eq!(e["betti"], 0);
            assert_eq!(e["certified"], true);
        }
    }
}

#[test]
fn evaluation_brackets_and_presymplectic() {
    assert_eq!(run_file("eval", "eval_u2.json", &[]).1["value"], "1/3");
    assert_eq!(run_file("eval", "eval_ux2.json", &[]).1["value"], "4/3");
    let (code, r) = run_file("bracket", "schouten.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["result"], "0");
    let (code, r) = run_file("presymplectic", "half_ux2.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["boundary"], "u_[1]*th(u)");
    assert_eq!(r["omega"], "-th(u)^th(u,[1])");
}

#[test]
fn closure_modes_and_depth() {
    let (code, r) = run_file("closure", "closure.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["closed"], true);
    let (code, r) = run_file("closure", "closure.json", &["--depth", "0", "--mode", "strict"]);
    assert_eq!(code, 1);
    assert_eq!(r["closed"], false);
    let (code, r) = run_file("closure", "closure.json", &["--depth", "0", "--mode", "to-depth"]);
    assert_eq!(code, 0);
    assert!(r["relations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|rel| rel["status"] == "unresolved"));
}

#[test]
fn latex_output() {
    let path = problems().join("half_ux2.json");
    let (code, text) = varitri(&["el", "--input", path.to_str().unwrap(), "--output", "latex"]);
    assert_eq!(code, 0);
    assert!(text.contains("$-u_{xx}$"));
    assert!(text.starts_with("\\begin{description}"));
}

#[test]
fn reports_are_deterministic() {
    let path = problems().join("maxwell.json");
    let p = path.to_str().unwrap();
    let (_, a) = varitri(&["bv-h0", "--input", p, "--threads", "1"]);
    let (_, b) = varitri(&["bv-h0", "--input", p, "--threads", "4"]);
    let (_, c) = varitri(&["bv-h0", "--input", p]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}
