use std::process::{Command, Output};

use darbouxkit::io::{from_json, FamilyJson, GaugeJson};
use darbouxkit::Expr;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = Command::new(env!("CARGO_BIN_EXE_darbouxkit")).args(args).output().expect("binary runs");
    let doc = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), doc, out)
}

fn checks_named(doc: &Value) -> Vec<String> {
    doc["checks"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap().to_string()).collect()
}

#[test]
fn oscillator_step_lowers_the_potential() {
    let (code, doc, _) = run(&["darboux", "apply", "--family", r#"{"q": "1 - x^2"}"#, "--theta0", "-x", "--check"]);
    assert_eq!(code, 0, "{doc}");
    assert_eq!(doc["pass"], true);
    let fam: FamilyJson = serde_json::from_value(doc["result"]["family"].clone()).unwrap();
    let q = fam.to_family().unwrap().q().clone();
    assert_eq!(q, -Expr::x().pow(2) - 1);
    assert!(checks_named(&doc).contains(&"step_companion".to_string()));
    assert_eq!(doc["seed"], 20240611);
}

#[test]
fn family_file_and_out_path() {
    let dir = std::env::temp_dir().join(format!("dk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let fam = dir.join("osc.json");
    std::fs::write(&fam, r#"{"q": "1 - x^2"}"#).unwrap();
    let out = dir.join("chain.json");
    let (code, _, o) = run(&[
        "darboux", "chain", "--family", fam.to_str().unwrap(), "--theta0", "-x", "--k", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let steps = doc["result"]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 4);
    let last: FamilyJson = serde_json::from_value(steps[3]["family"].clone()).unwrap();
    assert_eq!(last.to_family().unwrap().q().clone(), -Expr::x().pow(2) - 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn emitted_family_reingests() {
    let (_, doc, _) = run(&["darboux", "apply", "--family", r#"{"q": "x", "r": "x^2 + 1"}"#]);
    let text = doc["result"]["family"].to_string();
    let a = from_json::<FamilyJson>(&text).unwrap();
    let b = FamilyJson::from_family(&a.to_family().unwrap());
    assert_eq!(a, b);
}

#[test]
fn rigid_gauge_has_the_expected_shape() {
    let (code, doc, _) = run(&["so3", "darboux", "--route", "Q", "--rigid", "--omega2", "2-i*w1"]);
    assert_eq!(code, 0, "{doc}");
    let g: GaugeJson = serde_json::from_value(doc["result"]["gauge"].clone()).unwrap();
    assert_eq!(g.matrix.len(), 3);
    // bottom-right entry of T1 is m + 2 theta^2
    let e = Expr::parse(&g.matrix[2][2], &[]).unwrap();
    assert_eq!(e, Expr::param("m") + Expr::sym("theta0").pow(2) * 2);
    for c in ["diagram_commutes", "factorization"] {
        assert!(checks_named(&doc).contains(&c.to_string()));
    }
}

#[test]
fn route_constraint_is_malformed_input() {
    let (code, doc, o) = run(&["rigid", "build", "--route", "Q"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["kind"], "malformed_input");
    assert!(String::from_utf8_lossy(&o.stderr).contains("route constraint"));
}

#[test]
fn malformed_inputs_exit_two() {
    assert_eq!(run(&["darboux", "apply", "--family", "{not json"]).0, 2);
    assert_eq!(run(&["darboux", "apply", "--family", "/nonexistent/f.json"]).0, 2);
    assert_eq!(run(&["so3", "lift", "--family", r#"{"q": "x"}"#, "--route", "R"]).0, 2);
    assert_eq!(run(&["verify", "--tol", "-1"]).0, 2);
    assert_eq!(run(&["darboux", "apply", "--family", r#"{"q": "x +"}"#]).0, 2);
}

#[test]
fn bad_seed_is_a_failure() {
    let (code, doc, _) = run(&["darboux", "apply", "--family", r#"{"q": "1 - x^2"}"#, "--theta0", "x^3"]);
    assert_eq!(code, 1);
    assert_eq!(doc["error"]["kind"], "failure");
}

#[test]
fn susy_commands() {
    let (code, doc, _) = run(&["susy", "spectrum", "--n", "4"]);
    assert_eq!(code, 0, "{doc}");
    let e: Vec<_> = doc["result"]["energies"].as_array().unwrap().iter().map(|v| v["text"].as_str().unwrap().to_string()).collect();
    assert_eq!(e, ["0", "2", "4", "6"]);
    let (code, doc, _) = run(&["susy", "states", "--n", "3", "--order", "3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 4);
    assert_eq!(run(&["susy", "states", "--order", "4"]).0, 2);
}

#[test]
fn verify_group_and_failure_exit() {
    let (code, doc, _) = run(&["verify", "--only", "rk4"]);
    assert_eq!(code, 0, "{doc}");
    assert_eq!(doc["result"]["count"], 2);
    // a coarse step pushes the closed-form error past its fixed tolerance
    let (code, doc, _) = run(&["verify", "--only", "rk4", "--step", "0.1"]);
    assert_eq!(code, 1);
    assert_eq!(doc["pass"], false);
    assert!(doc["checks"][0]["max_residual"].as_f64().unwrap() > 1e-10);
}

#[test]
fn deterministic_runs() {
    let args = ["darboux", "apply", "--family", r#"{"q": "x"}"#, "--check", "--seed", "7"];
    assert_eq!(run(&args).1, run(&args).1);
}
