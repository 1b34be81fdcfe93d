use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

use valuform::docs::{from_value, AlgebraDoc, ModelDoc, TowerDoc};
use valuform::{run, JobSpec, Options};
use valuform_core::models::t_model;
use valuform_core::Limits;

fn cli(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_valuform"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn toric_chart_prints_the_model() {
    let (code, out, _) = cli(&["--compact", "toric-chart", "--m", "1", "--r", "1", "--l", "1"], "");
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"], 2);
    assert_eq!(v["model"]["algebra"]["relations"], json!(["t0'*t1'*v1^2 - pi"]));
    assert_eq!(v["model"]["pair"]["lambda"], json!([1, 1, 2]));
}

#[test]
fn subdivision_of_the_doubled_line() {
    let (code, out, _) =
        cli(&["--compact", "subdivide"], r#"{"pair": {"generators": [[1, 0], [0, 1]], "lambda": [1, 2]}}"#);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"], 2);
    assert_eq!(v["cones"], json!([[[2, 0], [0, 1]]]));
}

#[test]
fn toric_verify_passes() {
    let (code, out, _) = cli(&["--compact", "toric-verify", "--m", "2", "--r", "1", "--l", "1"], "");
    assert_eq!(code, 0, "{out}");
}

#[test]
fn schema_errors_name_the_field() {
    let (code, _, err) = cli(&["gb"], r#"{"vars": ["x"], "generators": ["x"], "colour": 1}"#);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "precondition");
    assert!(v["message"].as_str().unwrap().contains("colour"));
}

#[test]
fn exhausted_caps_exit_three() {
    let input = r#"{"vars": ["x", "y", "z", "w"],
        "generators": ["x + y + z + w", "x*y + y*z + z*w + w*x", "x*y*z + y*z*w + z*w*x + w*x*y", "x*y*z*w - 1"]}"#;
    let (code, _, err) = cli(&["--max-steps", "1", "gb"], input);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn failed_checks_exit_four() {
    let fan = r#"{"pair": {"generators": [[1, 0], [1, 1], [1, 2]], "lambda": [1, 1]},
                  "fan": {"d": 1, "cones": [[[0, 1], [2, -1]]]}}"#;
    let (code, out, _) = cli(&["--compact", "verify-fan"], fan);
    assert_eq!(code, 4, "{out}");
}

#[test]
fn documents_round_trip() {
    let t = t_model(1, 2, 1).unwrap();
    let doc = ModelDoc::of(&t).unwrap();
    let v = serde_json::to_value(&doc).unwrap();
    let back: ModelDoc = from_value(&v).unwrap();
    assert_eq!(serde_json::to_value(&back).unwrap(), v);
    let alg = back.algebra.build(&Limits::default()).unwrap();
    assert_eq!(serde_json::to_value(AlgebraDoc::of(&alg).unwrap()).unwrap(), v["algebra"]);
}

#[test]
fn towers_round_trip_through_replay() {
    let o = Options::default();
    let input = json!({
        "valuation": {
            "algebra": { "vars": ["x", "y", "z"], "relations": ["x*y - z^2"] },
            "weights": [["2", "0", "1"], ["-1", "1", "0"]],
        },
        "boundary": [["y"]],
    });
    let tower = run(&JobSpec { command: "uniformize".into(), op: None, input, options: o.clone() }).unwrap().output;
    let doc: TowerDoc = from_value(&tower).unwrap();
    let again = serde_json::to_value(&doc).unwrap();
    assert_eq!(again, tower);
    let replayed = run(&JobSpec { command: "replay".into(), op: None, input: again, options: o }).unwrap();
    assert!(replayed.passed);
}
