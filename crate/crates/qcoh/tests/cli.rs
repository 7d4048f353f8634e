use std::process::{Command, Output};

use serde_json::Value;

fn qcoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoh")).args(args).env_remove("QCOH_DEFAULT_BOX").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn localize_emits_rational_strings() {
    let out = qcoh(&["localize", "--k", "2", "--z", "-1", "--dmax", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    let text = v.to_string();
    for c in ["\"1/1\"", "\"17/8\"", "\"325/27\"", "\"6545/64\""] {
        assert!(text.contains(c), "{c} missing from {text}");
    }
}

#[test]
fn output_is_byte_stable() {
    let a = qcoh(&["jfun", "--preset", "F3", "--box", "2,2"]);
    let b = qcoh(&["jfun", "--preset", "F3", "--box", "2,2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn errors_are_json_objects() {
    let out = qcoh(&["ring", "--preset", "Y7"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).or_else(|_| serde_json::from_slice(&out.stderr)).unwrap();
    assert_eq!(v["error"]["kind"], "Invalid");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qcoh(&["localize", "--k"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    for suite in ["x1", "kf3"] {
        let out = qcoh(&["verify", "--suite", suite]);
        assert!(out.status.success(), "{suite}");
        assert_eq!(json(&out)["pass"], true);
    }
}

#[test]
fn default_box_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qcoh"))
        .args(["ifun", "--preset", "P1"])
        .env("QCOH_DEFAULT_BOX", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["box"], serde_json::json!([2]));
}
