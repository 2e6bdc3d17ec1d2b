use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("invalid JSON ({e}): {}", self.stdout))
    }
}

fn geokit(args: &[&str]) -> Run {
    geokit_env(args, &[])
}

fn geokit_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_geokit"));
    cmd.args(args).env_remove("GEOKIT_TOL_REL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
    }
}

fn fixture(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const DOUBLE_INTEGRATOR: &str = r#"{"A": [[0, 1], [0, 0]], "B": [[0], [1]]}"#;
const WITH_OUTPUT: &str = r#"{"A": [[0, 1], [0, 0]], "B": [[0], [1]], "C": [[0, 1]], "D": [[0]]}"#;

#[test]
fn zeros_fixture() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", WITH_OUTPUT);
    let r = geokit(&["zeros", f.to_str().unwrap(), "--json-indent", "0"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains(r#""result":{"zeros":[{"re":0.0,"im":0.0}]}"#), "{}", r.stdout);
    let v = r.json();
    assert_eq!(v["op"], "zeros");
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn reach_fixture() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", r#"{"A": [[1, 0], [0, 2]], "B": [[1], [0]]}"#);
    let r = geokit(&["reach", f.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"]["dim"], 1);
}

#[test]
fn place_fixture() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", DOUBLE_INTEGRATOR);
    let r = geokit(&["place", f.to_str().unwrap(), "--lambdas=-1,-2"]);
    assert_eq!(r.code, 0);
    let row = &r.json()["result"]["F"][0];
    assert!((row[0].as_f64().unwrap() + 2.0).abs() <= 1e-9);
    assert!((row[1].as_f64().unwrap() + 3.0).abs() <= 1e-9);
}

#[test]
fn place_complex_pair() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", DOUBLE_INTEGRATOR);
    let r = geokit(&["place", f.to_str().unwrap(), "--lambdas", "-1+1i,-1-1i"]);
    assert_eq!(r.code, 0);
    let row = &r.json()["result"]["F"][0];
    // s^2 + 2s + 2
    assert!((row[0].as_f64().unwrap() + 2.0).abs() <= 1e-9);
    assert!((row[1].as_f64().unwrap() + 2.0).abs() <= 1e-9);
}

#[test]
fn every_subcommand_reports() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", WITH_OUTPUT);
    let f = f.to_str().unwrap();
    for op in ["reach", "unobs", "vstar", "sstar", "rstar", "zeros", "uncontrollable", "morse", "minspec", "friend"] {
        let r = geokit(&[op, f]);
        assert_eq!(r.code, 0, "{op}: {}", r.stdout);
        let v = r.json();
        assert_eq!(v["op"], op);
        assert!(v["result"].is_object() && v["diagnostics"].is_object());
        assert!(v.get("error").is_none());
    }
    let r = geokit(&["kh", f, "--lambdas=-1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", WITH_OUTPUT);
    let args = ["morse", f.to_str().unwrap()];
    assert_eq!(geokit(&args).stdout, geokit(&args).stdout);
    let v = ["verify", "th1", "--trials", "4", "--seed", "5"];
    assert_eq!(geokit(&v).stdout, geokit(&v).stdout);
}

#[test]
fn digest_tracks_options() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", DOUBLE_INTEGRATOR);
    let f = f.to_str().unwrap();
    let a = geokit(&["reach", f]).json()["inputs_digest"].clone();
    let b = geokit(&["reach", f, "--tol-abs", "1e-7"]).json()["inputs_digest"].clone();
    assert_ne!(a, b);
}

#[test]
fn indentation_flag() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", DOUBLE_INTEGRATOR);
    let f = f.to_str().unwrap();
    assert_eq!(geokit(&["reach", f, "--json-indent", "0"]).stdout.lines().count(), 1);
    assert!(geokit(&["reach", f, "--json-indent", "4"]).stdout.contains("\n    \"op\""));
    assert!(geokit(&["reach", f]).stdout.contains("\n  \"op\""));
}

#[test]
fn tolerance_environment_override() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", DOUBLE_INTEGRATOR);
    let f = f.to_str().unwrap();
    let r = geokit_env(&["reach", f], &[("GEOKIT_TOL_REL", "1e-9")]);
    assert_eq!(r.json()["diagnostics"]["tol"]["rel"], 1e-9);
    let r = geokit_env(&["reach", f, "--tol-rel", "1e-10"], &[("GEOKIT_TOL_REL", "1e-9")]);
    assert_eq!(r.json()["diagnostics"]["tol"]["rel"], 1e-10);
    assert_eq!(geokit(&["reach", f]).json()["diagnostics"]["tol"]["rel"], 1e-11);
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("bad.json", "{\"A\": [[0, 1]"),
        ("ragged.json", r#"{"A": [[0, 1], [0]], "B": [[0], [1]]}"#),
        ("nan.json", r#"{"A": [[0, "NaN"], [0, 0]], "B": [[0], [1]]}"#),
        ("shape.json", r#"{"A": [[0, 1], [0, 0]], "B": [[1]]}"#),
    ];
    for (name, body) in cases {
        let f = fixture(dir.path(), name, body);
        let r = geokit(&["reach", f.to_str().unwrap()]);
        assert_eq!(r.code, 1, "{name}");
        assert!(r.json()["error"]["kind"].is_string(), "{name}");
    }
    let r = geokit(&["reach", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let f = fixture(dir.path(), "di.json", DOUBLE_INTEGRATOR);
    for lambdas in ["--lambdas=-1,-1", "--lambdas=-1+1i", "--lambdas=abc"] {
        let r = geokit(&["place", f.to_str().unwrap(), lambdas]);
        assert_eq!(r.code, 1, "{lambdas}");
        assert!(r.json()["error"].is_object());
    }
    let r = geokit(&["rstar", f.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["error"]["kind"], "no_output");
}

#[test]
fn unknown_subcommand_and_flag() {
    assert_eq!(geokit(&["frobnicate"]).code, 1);
    let r = geokit(&["reach", "x.json", "--bogus"]);
    assert_eq!(r.code, 1);
    assert!(r.json()["error"].is_object());
}

#[test]
fn unassignable_spectrum_exits_two() {
    let dir = TempDir::new().unwrap();
    let f = fixture(dir.path(), "sys.json", r#"{"A": [[1, 0], [0, 2]], "B": [[1], [0]]}"#);
    let r = geokit(&["place", f.to_str().unwrap(), "--lambdas=-1,-3"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["error"]["kind"], "spectrum_not_assignable");
}

#[test]
fn verify_reports_counts() {
    let r = geokit(&["verify", "lemma-diag", "--trials", "50"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["result"]["passed"], 50);
    assert_eq!(v["result"]["suites"][0]["first_failing_seed"], Value::Null);
    let r = geokit(&["verify", "th1", "--trials", "10", "--seed", "7"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"]["passed"], 10);
}

#[test]
fn verify_unknown_id_exits_one() {
    let r = geokit(&["verify", "th9"]);
    assert_eq!(r.code, 1);
    assert!(r.json()["error"].is_object());
}
