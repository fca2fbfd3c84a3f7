use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bubbles(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bubbles")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    let line = text.lines().last().expect("stderr has a line");
    serde_json::from_str(line).unwrap()
}

#[test]
fn solve_params_prints_beta() {
    let out = bubbles(&["solve-params", "--spec", &fixture("n3-m1-c0.json"), "--sigma", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let beta = v["betas"][0].as_f64().unwrap();
    assert!((beta - 1.3160740129524924).abs() < 1e-15);
    assert_eq!(v["nullity"], 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("1.31607401295249"));
}

#[test]
fn solved_params_feed_back_in() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    let spec = fixture("n3-m1-cneg.json");
    let out = bubbles(&["solve-params", "--spec", &spec, "--x", "0.5,-1", "--out", params.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = bubbles(&["verify", "--spec", &spec, "--params", params.to_str().unwrap(), "--grid", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["y0"][0].as_f64(), Some(0.5));
}

#[test]
fn reducible_spec_fails_validation() {
    let out = bubbles(&["validate", "--spec", &fixture("n4-m2-reducible.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert!(v["violations"].as_array().unwrap().iter().any(|x| x["rule"] == "reducible"));
}

#[test]
fn moving_spheres_on_neumann_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("ms.json");
    let out = bubbles(&[
        "moving-spheres",
        "--spec",
        &fixture("n3-m1-c0.json"),
        "--x",
        "0,0,0",
        "--out",
        out_path.to_str().unwrap(),
        "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((v["lambda_critical_numeric"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let csv = std::fs::read_to_string(out_path.with_extension("csv")).unwrap();
    assert!(csv.starts_with("lambda,component,min_w,y1,y2,y3"));
}

#[test]
fn incompatible_boundary_coefficients_is_a_check_failure() {
    let out = bubbles(&["solve-params", "--spec", &fixture("n4-m2-mixed-c.json")]);
    assert_eq!(out.status.code(), Some(1));
    let e = stderr_json(&out);
    assert_eq!(e["error_code"], "IncompatibleBoundaryCoefficients");
    assert!(e["detail"].is_string());
}

#[test]
fn input_errors_exit_two_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"N": 2, "m": 1, "A": [[5.0]], "B": [[3.0]], "c": [0.0]}"#).unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["validate", "--spec", bad.to_str().unwrap()], "MalformedSpec"),
        (vec!["validate", "--spec", "/definitely/missing.json"], "InvalidArgument"),
        (vec!["verify", "--fixture", "nope"], "InvalidArgument"),
        (vec!["verify", "--fixture", "n3-m1-c0", "--h", "0"], "InvalidArgument"),
        (vec!["moving-spheres", "--fixture", "n3-m1-c0", "--x", "0,0,1"], "InvalidArgument"),
        (vec!["moving-spheres", "--fixture", "n3-m1-c0", "--lambda-range", "3,5"], "BadBracket"),
        (vec!["halfline", "--fixture", "n3-m1-c0", "--u0", "-1"], "InvalidArgument"),
        (vec!["frobnicate"], "Usage"),
        (vec!["verify", "--no-such-flag"], "Usage"),
    ];
    for (args, code) in cases {
        let out = bubbles(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&out)["error_code"], code, "{args:?}");
    }
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, format!(r#"{{"spec": {:?}, "sigma": 2.0}}"#, fixture("n3-m1-c0.json"))).unwrap();
    let v: Value = serde_json::from_slice(&bubbles(&["solve-params", "--config", cfg.to_str().unwrap()]).stdout).unwrap();
    assert_eq!(v["sigma"].as_f64(), Some(2.0));
    let v: Value = serde_json::from_slice(&bubbles(&["solve-params", "--config", cfg.to_str().unwrap(), "--sigma", "0.5"]).stdout).unwrap();
    assert_eq!(v["sigma"].as_f64(), Some(0.5));
}

#[test]
fn halfline_writes_certificate_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("hl.json");
    let out = bubbles(&[
        "halfline",
        "--spec",
        &fixture("n3-m1-c0.json"),
        "--u0",
        "1",
        "--out",
        out_path.to_str().unwrap(),
        "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let t = v["certificate"]["t_star"].as_f64().unwrap();
    assert!((t - 2.1033).abs() < 1e-4);
    let csv = std::fs::read_to_string(out_path.with_extension("csv")).unwrap();
    assert!(csv.starts_with("t,u1,du1,ddu1\n"));
}
