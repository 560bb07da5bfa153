use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn qterm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qterm")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn solve_four_one() {
    let f = data("four_one.json");
    let v = stdout_json(&qterm(&["solve", f.to_str().unwrap(), "--starts", "200", "--seed", "7"]));
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    let mut args: Vec<f64> = pts
        .iter()
        .map(|p| {
            let (re, im) = complex(&p["u"][0]);
            assert!(re.abs() < 1e-10);
            assert!(p["residual_mult"].as_f64().unwrap() < 1e-10);
            im
        })
        .collect();
    args.sort_by(f64::total_cmp);
    assert!((args[0] + PI / 3.0).abs() < 1e-10 && (args[1] - PI / 3.0).abs() < 1e-10);
}

#[test]
fn cv_four_one() {
    let f = data("four_one.json");
    let v = stdout_json(&qterm(&["cv", f.to_str().unwrap()]));
    let vals: Vec<(f64, f64)> = v["values"].as_array().unwrap().iter().map(complex).collect();
    assert_eq!(vals.len(), 2);
    assert!((vals[0].0 - 0.723_926_111_9).abs() < 1e-9 && vals[0].1.abs() < 1e-9);
    assert!((vals[1].0 - 1.381_356_444_5).abs() < 1e-9 && vals[1].1.abs() < 1e-9);
}

#[test]
fn bloch_four_one() {
    let f = data("four_one.json");
    let v = stdout_json(&qterm(&["bloch", f.to_str().unwrap()]));
    for p in v["points"].as_array().unwrap() {
        assert_eq!(p["accepted"], true);
        let (re, im) = complex(&p["rogers"]);
        assert!(re.abs() < 1e-9 && (im.abs() - 2.029_883_212_819_307_4).abs() < 1e-9);
        assert!(p["diagram_defect"].as_f64().unwrap() < 1e-10);
        assert_eq!(p["nu_hat"]["holds"], true);
    }
}

#[test]
fn seq_exact_csv() {
    let f = data("four_one_special.json");
    let o = qterm(&["seq", f.to_str().unwrap(), "--n-max", "3", "--mode", "exact"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,re,im,log_abs,growth"));
    let re: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(re.len(), 3);
    for (got, want) in re.iter().zip([1.0, 5.0, 13.0]) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seq.json");
    let f = data("four_one_special.json");
    let o = qterm(&["seq", f.to_str().unwrap(), "--n-max", "4", "--format", "json", "-o", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 4);
    assert_eq!(v["mode"], "numeric");
}

#[test]
fn asymmetric_q_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(
        &dir,
        "bad.json",
        r#"{"r": 1, "Q": {"matrix": [[0, 1], [2, 0]]}, "factors": [{"A": {"coeffs": [1, 0]}}]}"#,
    );
    let o = qterm(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "schema");
    assert_eq!(err["issues"][0]["pointer"], "/Q");
}

#[test]
fn every_issue_is_listed() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(&dir, "bad.json", r#"{"r": 0, "Q": {"matrix": [[1]], "linear": [0]}, "epsilon": 3, "factors": 5}"#);
    let o = qterm(&["cv", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    let pointers: Vec<&str> = err["issues"].as_array().unwrap().iter().map(|i| i["pointer"].as_str().unwrap()).collect();
    for want in ["/Q", "/epsilon", "/factors"] {
        assert!(pointers.contains(&want), "{pointers:?}");
    }
}

#[test]
fn unbounded_polytope_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(
        &dir,
        "open.json",
        r#"{"r": 1, "Q": {"matrix": [[0, 0], [0, 0]]},
            "quads": [{"D": {"coeffs": [1, 1]}, "E": {"coeffs": [0, 1]}}]}"#,
    );
    let o = qterm(&["seq", p.to_str().unwrap(), "--n-max", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "polytope");
}

#[test]
fn missing_file_is_a_validation_error() {
    let o = qterm(&["solve", "/nonexistent/term.json"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn too_short_series_is_a_numerical_error() {
    let f = data("four_one_special.json");
    let o = qterm(&["sing", f.to_str().unwrap(), "--n-max", "100", "--pade-n-max", "20", "--pade", "5", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "insufficient_data");
}

#[test]
fn sing_and_check_four_one() {
    let f = data("four_one_special.json");
    let v = stdout_json(&qterm(&["sing", f.to_str().unwrap(), "--n-max", "400"]));
    let r = v["estimate"]["radius"].as_f64().unwrap();
    assert!((r - 0.723_926_111_9).abs() / 0.723_926_111_9 < 0.03, "{r}");
    let v = stdout_json(&qterm(&["check", f.to_str().unwrap(), "--n-max", "400"]));
    assert_eq!(v["verdict"], "consistent");
}

#[test]
fn plain_term_is_not_a_series() {
    let f = data("four_one.json");
    let o = qterm(&["seq", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn thread_cap_gives_identical_output() {
    let f = data("battery/03.json");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qterm"))
            .args(["solve", f.to_str().unwrap(), "--starts", "40"])
            .env("DILOG_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("4"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
