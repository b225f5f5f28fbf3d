//! The binary end to end: exit codes, report contents, schema validity.

use std::path::{Path, PathBuf};
use std::process::Command;

use jsonschema::JSONSchema;
use serde_json::Value;
use svperiod::cli::Report;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_svperiod")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into(), String::from_utf8_lossy(&out.stderr).into())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, err) = run(&a);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}\n{err}"));
    (code, v)
}

fn schema(name: &str) -> JSONSchema {
    let text = std::fs::read_to_string(crate_dir().join("schema").join(name)).unwrap();
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(s: &JSONSchema, v: &Value) {
    if let Err(errs) = s.validate(v) {
        let msgs: Vec<String> = errs.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations: {msgs:?}\n{v:#}");
    }
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn fixtures() -> String {
    crate_dir().join("fixtures").display().to_string()
}

#[test]
fn sv_log_examples() {
    let (code, r) = run_json(&["sv-log", "--a", "2"]);
    assert_eq!(code, 0);
    let (re, im) = complex(&r["values"]["value"]);
    assert!((re - 1.386_294_4).abs() < 1e-6 && im.abs() < 1e-9);
    assert!(r["checks"][0]["pass"].as_bool().unwrap());

    let (code, r) = run_json(&["sv-log", "--a", "i"]);
    assert_eq!(code, 0);
    assert!(complex(&r["values"]["value"]).0.abs() < 1e-6);

    let (code, r) = run_json(&["sv-log", "--a", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["name"], "DegenerateModulus");
    assert_eq!(r["error"]["kind"], "domain");
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(run(&["sv-log", "--a", "one"]).0, 3);
    assert_eq!(run(&["sv-log"]).0, 3);
    assert_eq!(run(&["no-such-command"]).0, 3);
    assert_eq!(run(&["double-copy", "/nonexistent/config.json"]).0, 3);
    assert_eq!(run(&["height", "[[\"1\", [0,0]]]", "[]"]).0, 3);
    assert_eq!(run(&["sv-mzv", "2", "--samples", "1.5"]).0, 3);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn malformed_chain_is_an_input_error() {
    let bad = r#"{"nu": {"terms": [{"pole": [2, 0], "residue": [1, 0]}, {"pole": [1, 0], "residue": [-1, 0]}]},
                 "omega": {"terms": [{"pole": [0, 0], "residue": [1, 0]}]},
                 "gammas": [{"terms": [{"coeff": "1", "path": [{"segmnt": {"start": [0, 0], "end": [1, 0]}}]}]}],
                 "deltas": []}"#;
    let (code, r) = run_json(&["double-copy", bad]);
    assert_eq!(code, 3);
    assert_eq!(r["error"]["kind"], "input");
    assert!(r["error"]["message"].as_str().unwrap().contains("segmnt"));
    // syntactically broken JSON
    assert_eq!(run(&["double-copy", "{\"nu\": "]).0, 3);
}

#[test]
fn double_copy_fixture_and_sweep() {
    let (code, r) = run_json(&["double-copy", "log_a2.json", "--fixtures", &fixtures(), "--tol", "1e-5"]);
    assert_eq!(code, 0, "{r:#}");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let (code, r) = run_json(&["double-copy", "--a", "2", "--a", "3", "--a", "1+i", "--a", "-5", "--a", "0.3"]);
    assert_eq!(code, 0, "{r:#}");
    assert_eq!(r["values"]["runs"].as_array().unwrap().len(), 5);
}

#[test]
fn sv_mzv_example() {
    let (code, r) = run_json(&["sv-mzv", "2", "--samples", "2e6", "--seed", "7"]);
    assert_eq!(code, 0, "{r:#}");
    let v = r["values"]["value"].as_f64().unwrap();
    let s = r["values"]["stderr"].as_f64().unwrap();
    assert!(v.abs() <= 3.0 * s, "{v} ± {s}");
    assert_eq!(r["seed"], 7);
    assert_eq!(r["evals"], 2_000_000);
}

#[test]
fn elliptic_example() {
    let (code, r) = run_json(&["elliptic", "--tau", "i", "--lambda", "1"]);
    assert_eq!(code, 0, "{r:#}");
    let s = &r["values"]["sv_matrix"];
    let pi = std::f64::consts::PI;
    let want = [[0.0, -1.0 / (4.0 * pi)], [-4.0 * pi, 0.0]];
    for i in 0..2 {
        for j in 0..2 {
            let (re, im) = complex(&s[i][j]);
            assert!((re - want[i][j]).abs() < 1e-9 && im.abs() < 1e-9, "{s}");
        }
    }
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"S² = I"));

    // off the real locus the involution check is not made
    let (code, r) = run_json(&["elliptic", "--tau", "0.3+1.1i", "--lambda", "0.7-0.2i"]);
    assert_eq!(code, 0, "{r:#}");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["name"] != "S² = I"));
    assert_eq!(run(&["elliptic", "--tau", "-i"]).0, 2);
}

#[test]
fn height_and_period_matrix_fixtures() {
    let dir = fixtures();
    for (cmd, file) in [("fixture", "height_basic.json"), ("period-matrix", "period_log_a2.json"), ("fixture", "elliptic_i.json")] {
        let (code, r) = run_json(&[cmd, file, "--fixtures", &dir]);
        assert_eq!(code, 0, "{file}: {r:#}");
    }
    let (code, r) = run_json(&["height", r#"[["1", [0, 0]], ["-1", "inf"]]"#, r#"[["1", [2, 0]], ["-1", [-1, 0]]]"#]);
    assert_eq!(code, 0);
    assert!((r["values"]["value"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-4);
    // overlapping supports
    assert_eq!(run(&["height", r#"[["1", [0, 0]], ["-1", "inf"]]"#, r#"[["1", [0, 0]], ["-1", [1, 0]]]"#]).0, 2);
}

#[test]
fn failed_checks_exit_1() {
    let (code, r) = run_json(&["sv-log", "--a", "3", "--tol", "1e-30"]);
    assert_eq!(code, 1);
    assert_eq!(r["checks"][0]["pass"], false);
}

#[test]
fn every_report_validates_and_round_trips() {
    let report = schema("report.schema.json");
    let dir = fixtures();
    let cases: Vec<Vec<&str>> = vec![
        vec!["sv-log", "--a", "2"],
        vec!["sv-log", "--a", "1"],
        vec!["double-copy", "--a", "2"],
        vec!["double-copy", "log_a2.json", "--fixtures", &dir],
        vec!["sv-mzv", "3", "--samples", "2e4"],
        vec!["elliptic", "--tau", "0.5+1.2i"],
        vec!["height", "height_basic.json", "height_basic.json", "--fixtures", &dir],
        vec!["period-matrix", "period_log_a2.json", "--fixtures", &dir],
        vec!["fixture", "sv_log_1pi.json", "--fixtures", &dir],
        vec!["double-copy", "{"],
    ];
    for args in cases {
        let (_, v) = run_json(&args);
        assert_valid(&report, &v);
        let r: Report = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&r).unwrap(), v, "{args:?}");
    }
}

#[test]
fn fixtures_validate() {
    let s = schema("fixture.schema.json");
    let files = svperiod::cli::fixture_files(Path::new(&fixtures())).unwrap();
    assert!(files.len() >= 4);
    for f in files {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
        assert_valid(&s, &v);
        svperiod::cli::load_fixture(&f).unwrap();
    }
}

#[test]
fn selftest_fast_with_fixtures() {
    let (code, r) = run_json(&["selftest", "fast", "--fixtures", &fixtures()]);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] != true).collect();
    assert_eq!(code, 0, "{failed:#?}");
    assert_valid(&schema("report.schema.json"), &r);
}

#[test]
fn thread_cap_does_not_change_results() {
    let out = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_svperiod"))
            .args(["sv-mzv", "3", "--samples", "1e5", "--seed", "3", "--json"])
            .env("SVPERIOD_THREADS", threads)
            .output()
            .unwrap();
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["wall_time_ms"] = Value::from(0);
        v
    };
    assert_eq!(out("1"), out("3"));
}
