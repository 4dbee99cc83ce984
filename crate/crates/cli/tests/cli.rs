use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn splab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splab")).args(args).env_remove("SPLAB_THREADS").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exact_degree_law_for_three() {
    let out = splab(&["exact", "bernoulli", "--quantity", "degree", "--n", "3", "--p", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "m,probability\n1,0.375\n2,0.375\n3,0.25\n");
}

#[test]
fn exact_json_carries_exact_values() {
    let out = splab(&["exact", "bernoulli", "--quantity", "degree", "--n", "3", "--p", "1/2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("3/8"), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn grow_is_deterministic() {
    for format in ["json", "dot", "csv"] {
        let args = ["grow", "--model", "bernoulli", "--p", "0.3", "--n", "40", "--seed", "7", "--format", format];
        let a = splab(&args);
        let b = splab(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
    let a = splab(&["grow", "--model", "binary", "--n", "40", "--seed", "7", "--stream", "0"]);
    let b = splab(&["grow", "--model", "binary", "--n", "40", "--seed", "7", "--stream", "1"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn grow_csv_has_header_and_one_row() {
    let out = splab(&["grow", "--model", "binary", "--n", "5", "--seed", "3", "--format", "csv"]);
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "n,source_degree,sink_degree,leftmost_len,random_len,path_count");
    assert!(lines[1].starts_with("5,2,"));
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["grow", "--model", "binary", "--n", "5", "--p", "0.5"],
        &["grow", "--model", "bernoulli", "--n", "5"],
        &["exact", "bernoulli", "--quantity", "degree", "--n", "3", "--p", "1.5"],
        &["exact", "bernoulli", "--quantity", "degree", "--n", "3", "--p", "0"],
        &["simulate", "--model", "binary", "--n", "5", "--trials", "3", "--bogus"],
        &["limits", "--family", "ml", "--p", "0.5"],
    ];
    for args in cases {
        let out = splab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(splab(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_threads_is_rejected() {
    let out = splab(&["--threads", "0", "limits", "--family", "ml", "--p", "0.5", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_table_validates() {
    let dir = tempfile::tempdir().unwrap();
    for (model, p) in [("bernoulli", Some("1/3")), ("binary", None)] {
        let table = dir.path().join(format!("{model}.json"));
        let mut args = vec!["oracle", "--model", model, "--n", "6", "--out", table.to_str().unwrap()];
        if let Some(p) = p {
            args.extend(["--p", p]);
        }
        assert_eq!(splab(&args).status.code(), Some(0));
        let report = dir.path().join(format!("{model}-report.json"));
        let out = splab(&[
            "validate",
            "--against",
            "oracle",
            "--input",
            table.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{model}");
        let v = json(&report);
        assert_eq!(v["passed"], true);
        assert!(v["checks"].as_array().unwrap().len() >= 3);
    }
}

#[test]
fn oracle_respects_cap() {
    let out = splab(&["oracle", "--model", "binary", "--n", "30"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulation_validates_against_dp() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.json");
    let out = splab(&[
        "simulate",
        "--model",
        "bernoulli",
        "--p",
        "0.4",
        "--n",
        "30",
        "--trials",
        "2000",
        "--seed",
        "1",
        "--quantities",
        "deg,len,rlen",
        "--out",
        sim.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = splab(&["validate", "--against", "dp", "--input", sim.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["against"], "dp");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["p_value"].as_f64().unwrap() > 0.0));
}

#[test]
fn binary_simulation_validates_against_closed_means() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.json");
    let out = splab(&[
        "simulate",
        "--model",
        "binary",
        "--n",
        "50",
        "--trials",
        "2000",
        "--seed",
        "2",
        "--out",
        sim.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = splab(&["validate", "--against", "closed", "--input", sim.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn limits_report_json() {
    let out = splab(&["limits", "--family", "ml", "--p", "0.5", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["family"], "ml");
    assert_eq!(v["r"], 2);
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let out = splab(&["limits", "--family", "ml", "--p", "0.5", "--x", "1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let density = v["value"].as_f64().unwrap();
    assert!(density > 0.0 && density < 1.0);
    assert!(v["error_estimate"].as_f64().unwrap() < 1e-8);
}

#[test]
fn rho_estimate_is_printed() {
    let out = splab(&["exact", "binary", "--estimate-rho", "--nmax", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let rho: f64 = row.split(',').next().unwrap().parse().unwrap();
    assert!((rho - 0.8989).abs() < 1e-3);
}
