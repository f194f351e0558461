use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn uniqlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniqlab"))
        .args(args)
        .env_remove("UNIQLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn morgan_threshold_at_two() {
    let out = stdout(&uniqlab(&["morgan", "--params", r#"{"p": 2}"#]));
    assert_eq!(body(&out), ["p,q,r,threshold", "2,2,2,1"]);
    assert!(out.contains("# command=morgan\n"));
    assert!(out
        .lines()
        .any(|l| l.starts_with("# config_hash=") && l.len() == 14 + 64));
}

#[test]
fn classify_default_is_supercritical() {
    let out = stdout(&uniqlab(&["classify"]));
    let rows = body(&out);
    let header: Vec<&str> = rows[0].split(',').collect();
    let row: Vec<&str> = rows[1].split(',').collect();
    let product: f64 = row[header.iter().position(|h| *h == "product").unwrap()]
        .parse()
        .unwrap();
    assert!((product - 0.4).abs() < 1e-3);
    assert_eq!(row.last(), Some(&"supercritical"));
}

#[test]
fn config_file_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hardy.json");
    fs::write(
        &cfg,
        r#"{"command": "hardy", "params": {"m_max": 3, "n_max": 3}, "seed": 4}"#,
    )
    .unwrap();
    let out = dir.path().join("hardy.json.out");
    let o = uniqlab(&[
        "hardy",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    stdout(&o);
    let v: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["provenance"]["seed"], 4);
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
    for r in v["rows"].as_array().unwrap() {
        let expect = r["m"].as_i64() <= r["N"].as_i64();
        assert_eq!(r["bounded"].as_bool(), Some(expect));
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    fs::write(
        &cfg,
        r#"{"command": "product", "params": {"n_random": 3}, "seed": 1}"#,
    )
    .unwrap();
    let a = stdout(&uniqlab(&["product", "--config", cfg.to_str().unwrap()]));
    let b = stdout(&uniqlab(&[
        "product",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "2",
    ]));
    assert!(a.contains("# seed=1\n") && b.contains("# seed=2\n"));
    assert_ne!(body(&a), body(&b));
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("id{i}.csv"));
        let o = uniqlab(&["identities", "--seed", "9", "--out", path.to_str().unwrap()]);
        stdout(&o);
        files.push(fs::read(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn json_extension_selects_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    stdout(&uniqlab(&["morgan", "--out", path.to_str().unwrap()]));
    let v: Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
    assert_eq!(v["rows"][0]["threshold"], 1.0);
}

#[test]
fn invalid_params_exit_two() {
    let o = uniqlab(&["morgan", "--params", r#"{"p": 0.5}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = uniqlab(&["scan", "--params", r#"{"alpha_max": 0.7, "typo": 1}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("typo"));
}

#[test]
fn config_for_other_command_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"command": "morgan", "params": {}, "seed": 0}"#).unwrap();
    let o = uniqlab(&["classify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_thread_count_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_uniqlab"))
        .arg("morgan")
        .env("UNIQLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_uniqlab"))
        .arg("morgan")
        .env("UNIQLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
}
