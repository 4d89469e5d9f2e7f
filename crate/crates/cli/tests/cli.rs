#![allow(clippy::excessive_precision)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divmetric"))
        .args(args)
        .current_dir(dir)
        .env_remove("DIVMETRIC_SEED")
        .output()
        .expect("spawn divmetric")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn fixture_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pair.csv", "0.5,0.5\n0.2,0.8\n");
    dir
}

#[test]
fn compute_fixture_values() {
    let dir = fixture_dir();
    let out = run(
        dir.path(),
        &["compute", "--family", "ag", "--s", "1", "pair.csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let v = r["results"][0]["divergence"].as_f64().unwrap();
    assert!((v - 0.050671836985565864).abs() < 1e-15);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "compute");

    let out = run(
        dir.path(),
        &[
            "compute", "--family", "j", "--s", "0.5", "--sqrt", "pair.csv",
        ],
    );
    let d = report(&out)["results"][0]["distance"].as_f64().unwrap();
    assert!((d - 0.6407289720278689).abs() < 1e-14);
}

#[test]
fn identical_rows_give_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "same.csv", "0.1,0.3,0.6\n0.1,0.3,0.6\n");
    let out = run(
        dir.path(),
        &["compute", "--measure", "hellinger", "same.csv"],
    );
    assert_eq!(report(&out)["results"][0]["divergence"], 0.0);
}

#[test]
fn jsonl_rows_with_ids_and_cross_pairs() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "a.jsonl",
        "{\"id\": \"left\", \"weights\": [0.5, 0.5]}\n",
    );
    write(dir.path(), "b.jsonl", "[0.2, 0.8]\n[0.5, 0.5]\n");
    let out = run(
        dir.path(),
        &[
            "compute",
            "--measure",
            "jensen-shannon",
            "--pairs",
            "cross",
            "a.jsonl",
            "b.jsonl",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let results = report(&out)["results"].as_array().unwrap().clone();
    assert_eq!(results.len(), 2);
    assert_eq!(results[0]["left"], "left");
    assert_eq!(results[1]["divergence"], 0.0);
}

#[test]
fn bad_rows_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.csv", "0.5,0.5\n0.5,abc\n");
    let out = run(
        dir.path(),
        &["compute", "--measure", "hellinger", "bad.csv"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:2:"));

    write(dir.path(), "zero.csv", "0.5,0.5\n1.0,0.0\n");
    let out = run(
        dir.path(),
        &["compute", "--measure", "hellinger", "zero.csv"],
    );
    assert_eq!(out.status.code(), Some(3));
    let out = run(
        dir.path(),
        &[
            "compute",
            "--measure",
            "hellinger",
            "--smooth",
            "1e-9",
            "zero.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));

    let out = run(
        dir.path(),
        &["compute", "--measure", "hellinger", "missing.csv"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = fixture_dir();
    assert_eq!(
        run(dir.path(), &["compute", "pair.csv"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(
            dir.path(),
            &["compute", "--family", "ag", "--s", "1e-7", "pair.csv"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(dir.path(), &["verify", "triangle", "--s-grid", "2:1:1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_exit_code_follows_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(
        dir.path(),
        &[
            "verify", "triangle", "--family", "j", "--s-grid", "0.5", "--trials", "20000",
        ],
    );
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["passed"], true);

    let bad = run(
        dir.path(),
        &[
            "verify",
            "triangle",
            "--family",
            "ag",
            "--s-grid",
            "0",
            "--trials",
            "2000",
            "--confirm",
        ],
    );
    assert_eq!(bad.status.code(), Some(1));
    let r = report(&bad);
    assert_eq!(r["passed"], false);
    assert!(!r["violations"].as_array().unwrap().is_empty());
    assert_eq!(r["results"][0]["confirmations"][0]["confirmed"], true);

    let control = run(
        dir.path(),
        &[
            "verify",
            "triangle",
            "--family",
            "ag",
            "--s-grid",
            "2",
            "--trials",
            "2000",
            "--no-sqrt",
        ],
    );
    assert_eq!(control.status.code(), Some(1));

    for args in [
        &["verify", "chain", "--pairs", "3000"][..],
        &["verify", "probe", "--points", "1000"],
        &["verify", "asymptotic"],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn seed_comes_from_the_environment_when_not_given() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "chain", "--pairs", "50"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_divmetric"))
        .args(args)
        .env("DIVMETRIC_SEED", "42")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(report(&with_env)["seed"], 42);
    assert_eq!(report(&run(dir.path(), &args))["seed"], 0);
}

#[test]
fn output_flag_writes_the_report_and_timing_is_opt_in() {
    let dir = fixture_dir();
    let out = run(
        dir.path(),
        &["-o", "r.json", "compute", "--measure", "d", "pair.csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(r["timing"].is_null());

    let timed = run(
        dir.path(),
        &["--timing", "compute", "--measure", "d", "pair.csv"],
    );
    assert!(report(&timed)["timing"].is_object());
}

#[test]
fn index_round_trip_and_metric_checks() {
    let dir = tempfile::tempdir().unwrap();
    let corpus: String = (1..=60)
        .map(|i| {
            let a = i as f64;
            format!("p{i},{a},{},{}\n", 61.0 - a, 10.0 + (a % 7.0))
        })
        .collect();
    write(dir.path(), "corpus.csv", &corpus);
    write(dir.path(), "q.csv", "query,1,1,1\n");
    let flags = ["--id-column", "--renormalize"];

    let mut build = vec![
        "index", "build", "--family", "j", "--s", "0.5", "--seed", "3", "--index", "idx.json",
    ];
    build.extend(flags);
    build.push("corpus.csv");
    let out = run(dir.path(), &build);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(report(&out)["results"]["points"], 60);

    let query = |extra: &[&str]| {
        let mut args = vec!["index", "query", "--index", "idx.json"];
        args.extend(flags);
        args.extend(extra);
        args.push("q.csv");
        run(dir.path(), &args)
    };
    let tree = report(&query(&["--k", "5"]));
    let brute = report(&query(&["--k", "5", "--brute"]));
    assert_eq!(
        tree["results"]["queries"][0]["neighbors"],
        brute["results"]["queries"][0]["neighbors"]
    );
    assert_eq!(
        tree["results"]["queries"][0]["neighbors"]
            .as_array()
            .unwrap()
            .len(),
        5
    );

    let r = tree["results"]["queries"][0]["neighbors"][4]["distance"]
        .as_f64()
        .unwrap();
    let radius = r.to_string();
    let ranged = report(&query(&["--radius", &radius]));
    assert_eq!(
        ranged["results"]["queries"][0]["neighbors"]
            .as_array()
            .unwrap()
            .len(),
        5
    );

    assert_eq!(
        query(&["--family", "ag", "--s", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        query(&["--k", "2", "--radius", "0.1"]).status.code(),
        Some(2)
    );

    let mut file: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("idx.json")).unwrap())
            .unwrap();
    file["schema_version"] = 99.into();
    write(dir.path(), "idx.json", &file.to_string());
    let stale = query(&["--k", "1"]);
    assert_eq!(stale.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&stale.stderr).contains("99"));
}
