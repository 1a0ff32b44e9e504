use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dbr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbr"))
        .args(args)
        .env_remove("DBR_SEED")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is a JSON report"))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn corpus_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = dbr(&[
        "corpus",
        "--corpus",
        dir.path().to_str().unwrap(),
        "--points",
        "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    dir
}

const BLASCHKE: &str = r#"{"n":1,"m":1,"p":1,"A":[[[-1,0]]],"B":[[[1.4142135623730951,0]]],"C":[[[-1.4142135623730951,0]]],"D":[[[1,0]]]}"#;

#[test]
fn validate_blaschke_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "b.json", BLASCHKE);
    let out = dbr(&["validate", f.to_str().unwrap()]);
    assert!(out.status.success());
    let r = lines(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["check_name"], "schur_class");
    assert_eq!(r[0]["pass"], true);
}

#[test]
fn validate_unstable_fails() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "u.json",
        r#"{"n":1,"m":1,"p":1,"A":[[[1,0]]],"B":[[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]]}"#,
    );
    let out = dbr(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = lines(&out);
    assert_eq!(r[0]["pass"], false);
}

#[test]
fn validate_empty_unitary_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "e.json",
        r#"{"n":0,"m":1,"p":1,"A":[],"B":[],"C":[[]],"D":[[[0,1]]]}"#,
    );
    let out = dbr(&["validate", f.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{not json");
    let out = dbr(&["validate", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn dimension_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "dim.json",
        r#"{"n":2,"m":1,"p":1,"A":[[[-1,0]]],"B":[[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]]}"#,
    );
    assert_eq!(
        dbr(&["validate", f.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn model_suite_on_blaschke_and_half_blaschke() {
    let dir = corpus_dir();
    let b = dir.path().join("blaschke.json");
    let out = dbr(&["model", b.to_str().unwrap(), "--points", "8", "--summary"]);
    assert!(out.status.success());
    let r = lines(&out);
    let names: Vec<&str> = r
        .iter()
        .map(|v| v["check_name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"kolmogorov_factorization") && names.contains(&"bilateral_map"));
    assert_eq!(*names.last().unwrap(), "summary");

    let h = dir.path().join("half_blaschke.json");
    let out = dbr(&["model", h.to_str().unwrap(), "--points", "8"]);
    assert!(out.status.success());
    let names: Vec<String> = lines(&out)
        .iter()
        .map(|v| v["check_name"].as_str().unwrap().to_owned())
        .collect();
    assert!(!names.iter().any(|n| n == "kolmogorov_factorization"));
}

#[test]
fn cayley_at_two_alphas() {
    let dir = corpus_dir();
    let b = dir.path().join("blaschke.json");
    for alpha in ["1,0", "2,1"] {
        let out = dbr(&[
            "cayley",
            b.to_str().unwrap(),
            "--alpha",
            alpha,
            "--points",
            "6",
        ]);
        assert!(out.status.success(), "alpha {alpha}");
    }
    let out = dbr(&["cayley", b.to_str().unwrap(), "--alpha", "-1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn intertwine_identity_scaling_and_negative_control() {
    let dir = corpus_dir();
    let b = dir.path().join("blaschke.json");
    let b = b.to_str().unwrap();
    let id = write(dir.path(), "id.json", "[[[1,0]]]");
    assert!(dbr(&["intertwine", b, b, id.to_str().unwrap()])
        .status
        .success());

    // x -> i x: B -> iB, C -> -iC.
    let rot = write(
        dir.path(),
        "rot.json",
        r#"{"n":1,"m":1,"p":1,"A":[[[-1,0]]],"B":[[[0,1.4142135623730951]]],"C":[[[0,1.4142135623730951]]],"D":[[[1,0]]]}"#,
    );
    let e = write(dir.path(), "e_rot.json", "[[[0,1]]]");
    assert!(
        dbr(&["intertwine", b, rot.to_str().unwrap(), e.to_str().unwrap()])
            .status
            .success()
    );

    let two = write(dir.path(), "two.json", "[[[2,0]]]");
    let out = dbr(&["intertwine", b, b, two.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = lines(&out);
    let dual = r
        .iter()
        .find(|v| v["check_name"] == "dual_intertwine")
        .unwrap();
    assert_eq!(dual["pass"], true);

    let wrong = write(dir.path(), "wrong.json", "[[[1,0],[0,0]]]");
    assert_eq!(
        dbr(&["intertwine", b, b, wrong.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic_and_seed_sensitive() {
    let dir = corpus_dir();
    let f = dir.path().join("conservative_n3.json");
    let f = f.to_str().unwrap();
    let a = dbr(&["model", f, "--seed", "5", "--points", "6"]);
    let b = dbr(&["model", f, "--seed", "5", "--points", "6"]);
    assert_eq!(a.stdout, b.stdout);
    let c = dbr(&["model", f, "--seed", "6", "--points", "6"]);
    assert_ne!(a.stdout, c.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_dbr"))
        .args(["model", f, "--seed", "6", "--points", "6"])
        .env("DBR_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn corpus_writes_every_member() {
    let dir = corpus_dir();
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "blaschke.json",
            "conservative_n3.json",
            "constant_0.3.json",
            "direct_sum_2x2.json",
            "half_blaschke.json",
            "padded_blaschke.json",
            "zero.json"
        ]
    );
}
