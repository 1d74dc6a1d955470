use std::path::Path;
use std::process::{Command, Output};

use falsetate::elliptic::{ApTable, EllipticCurveModel};
use falsetate_cli::cache::{get_or_count, parse, path_for, render};
use proptest::prelude::*;

const E11: [i64; 5] = [0, -1, 1, -10, -20];

fn falsetate(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_falsetate"))
        .args(args)
        .env("FALSETATE_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

#[test]
fn ap_prints_small_primes() {
    let dir = tempfile::tempdir().unwrap();
    let out = falsetate(dir.path(), &["ap", "--curve", "0,-1,1,-10,-20", "--limit", "10"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2 -2\n3 -1\n5 1\n7 -2\n");
}

#[test]
fn cold_cache_has_one_line_per_prime() {
    let dir = tempfile::tempdir().unwrap();
    let out = falsetate(dir.path(), &["ap", "--curve", "0,-1,1,-10,-20", "--limit", "100"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(path_for(dir.path(), E11)).unwrap();
    assert_eq!(text.lines().count(), 25);
}

#[test]
fn warm_cache_counts_only_new_primes() {
    let dir = tempfile::tempdir().unwrap();
    let e = EllipticCurveModel::new(E11).unwrap();
    // a planted value survives extension, so cached entries are not recounted
    std::fs::write(path_for(dir.path(), E11), "2 99\n3 -1\n").unwrap();
    let t = get_or_count(dir.path(), &e, 50).unwrap();
    assert_eq!(t.get(2), Some(99));
    assert_eq!(t.get(47), Some(8));
    assert_eq!(t.primes.len(), 15);
}

#[test]
fn corrupt_line_is_recounted_identically() {
    let dir = tempfile::tempdir().unwrap();
    let e = EllipticCurveModel::new(E11).unwrap();
    let path = path_for(dir.path(), E11);
    get_or_count(dir.path(), &e, 100).unwrap();
    let clean = std::fs::read(&path).unwrap();
    let broken = String::from_utf8(clean.clone()).unwrap().replacen("13 4", "13 x4", 1);
    assert_ne!(broken.as_bytes(), &clean[..]);
    std::fs::write(&path, broken).unwrap();
    get_or_count(dir.path(), &e, 100).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), clean);
}

proptest! {
    #[test]
    fn cache_roundtrip(vals in proptest::collection::vec(-(1i64 << 62) + 1..(1i64 << 62), 1..40)) {
        let primes: Vec<u64> = (2u64..).filter(|&n| (2..n).all(|d| n % d != 0)).take(vals.len()).collect();
        let t = ApTable { primes, ap: vals };
        let back = parse(Path::new("mem"), &render(&t)).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn unsupported_numeric_request_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = falsetate(dir.path(), &["deligne", "--curve", "0,-1,1,-10,-20", "--p", "5", "--m", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UNSUPPORTED"));
}

#[test]
fn usage_errors_exit_two_with_stable_text() {
    let dir = tempfile::tempdir().unwrap();
    let a = falsetate(dir.path(), &["lvalue", "--bogus"]);
    let b = falsetate(dir.path(), &["lvalue", "--bogus"]);
    assert_eq!(a.status.code(), Some(2));
    assert_eq!(a.stderr, b.stderr);
    let c = falsetate(dir.path(), &["ap", "--curve", "1,2", "--limit", "5"]);
    assert_eq!(c.status.code(), Some(2));
}

#[test]
fn deligne_writes_report_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    let args = |o: &Path| {
        vec!["deligne", "--curve", "0,-1,1,-10,-20", "--p", "3", "--m", "2", "--n", "1", "--digits", "25", "--out"]
            .into_iter()
            .map(String::from)
            .chain([o.display().to_string()])
            .collect::<Vec<_>>()
    };
    for o in [&r1, &r2] {
        let a = args(o);
        let out = falsetate(dir.path(), &a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (b1, b2) = (std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());
    assert_eq!(b1, b2);
    let v: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["recognized"]["display"], "5/108");
}

#[test]
fn lvalue_of_zeta_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("zeta.json");
    std::fs::write(&spec, r#"{"kind":"zeta"}"#).unwrap();
    let out = falsetate(dir.path(), &["lvalue", "--spec", spec.to_str().unwrap(), "--s", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["re"].as_str().unwrap().starts_with("1.64493406684822643647"));
}

#[test]
fn reps_lists_representations() {
    let dir = tempfile::tempdir().unwrap();
    let out = falsetate(dir.path(), &["reps", "--m", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|r| r["dim"] == 2));
}
