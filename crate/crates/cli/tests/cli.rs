use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn apvar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apvar"))
        .current_dir(dir)
        .env_remove("APVAR_CACHE_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[i].to_string()).collect()
}

#[test]
fn sieve_writes_cache_that_reloads_identically() {
    let d = tempfile::tempdir().unwrap();
    let out = apvar(d.path(), &["--quiet", "--cache-dir", "cache", "sieve", "--n-max", "100000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = fs::read(d.path().join("cache/apvar-tables-100000.bin")).unwrap();
    assert_eq!(&bytes[..8], b"APVARTAB");
    assert_eq!(bytes.len(), 8 + 2 + 8 + 100_001 * 29 + 8);
    assert_eq!(column(&d.path().join("apvar-sieve.csv"), "reload_identical"), ["true"]);
}

#[test]
fn voronoi_cusp_example() {
    let d = tempfile::tempdir().unwrap();
    let out = apvar(d.path(), &["voronoi", "--seq", "cusp", "--q", "5", "--h", "2", "--x", "2000", "--big-h", "500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rel: f64 = column(&d.path().join("apvar-voronoi.csv"), "rel_diff")[0].parse().unwrap();
    assert!(rel <= 1e-5, "{rel}");
    // stdout echoes the file
    assert_eq!(out.stdout, fs::read(d.path().join("apvar-voronoi.csv")).unwrap());
    let json: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("apvar-voronoi.json")).unwrap()).unwrap();
    for key in ["schema_version", "command", "params", "results", "tolerances", "wall_time"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["command"], "voronoi");
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let bad_seq = apvar(d.path(), &["voronoi", "--seq", "eisenstein", "--q", "5", "--x", "2000", "--big-h", "500"]);
    assert_eq!(bad_seq.status.code(), Some(2));
    let missing = apvar(d.path(), &["voronoi", "--seq", "cusp"]);
    assert_eq!(missing.status.code(), Some(2));
    let not_coprime = apvar(d.path(), &["voronoi", "--seq", "cusp", "--q", "4", "--h", "2", "--x", "2000", "--big-h", "500"]);
    assert_eq!(not_coprime.status.code(), Some(2));
    let bad_weight = apvar(d.path(), &["voronoi", "--seq", "cusp", "--q", "5", "--x", "2000", "--big-h", "900"]);
    assert_eq!(bad_weight.status.code(), Some(2));
}

#[test]
fn tolerance_failure_exits_1_and_names_the_row() {
    let d = tempfile::tempdir().unwrap();
    let out = apvar(
        d.path(),
        &["--quiet", "voronoi", "--seq", "divisor", "--q", "4", "--h", "1", "--x", "2000", "--big-h", "500", "--tol", "1e-30"],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tolerance failure") && err.contains("q=4"), "{err}");
}

#[test]
fn sweep_example_rows_and_thread_independence() {
    let d = tempfile::tempdir().unwrap();
    let args = |out: &'static str, threads: &'static str| {
        vec!["--quiet", "--cache-dir", "cache", "--out", out, "--threads", threads, "sweep", "--x", "100000", "--q-min", "320", "--q-max", "10000", "--points", "20"]
    };
    let a = apvar(d.path(), &args("serial", "1"));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = apvar(d.path(), &args("parallel", "3"));
    assert!(b.status.success());
    let (pa, pb) = (d.path().join("serial/apvar-sweep.csv"), d.path().join("parallel/apvar-sweep.csv"));
    assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap());
    assert_eq!(csv_rows(&pa).len(), 20);
    for r in column(&pa, "ratio") {
        assert!(r.parse::<f64>().unwrap().is_finite());
    }
}

#[test]
fn cache_directory_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_apvar"))
        .current_dir(d.path())
        .env("APVAR_CACHE_DIR", d.path().join("envcache"))
        .args(["--quiet", "variance", "--seq", "cusp", "--x", "5000", "--q", "7"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(d.path().join("envcache/apvar-tables-100000.bin").exists());
}

#[test]
fn variance_range_and_schema() {
    let d = tempfile::tempdir().unwrap();
    let out = apvar(
        d.path(),
        &["--quiet", "--cache-dir", "c", "variance", "--seq", "cusp", "--x", "20000", "--q-range", "100:400", "--geometric", "4"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let p = d.path().join("apvar-variance.csv");
    let mut r = csv::Reader::from_path(&p).unwrap();
    let h: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&h[..6], ["X", "q", "H", "sequence", "exact", "prediction"]);
    assert_eq!(h.last().unwrap(), "regime");
    assert_eq!(column(&p, "q"), ["100", "159", "252", "400"]);
    let bad = apvar(d.path(), &["variance", "--seq", "cusp", "--x", "20000", "--q-range", "400:100"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn mellin_barnes_suite_passes() {
    let d = tempfile::tempdir().unwrap();
    let out = apvar(d.path(), &["--quiet", "mellin-check", "--suite", "mellin-barnes,mellin-kernel"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&d.path().join("apvar-mellin-check.csv"));
    assert_eq!(rows.len(), 54 + 5);
}

#[test]
fn shifted_check_decomposition() {
    let d = tempfile::tempdir().unwrap();
    let out = apvar(d.path(), &["--quiet", "shifted-check", "--kind", "div-yy", "--x", "2000", "--q", "6", "--big-h", "500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let p = d.path().join("apvar-shifted-check.csv");
    assert_eq!(column(&p, "kind"), ["div-yy"]);
    let rel: f64 = column(&p, "decomposition_rel_diff")[0].parse().unwrap();
    assert!(rel <= 1e-6);
    let fake = apvar(d.path(), &["--quiet", "shifted-check", "--kind", "fake-yk", "--x", "2000", "--q", "6", "--big-h", "500"]);
    assert!(fake.status.success());
    assert_eq!(column(&p, "kind"), ["fake-yk"]);
}
