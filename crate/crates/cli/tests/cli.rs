use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dimgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimgrid"))
        .args(args)
        .env_remove("DIMGRID_CACHE")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Pseudo-random points on a line, so nearest-neighbor ratios vary the way
/// i.i.d. samples do.
fn write_line(path: &Path) {
    let mut state = 0x2545_f491_4f6c_dd1d_u64;
    let rows: String = (0..200)
        .map(|_| {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            let t = 20.0 * (state >> 11) as f64 / (1u64 << 53) as f64;
            format!("{},{}\n", t, 2.0 + t * 0.5)
        })
        .collect();
    std::fs::write(path, rows).unwrap();
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bounds_text_matches_known_row() {
    let out = dimgrid(&["bounds", "--ambient", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().find(|l| l.trim_start().starts_with("1 ")).unwrap().split_whitespace().collect();
    assert_eq!(row, ["1", "0.166667", "0.25", "0.666667"]);
}

#[test]
fn bounds_json_schema() {
    let v = json(&dimgrid(&["bounds", "--ambient", "3", "--json"]));
    assert_eq!(v["n"], 3);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    let row = &dimgrid_row(&v, 1);
    assert_eq!(row["middle"], "0.0769230769231");
}

fn dimgrid_row(v: &Value, m: u64) -> Value {
    v["rows"].as_array().unwrap().iter().find(|r| r["m"] == m).unwrap().clone()
}

#[test]
fn dcf_on_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("line.csv");
    write_line(&input);
    let v = json(&dimgrid(&["estimate", "--method", "dcf", "--in", p(&input), "--seed", "7"]));
    assert_eq!(v["m_hat"], 1);
    assert_eq!(v["method"], "dcf");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    for field in ["weights", "s_star", "ip", "cf", "timing"] {
        assert!(!v[field].is_null(), "missing {field}");
    }
}

#[test]
fn report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("line.csv");
    let out = dir.path().join("report.json");
    write_line(&input);
    let o = dimgrid(&["estimate", "--method", "twonn", "--in", p(&input), "--out", p(&out)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(out).unwrap()).unwrap();
    assert_eq!(v["m_hat"], 1);
}

#[test]
fn missing_input_exits_2() {
    let o = dimgrid(&["estimate", "--in", "/nonexistent/points.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "1,2\n3\n").unwrap();
    assert_eq!(dimgrid(&["estimate", "--in", p(&input)]).status.code(), Some(2));
}

#[test]
fn invalid_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("line.csv");
    write_line(&input);
    let f = p(&input);
    for args in [
        vec!["estimate", "--in", f, "--method", "pca"],
        vec!["estimate", "--in", f, "--ip-min", "60", "--ip-max", "40"],
        vec!["estimate", "--in", f, "--method", "dcf", "--d-max", "5"],
        vec!["estimate", "--in", f, "--base-target", "0"],
        vec!["generate", "--generator", "torus"],
        vec!["benchmark", "--suite", "huge"],
        vec!["bounds"],
    ] {
        assert_eq!(dimgrid(&args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn read_only_cache_is_never_written() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("line.csv");
    let cache = dir.path().join("cache.json");
    write_line(&input);
    let base = ["estimate", "--in", p(&input), "--d-max", "3", "--cache", p(&cache)];

    let mut ro = base.to_vec();
    ro.push("--read-only-cache");
    json(&dimgrid(&ro));
    assert!(!cache.exists());

    let first = json(&dimgrid(&base));
    assert!(cache.exists());
    let stored = std::fs::read(&cache).unwrap();
    let second = json(&dimgrid(&ro));
    assert_eq!(std::fs::read(&cache).unwrap(), stored);
    assert_eq!(first["weights"], second["weights"]);
    assert_eq!(first["m_hat"], second["m_hat"]);
}

#[test]
fn cache_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("env-cache.json");
    let o = Command::new(env!("CARGO_BIN_EXE_dimgrid"))
        .args(["calibrate", "--d", "2", "--dmax", "2", "--n", "300"])
        .env("DIMGRID_CACHE", &cache)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(cache.exists());
}

#[test]
fn calibrate_stores_dmax_plus_one_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let args = ["calibrate", "--d", "3", "--dmax", "5", "--n", "1000", "--noise", "0.01", "--cache", p(&cache)];
    let v = json(&dimgrid(&args));
    assert_eq!(v["anchors"].as_array().unwrap().len(), 6);
    assert_eq!(v["from_cache"], false);
    let file: Value = serde_json::from_slice(&std::fs::read(&cache).unwrap()).unwrap();
    assert_eq!(file["entries"][0]["anchors"].as_array().unwrap().len(), 6);
    let again = json(&dimgrid(&args));
    assert_eq!(again["from_cache"], true);
    assert_eq!(again["anchors"], v["anchors"]);
}

#[test]
fn generate_is_seed_deterministic() {
    let a = dimgrid(&["generate", "--generator", "swissroll", "--n", "50", "--seed", "4"]);
    let b = dimgrid(&["generate", "--generator", "M7_Roll", "--n", "50", "--seed", "4"]);
    let c = dimgrid(&["generate", "--generator", "swissroll", "--n", "50", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 50);
}

#[test]
fn generate_labeled_circles() {
    let o = dimgrid(&["generate", "--generator", "circles-concentric", "--n", "100"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 200);
    assert!(text.lines().all(|l| l.split(',').count() == 3));
}

#[test]
fn boundary_of_knn_circles() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("ccd.csv");
    let report = dir.path().join("boundary.json");
    let points = dir.path().join("boundary.csv");
    let g = dimgrid(&["generate", "--generator", "circles-concentric", "--seed", "2", "--out", p(&train)]);
    assert!(g.status.success());
    let o = dimgrid(&[
        "boundary", "--train", p(&train), "--k", "5", "--resolution", "256", "--report", p(&report),
        "--boundary-out", p(&points),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert_eq!(v["dcf_dimension"], 1);
    assert_eq!(v["k"], 5);
    let lines = std::fs::read_to_string(points).unwrap().lines().count();
    assert_eq!(v["boundary_points"], lines);
}

#[test]
fn boundary_needs_two_classes() {
    let dir = tempfile::tempdir().unwrap();
    let raster = dir.path().join("r.csv");
    std::fs::write(&raster, "1,1\n1,1\n").unwrap();
    assert_eq!(dimgrid(&["boundary", "--raster", p(&raster)]).status.code(), Some(3));
}

#[test]
fn benchmark_table() {
    let o = dimgrid(&[
        "benchmark", "--suite", "desk", "--n", "300", "--repeats", "2", "--methods", "dcf,twonn", "--seed", "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "manifold,intrinsic,ambient,n,noise,method,runs,mae,bias,exact_pct");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 2 + 2);
    assert!(rows.iter().filter(|r| r.starts_with("all,")).all(|r| r.contains(",6,")));
}

#[test]
fn sequential_and_parallel_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.csv");
    let g = dimgrid(&["generate", "--generator", "hypersphere", "--intrinsic", "2", "--n", "600", "--noise", "0.01", "--out", p(&input)]);
    assert!(g.status.success());
    let run = |extra: &[&str]| {
        let mut args = vec!["estimate", "--in", p(&input), "--d-max", "4"];
        args.extend_from_slice(extra);
        json(&dimgrid(&args))
    };
    let par = run(&[]);
    let seq = run(&["--sequential"]);
    assert_eq!(par["weights"], seq["weights"]);
    assert_eq!(par["m_hat"], 2);
}
