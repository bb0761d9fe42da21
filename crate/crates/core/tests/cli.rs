use std::fs;
use std::path::Path;
use std::process::Command;

use fhc_core::cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fhc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(line: &str, i: usize) -> f64 {
    line.split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn polys_rs_rows_within_bound() {
    let (code, out, _) = call(&["polys", "--family", "rs", "--m", "1..64", "--p", "inf"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("m,family,p,norm,bound,ones_count"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 64);
    for row in rows {
        let m = field(row, 0);
        assert!(field(row, 3) <= 5.0 * m.sqrt());
    }
}

#[test]
fn polys_vp_l1() {
    let (code, out, _) = call(&["polys", "--family", "vp", "--m", "4", "--p", "1"]);
    assert_eq!(code, EXIT_OK);
    let row = out.lines().nth(1).unwrap();
    assert!(field(row, 3) <= 3.0);
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["polys", "--family", "rs", "--m", "0"]).0, EXIT_USAGE);
    assert_eq!(call(&["polys", "--family", "rs", "--m", "9..3"]).0, EXIT_USAGE);
    assert_eq!(call(&["polys", "--family", "xx", "--m", "3"]).0, EXIT_USAGE);
    assert_eq!(call(&["verify", "nonsense"]).0, EXIT_USAGE);
    assert_eq!(call(&["density", "--k", "1", "--mode", "fast"]).0, EXIT_USAGE);
    assert_eq!(call(&["density", "--k", "1", "--precision-bits", "64"]).0, EXIT_USAGE);
    assert_eq!(call(&["coeffs", "--lo", "5", "--hi", "2"]).0, EXIT_USAGE);
    assert_eq!(call(&[]).0, EXIT_USAGE);
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("build-and-check"));
}

#[test]
fn verify_selectors() {
    let (code, out, _) = call(&["verify", "sum", "--m", "1..50", "--a", "0,0.25,0.5,1"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["sum"]["max_ratio"].as_f64().unwrap() <= 1.0);

    let (code, out, _) = call(&["verify", "heat", "--n", "2..64"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for row in v["heat"]["rows"].as_array().unwrap() {
        let n = row["n"].as_f64().unwrap();
        assert!(row["max_deviation"].as_f64().unwrap() <= 12.0 / n);
    }

    assert_eq!(call(&["verify", "stirling", "--x", "2..100"]).0, EXIT_OK);
    assert_eq!(call(&["verify", "loglinear", "--m", "1..10"]).0, EXIT_OK);
    assert_eq!(call(&["verify", "glue", "--r-max", "200"]).0, EXIT_OK);
}

fn overrides(dir: &Path) -> String {
    let path = dir.join("ov.txt");
    fs::write(&path, "0, 1, 1\n").unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn coeffs_window_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let ov = overrides(dir.path());
    let (code, out, _) = call(&["coeffs", "--overrides", &ov, "--lo", "1020100", "--hi", "1021200", "--nonzero"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("j,numerator,denominator,imag_numerator,imag_denominator"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let js: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let expected: Vec<u64> = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9].iter().map(|i| 1010 * 1010 + 101 * i).collect();
    assert_eq!(js, expected);
    let signs: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(signs, ["1", "1", "1", "-1", "1", "1", "-1", "1", "1", "1"]);
    assert!(rows.iter().all(|r| r[2] == "1" && r[3] == "0"));
}

#[test]
fn density_report() {
    let dir = tempfile::tempdir().unwrap();
    let ov = overrides(dir.path());
    let (code, out, _) = call(&["density", "--overrides", &ov, "--k", "1", "--horizon", "4000000"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["visits"].as_u64().unwrap() > 0);
}

#[test]
fn build_and_check_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let ov = overrides(dir.path());
    let names = ["growth.csv", "growth.json", "window.csv", "blocks.json", "visits.json", "density.json", "summary.json", "circle.csv"];
    let mut runs = Vec::new();
    for i in 0..2 {
        let out_dir = dir.path().join(format!("run{i}"));
        let (code, out, err) = call(&[
            "build-and-check",
            "--overrides",
            &ov,
            "--gamma",
            "10",
            "--c",
            "1",
            "--p",
            "inf",
            "--k-max",
            "2",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK, "{out}\n{err}");
        assert!(out.contains("overall: pass"));
        runs.push(names.map(|n| fs::read(out_dir.join(n)).unwrap()));
    }
    for (name, (a, b)) in names.iter().zip(runs[0].iter().zip(runs[1].iter())) {
        let a = String::from_utf8_lossy(a).replace("run0", "runX");
        let b = String::from_utf8_lossy(b).replace("run1", "runX");
        assert_eq!(a, b, "{name} differs between runs");
    }
    let summary: serde_json::Value = serde_json::from_slice(&runs[0][6]).unwrap();
    assert_eq!(summary["pass"], true);
    let growth = &summary["growth"];
    assert!(growth["window"]["max_ratio_upper"].as_f64().unwrap() <= growth["guaranteed"].as_f64().unwrap());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"mode": "fast"}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(call(&["density", "--config", cfg, "--k", "1"]).0, EXIT_USAGE);
    assert_eq!(call(&["density", "--config", cfg, "--mode", "standard", "--k", "1", "--horizon", "10000"]).0, EXIT_OK);
    let missing = dir.path().join("missing.json");
    assert_eq!(call(&["density", "--config", missing.to_str().unwrap(), "--k", "1"]).0, EXIT_FAIL);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fhc");
    let ok = Command::new(bin).args(["polys", "--family", "rs", "--m", "1..8"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("m,family,p,norm,bound,ones_count"));
    let bad = Command::new(bin).args(["polys", "--family", "rs", "--m", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(!bad.stderr.is_empty());
}
