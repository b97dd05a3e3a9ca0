//! End-to-end tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mahlerlab")
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mahlerlab-cli-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn mahler_body_cube3_exact_and_rational() {
    let dir = workdir("cube3");
    let body = dir.join("cube3.json");
    write(
        &body,
        r#"{"n":3,"rep":"H","generators":[[1,0,0],[0,1,0],[0,0,1]]}"#,
    );
    let report = dir.join("report.json");
    let status = Command::new(bin())
        .args(["mahler-body", "--input"])
        .arg(&body)
        .args(["--method", "exact", "--report"])
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let product = rep["extra"]["product"].as_f64().unwrap();
    assert!((product - 32.0 / 3.0).abs() < 1e-12);

    let out = Command::new(bin())
        .args(["mahler-body", "--input"])
        .arg(&body)
        .args(["--method", "rational"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("product = 32/3"));
}

#[test]
fn legendre_transform_grid_file() {
    let dir = workdir("legendre");
    let grid = dir.join("quad.json");
    let axes = r#"{"dims":1,"axes":[{"min":-4.0,"max":4.0,"count":801}],"values":["#;
    let vals: Vec<String> = (0..801)
        .map(|i| {
            let x = -4.0 + 8.0 * i as f64 / 800.0;
            format!("{}", 0.5 * x * x)
        })
        .collect();
    write(&grid, &format!("{axes}{}]}}", vals.join(",")));
    let out_grid = dir.join("conj.json");
    let report = dir.join("report.json");
    let status = Command::new(bin())
        .args(["legendre", "--input"])
        .arg(&grid)
        .args([
            "--dual-box",
            "3",
            "--dual-nodes",
            "241",
            "--method",
            "both",
            "--output",
        ])
        .arg(&out_grid)
        .arg("--report")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let conj: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_grid).unwrap()).unwrap();
    // self-dual quadratic: value at the middle node (ξ = 0) is ≈ 0
    let values = conj["values"].as_array().unwrap();
    assert_eq!(values.len(), 241);
    assert!(values[120].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn contour_gaussian_matches_circle_constant() {
    let dir = workdir("contour");
    let phi = dir.join("gaussian.json");
    write(&phi, r#"{"family":"quadratic","matrix":[[1.0]]}"#);
    let report = dir.join("report.json");
    let status = Command::new(bin())
        .args(["contour", "--phi"])
        .arg(&phi)
        .args([
            "--method",
            "ts-quadrature",
            "--nodes",
            "121",
            "--no-chain",
            "--report",
        ])
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let re = rep["extra"]["re"].as_f64().unwrap();
    assert!((re / 2.0 - std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn parse_errors_exit_2_and_check_failures_exit_1() {
    let dir = workdir("errors");
    let bad = dir.join("bad.json");
    write(&bad, "{ not json");
    let status = Command::new(bin())
        .args(["mahler-body", "--input"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // degenerate body: numeric failure → 3
    let degenerate = dir.join("deg.json");
    write(&degenerate, r#"{"n":2,"rep":"V","generators":[[1,0]]}"#);
    let status = Command::new(bin())
        .args(["mahler-body", "--input"])
        .arg(&degenerate)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn theorem21_quadratics_report_and_csv() {
    let dir = workdir("theorem21");
    let report = dir.join("sweep.json");
    let status = Command::new(bin())
        .args(["theorem21", "--family", "quadratic", "--n", "2", "--count", "3", "--seed", "1", "--report"])
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let rows = rep["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row["pass"].as_bool().unwrap());
        // quadratic margins are exactly 2^n
        assert!((row["computed"].as_f64().unwrap() - 4.0).abs() < 1e-4);
    }
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4); // header + 3 members
}

#[test]
fn suite_quick_is_deterministic_byte_for_byte() {
    let dir = workdir("suite");
    let (r1, r2) = (dir.join("s1.json"), dir.join("s2.json"));
    // different worker counts must not change a single numeric output
    for (r, workers) in [(&r1, "1"), (&r2, "2")] {
        let status = Command::new(bin())
            .args(["suite", "--profile", "quick", "--seed", "7", "--workers", workers, "--report"])
            .arg(r)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&r1).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&r2).unwrap()).unwrap();
    for r in [&mut a, &mut b] {
        r["wall_ms"] = 0.into();
        r["workers"] = 0.into();
    }
    assert_eq!(a, b);
}
