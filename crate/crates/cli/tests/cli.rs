use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn dyadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadic"))
        .args(args)
        .env("DYADIC_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check named {name}"))
}

#[test]
fn coloring_on_l3() {
    let l3 = data("l3.json");
    let out = dyadic(&["coloring", "--input", l3.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "dyadic-report/1");
    for v in r["results"]["membership"]["vertices"].as_array().unwrap() {
        assert_eq!(v["probability"]["numerator"], "1");
        assert_eq!(v["probability"]["denominator"], "2");
    }
    assert_eq!(check(&r, "recoloring_injective")["passed"], true);
    assert_eq!(check(&r, "tree_root_probability")["passed"], true);
}

#[test]
fn triangle_violation_is_an_input_error() {
    let bad = data("triangle_violation.json");
    let out = dyadic(&["validate", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = dyadic(&["validate", "--input", "/nonexistent/space.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_flags_are_config_errors() {
    let cloud = data("cloud.csv");
    let cloud = cloud.to_str().unwrap();
    assert_eq!(dyadic(&["grids", "--input", cloud]).status.code(), Some(2));
    let out = dyadic(&["goodness", "--input", cloud, "--delta", "0.5", "--gamma", "0.5", "--r", "1", "--trials", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dyadic(&["lattice", "--input", cloud, "--delta", "1.5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dyadic(&["validate", "--input", cloud, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_reports() {
    let cloud = data("cloud.csv");
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_dyadic"))
            .args(["goodness", "--input", cloud.to_str().unwrap(), "--delta", "0.5", "--gamma", "0.5", "--r", "3"])
            .args(["--trials", "2000", "--seed", "11", "--level", "-1", "--freeze-from", "-1", "--out", path.to_str().unwrap()])
            .env("DYADIC_WORKERS", workers)
            .status()
            .unwrap();
        assert!(status.success());
        texts.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn lattice_reports_every_level() {
    let cloud = data("cloud.csv");
    let out = dyadic(&["lattice", "--input", cloud.to_str().unwrap(), "--delta", "0.5", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let levels = r["results"]["levels"].as_array().unwrap();
    assert_eq!(levels.len() as i64, r["results"]["finest"].as_i64().unwrap() - r["results"]["coarsest"].as_i64().unwrap() + 1);
    assert_eq!(levels[0]["cubes"].as_array().unwrap().len(), 1);
    assert_eq!(check(&r, "structure")["passed"], true);
    assert!(r["results"]["chain_separation"]["skipped"].is_string());
}

#[test]
fn goodness_csv_rows() {
    let cloud = data("cloud.csv");
    let out = dyadic(&[
        "goodness", "--input", cloud.to_str().unwrap(), "--delta", "0.5", "--gamma", "0.5", "--r", "3",
        "--trials", "500", "--seed", "2", "--level", "-1", "--freeze-from", "-1", "--eps-schedule", "0.5,0.25,0.125", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,estimate,ci_low,ci_high");
    assert_eq!(lines.len(), 4);
    for (line, eps) in lines[1..].iter().zip([0.5, 0.25, 0.125]) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], eps);
        assert!(fields[2] <= fields[1] && fields[1] <= fields[3]);
    }
}

#[test]
fn floating_center_asks_for_a_frozen_grid() {
    let cloud = data("cloud.csv");
    let out = dyadic(&[
        "goodness", "--input", cloud.to_str().unwrap(), "--delta", "0.5", "--gamma", "0.5", "--r", "3",
        "--trials", "2000", "--seed", "11", "--level", "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--freeze-from"));
}

#[test]
fn non_geometric_schedule_is_rejected() {
    let cloud = data("cloud.csv");
    let out = dyadic(&[
        "goodness", "--input", cloud.to_str().unwrap(), "--delta", "0.5", "--gamma", "0.5", "--r", "3",
        "--trials", "10", "--seed", "2", "--eps-schedule", "0.5,0.4,0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn a2_example() {
    let l3 = data("l3.json");
    let w = data("l3_weights.json");
    let out = dyadic(&["a2", "--input", l3.to_str().unwrap(), "--weights", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["a2"]["value"], 25.0 / 16.0);
    assert_eq!(r["results"]["a2_inverse_weight"], 25.0 / 16.0);
}
