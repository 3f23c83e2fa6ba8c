//! The `reilly` binary: exit codes, report files and scenario handling.

use std::path::PathBuf;
use std::process::{Command, Output};

fn reilly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reilly")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reilly-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn minkowski_on_the_ball_is_sharp() {
    let out = reilly(&["audit", "minkowski", "--geometry", "flat-ball3", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let audit = &report["steps"][0]["audits"][0];
    assert_eq!(audit["name"], "minkowski");
    assert_eq!(audit["verdict"], "PASS");
    assert_eq!(audit["sharp"], true);
    let lhs = audit["lhs"].as_f64().unwrap();
    assert!((lhs / (16.0 * std::f64::consts::PI.powi(2)) - 1.0).abs() < 1e-4);
    assert_eq!(report["metadata"]["tool"], "reilly");
}

#[test]
fn unmet_hypothesis_exits_with_two() {
    let out = reilly(&["audit", "heintze-karcher", "--geometry", "flat-disk", "--m", "2", "--v", "1 - x^2/4 - y^2/4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["steps"][0]["audits"][0]["verdict"], "HYPOTHESIS_UNMET");
}

#[test]
fn input_errors_exit_with_two_and_are_reported() {
    let out = reilly(&["eig", "steklov", "--geometry", "no-such-geometry"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["steps"][0]["error"].as_str().unwrap().contains("no-such-geometry"));

    let out = reilly(&["eig", "closed", "--geometry", "round-sphere2", "--phi", "x +* y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["steps"][0]["error"].as_str().unwrap().contains("position"));
}

#[test]
fn csv_and_plot_outputs_are_written() {
    let dir = scratch("outputs");
    let (report, csv, plot) = (dir.join("r.json"), dir.join("r.csv"), dir.join("r.dat"));
    let out = reilly(&[
        "verify-reilly",
        "--geometry",
        "flat-disk",
        "--phi",
        "sin(x)/5",
        "--v",
        "1 + x^2/4",
        "--f",
        "x^2 + y",
        "--json",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("name,lhs,rhs,relative_margin,hypotheses,sharp,verdict\n"));
    assert!(table.contains("reilly-order"));
    let rows = std::fs::read_to_string(&plot).unwrap();
    let points: Vec<(f64, f64)> = rows
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(points.len(), 4);
    assert!(points.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1));
    let parsed: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed["steps"][0]["refinement"].as_array().unwrap().len(), 4);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn scenario_steps_inherit_shared_keys() {
    let dir = scratch("scenario");
    let path = dir.join("s.toml");
    std::fs::write(
        &path,
        "geometry = \"flat-disk\"\nlevel = 1\n[[steps]]\ncommand = \"eig wentzell\"\nbeta = 1.0\n[[steps]]\ncommand = \"eig closed\"\ngeometry = \"round-sphere2\"\n",
    )
    .unwrap();
    let out = reilly(&["run", path.to_str().unwrap(), "--extrapolate", "false"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let steps = report["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 2);
    assert_eq!(steps[0]["geometry"], "flat-disk");
    assert_eq!(steps[1]["geometry"], "round-sphere2");
    assert!(steps.iter().all(|s| s["grid"]["level"] == 1));
    let lambda = steps[0]["eigenvalues"][0]["value"].as_f64().unwrap();
    assert!((lambda - 2.0).abs() < 2e-2);
    std::fs::write(&path, "geometry = \"flat-disk\"\nbogus = 1\n").unwrap();
    assert_eq!(reilly(&["run", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn catalog_lists_charts_and_surfaces() {
    let out = reilly(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let ids: Vec<&str> = report["steps"][0]["catalog"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    for id in ["flat-disk", "flat-ball3", "round-sphere3", "ellipsoid", "sphere-in-h3"] {
        assert!(ids.contains(&id), "{id} missing from {ids:?}");
    }
}

#[test]
fn shipped_scenarios_pass() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(paths.len() >= 3);
    for path in paths {
        let out = reilly(&["run", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        assert!(json(&out)["steps"].as_array().unwrap().iter().all(|s| s["error"].is_null()));
    }
}
