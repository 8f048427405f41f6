use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn relhyp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relhyp"))
        .args(args)
        .env_remove("RELHYP_MAX_VERTICES")
        .env_remove("RELHYP_MAX_SIMPLICES")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_documents_caps_and_exit_codes() {
    let o = relhyp(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for needle in ["RELHYP_MAX_VERTICES", "RELHYP_MAX_SIMPLICES", "horoball-check", "corona-betti", "Exit status"] {
        assert!(text.contains(needle), "{needle}");
    }
}

#[test]
fn roundtrip_passes_with_stamped_json() {
    let o = relhyp(&["roundtrip", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["cylinders"], 36);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert!(v["toolkit_version"].is_string());
    assert_eq!(v["seed"], 0);
}

#[test]
fn malformed_config_exits_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"truncation": {"depth": "deep"}}"#);
    let o = relhyp(&["--config", &cfg, "roundtrip"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("truncation.depth"), "{}", stderr(&o));

    let cfg = write(dir.path(), "pair.json", r#"{"pair": {"group": {"kind": "free_group", "rank": 2}, "peripherals": [{"generators": [7]}]}}"#);
    let o = relhyp(&["--config", &cfg, "roundtrip"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pair.peripherals[0]"), "{}", stderr(&o));

    // the whole group as a peripheral has finite index
    let cfg = write(dir.path(), "whole.json", r#"{"pair": {"group": {"kind": "free_group", "rank": 2}, "peripherals": [{"generators": [0, 1]}]}}"#);
    let o = relhyp(&["--config", &cfg, "roundtrip"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("finite index"), "{}", stderr(&o));
}

#[test]
fn depth_window_constraint_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "w.json", r#"{"rips": {"scale": 2, "window": {"lower": 1, "upper": 3}}}"#);
    let o = relhyp(&["--config", &cfg, "betti"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rips.window"), "{}", stderr(&o));
}

#[test]
fn budget_exceeded_exits_3() {
    let o = Command::new(env!("CARGO_BIN_EXE_relhyp"))
        .args(["horoball-check", "--base-len", "8", "--depth", "3"])
        .env("RELHYP_MAX_VERTICES", "20")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unsupported_parameters_exit_2() {
    assert_eq!(relhyp(&["corona-betti", "--n", "4"]).status.code(), Some(2));
    assert_eq!(relhyp(&["corona-betti", "--m", "100000", "--depth", "2"]).status.code(), Some(2));
    assert_eq!(relhyp(&["action-check", "--depth", "3", "--cutoff", "3"]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv").display().to_string();
    let b = dir.path().join("b.csv").display().to_string();
    for out in [&a, &b] {
        let o = relhyp(&["--seed", "11", "--out", out, "delta-scan", "--radii", "2,3", "--sample", "10"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.lines().next().unwrap().contains("seed=11"));
    assert!(text.lines().all(|l| l.starts_with('#') || l.starts_with("radius") || l.ends_with(",11")));

    let j1 = relhyp(&["corona-betti", "--n", "2", "--m", "3"]).stdout;
    let j2 = relhyp(&["corona-betti", "--n", "2", "--m", "3"]).stdout;
    assert_eq!(j1, j2);
}

#[test]
fn free_group_delta_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f2.json", r#"{"pair": {"group": {"kind": "free_group", "rank": 2}}}"#);
    let o = relhyp(&["--config", &cfg, "delta-scan", "--radii", "2,3,4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!((cols[2], cols[3]), ("0", "0"), "{row}");
    }
}

#[test]
fn betti_on_a_facet_list() {
    let dir = tempfile::tempdir().unwrap();
    let rp2 = r#"{"facets": [[0,1,2],[0,2,3],[0,3,4],[0,4,5],[0,1,5],[1,2,4],[2,3,5],[1,3,4],[2,4,5],[1,3,5]]}"#;
    let path = write(dir.path(), "rp2.json", rp2);
    let o = relhyp(&["betti", "--complex", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["homology"]["1"]["torsion"], serde_json::json!([2]));
    assert_eq!(v["report"]["reduced_cohomology"]["2"]["torsion"], serde_json::json!([2]));

    let bad = write(dir.path(), "bad.json", r#"{"facets": [[0, "x"]]}"#);
    let o = relhyp(&["betti", "--complex", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("facets[0][1]"), "{}", stderr(&o));
}

#[test]
fn tree_ball_rips_is_acyclic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f2.json", r#"{"pair": {"group": {"kind": "free_group", "rank": 2}}}"#);
    for scale in ["1", "2"] {
        let o = relhyp(&["--config", &cfg, "betti", "--radius", "3", "--scale", scale]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["report"]["expect_contractible"], true);
        assert_eq!(v["report"]["reduced_homology_vanishes"], true);
    }
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot").display().to_string();
    let out = dir.path().join("t.csv").display().to_string();
    let o = relhyp(&["--out", &out, "delta-scan", "--radii", "2", "--dot", &dot]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("graph augmented {"));
    assert!(text.trim_end().ends_with('}'));
}
