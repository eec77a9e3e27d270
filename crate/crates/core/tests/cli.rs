//! End-to-end checks against the compiled `circle-rope` binary.

use std::process::{Command, Output};

fn circle_rope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circle-rope"))
        .args(args)
        .env_remove("CIRCLE_ROPE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn ptd_table_has_four_rows() {
    let out =
        circle_rope(&["ptd", "--layout", "i3x3,t5", "--schemes", "hard,unordered,spatial,circle", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("scheme,ptd,convention,arrangement\n"));
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    let value = |i: usize| rows[i][1].parse::<f64>().unwrap();
    assert!((value(0) - 2.22).abs() <= 0.01);
    assert_eq!(value(1), 0.0);
    assert!((0.60..=0.70).contains(&value(2)));
    assert_eq!(rows[2][3], "i3x3@0,t5@3");
    assert!(value(3) < 1e-9);
}

#[test]
fn ptd_without_images_exits_2() {
    let out = circle_rope(&["ptd", "--layout", "t3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PTD requires both modalities"));
}

#[test]
fn malformed_layout_names_segment() {
    let out = circle_rope(&["ptd", "--layout", "i3x3,i2y2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("i2y2"));
}

#[test]
fn ptd_single_scheme() {
    let out = circle_rope(&["ptd", "--layout", "i2x2,t1", "--schemes", "unordered", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v[0]["ptd"].as_f64(), Some(0.0));
}

#[test]
fn project_circle2d_rows_on_radius() {
    let out =
        circle_rope(&["project", "--layout", "i3x3,t1", "--stage", "circle2d", "--alpha", "0", "--radius", "fixed:10"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 9);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0], k.to_string());
        let x: f64 = row[1].parse().unwrap();
        let y: f64 = row[2].parse().unwrap();
        let z: f64 = row[3].parse().unwrap();
        assert!((x.hypot(y) - 10.0).abs() < 1e-9);
        assert_eq!(z, 0.0);
    }
}

#[test]
fn project_projected_rows_in_plane() {
    let out = circle_rope(&["project", "--layout", "t2,i3x3", "--stage", "projected", "--format", "json"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0]["token_id"], 2);
    for r in rows {
        let s = r["x"].as_f64().unwrap() + r["y"].as_f64().unwrap() + r["z"].as_f64().unwrap();
        assert!(s.abs() < 1e-9);
    }
}

#[test]
fn project_fused_zero_beta_is_centered_grid() {
    let out = circle_rope(&["project", "--layout", "i3x3,t1", "--stage", "fused", "--beta", "0"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    for (k, row) in rows.iter().enumerate() {
        let coords: Vec<f64> = row[1..].iter().map(|c| c.parse().unwrap()).collect();
        assert_eq!(coords, vec![0.0, (k / 3) as f64 - 1.0, (k % 3) as f64 - 1.0]);
    }
}

#[test]
fn project_rejects_unknown_stage() {
    let out = circle_rope(&["project", "--layout", "i3x3", "--stage", "sphere"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn attn_unordered_has_zero_spread() {
    let out = circle_rope(&["attn", "--layout", "i3x3,t5", "--scheme", "unordered", "--seed", "7"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let layers = report["schemes"]["unordered"].as_object().unwrap();
    assert_eq!(layers.len(), 36);
    for stats in layers.values() {
        assert_eq!(stats["spread"].as_f64(), Some(0.0));
    }
}

#[test]
fn attn_is_byte_identical_across_runs() {
    let args = ["attn", "--layout", "t2,i4x3,t5", "--seed", "11", "--layers", "6", "--head-dim", "16"];
    let a = circle_rope(&args);
    let b = circle_rope(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn attn_seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_circle-rope"));
        cmd.args(["attn", "--layout", "i2x2,t3", "--layers", "2", "--head-dim", "8"]).args(extra);
        match env {
            Some(v) => cmd.env("CIRCLE_ROPE_SEED", v),
            None => cmd.env_remove("CIRCLE_ROPE_SEED"),
        };
        cmd.output().unwrap()
    };
    assert_eq!(run(Some("5"), &[]).stdout, run(None, &["--seed", "5"]).stdout);
    assert_ne!(run(Some("5"), &[]).stdout, run(Some("6"), &[]).stdout);
    assert_eq!(run(Some("nope"), &[]).status.code(), Some(2));
}

#[test]
fn attn_rejects_bad_sections() {
    let out = circle_rope(&["attn", "--layout", "i3x3,t5", "--sections", "1,1,1", "--head-dim", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_feeds_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "radius = \"fixed:4\"\nalpha = 0.0\n").unwrap();
    let path = path.to_str().unwrap();
    let out = circle_rope(&["project", "--layout", "i2x2", "--stage", "circle2d", "--config", path]);
    let rows = csv_rows(&stdout(&out));
    let r: f64 = rows[1][1].parse::<f64>().unwrap().hypot(rows[1][2].parse().unwrap());
    assert!((r - 4.0).abs() < 1e-12);

    let out =
        circle_rope(&["project", "--layout", "i2x2", "--stage", "circle2d", "--config", path, "--radius", "fixed:7"]);
    let rows = csv_rows(&stdout(&out));
    let r: f64 = rows[1][1].parse::<f64>().unwrap().hypot(rows[1][2].parse().unwrap());
    assert!((r - 7.0).abs() < 1e-12);
}
