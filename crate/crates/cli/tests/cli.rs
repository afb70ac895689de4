use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use spinscatter::quantum::ProcessMatrix;
use spinscatter::tomography::read_counts_csv;

fn spinscatter(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinscatter"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = spinscatter(dir, args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn chi(dir: &Path, name: &str) -> ProcessMatrix {
    serde_json::from_value(json(dir, name)["pauli"].clone()).unwrap()
}

/// Rows of a hash-prefixed CSV as floats, header dropped.
fn csv_rows(dir: &Path, name: &str) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(dir.join(name)).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash: "));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn process_defaults_within_band() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["process", "--seed", "11"]);
    let err = chi(d.path(), "chi_reconstructed.json").frobenius_distance(&chi(d.path(), "chi_averaged.json"));
    assert!(err < 0.15, "{err}");
    let text = fs::read_to_string(d.path().join("process_counts.csv")).unwrap();
    assert_eq!(read_counts_csv(text.as_bytes()).unwrap().len(), 12);
    assert_eq!(csv_rows(d.path(), "collapse_surface.csv").len(), 2048);
    for entry in fs::read_dir(d.path()).unwrap() {
        let p = entry.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        let hash = json(d.path(), "chi_ideal.json")["config_hash"].as_str().unwrap().to_string();
        assert!(text.contains(&hash), "{}", p.display());
    }
}

#[test]
fn noiseless_process_is_exact() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["process", "--noiseless"]);
    let err = chi(d.path(), "chi_reconstructed.json").frobenius_distance(&chi(d.path(), "chi_averaged.json"));
    assert!(err < 1e-9, "{err}");
    assert!(!d.path().join("process_counts.csv").exists());
}

#[test]
fn full_window_ellipsoid_is_disk() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["process", "--noiseless", "--window-deg", "360"]);
    let r = json(d.path(), "ellipsoid.json")["in_plane_aspect_ratio"].as_f64().unwrap();
    assert!((r - 1.0).abs() < 0.02, "{r}");
}

#[test]
fn maps_locate_pointer_and_entangled_states() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["maps", "--ideal", "--noiseless"]);
    let e = csv_rows(d.path(), "entropy_map.csv");
    let nearest = e.iter().max_by(|a, b| a[0].abs().total_cmp(&b[0].abs())).unwrap();
    assert!(nearest[3] < 0.01, "{nearest:?}");

    ok(d.path(), &["maps"]);
    let s = json(d.path(), "maps_run.json");
    let min = &s["results"]["entropy_min"]["point"];
    assert!(min["x"].as_f64().unwrap().abs() > 0.99);
    let max = &s["results"]["concurrence_max"]["point"];
    assert!(max["x"].as_f64().unwrap().abs() < 0.1);
    assert_eq!(csv_rows(d.path(), "concurrence_map.csv").len(), 2048);
}

#[test]
fn scan_visibilities() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["--ideal", "--noiseless", "scan", "--initial", "x"]);
    let v = json(d.path(), "polarization_scan.json")["results"]["visibility_exact"].as_f64().unwrap();
    assert!((v - 1.0).abs() < 1e-9);
    ok(d.path(), &["--ideal", "--noiseless", "scan", "--initial", "-y"]);
    let v = json(d.path(), "polarization_scan.json")["results"]["visibility_exact"].as_f64().unwrap();
    assert!(v.abs() < 1e-9);
}

#[test]
fn seeded_scan_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        ok(d.path(), &["scan", "--seed", "5", "--initial", "0.6,0,0.8"]);
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("polarization_scan.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(csv_rows(a.path(), "polarization_scan.csv")[0].len(), 3);
}

#[test]
fn sweep_values() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["sweep"]);
    let rows = csv_rows(d.path(), "aspect_ratio.csv");
    let widths: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    for w in [40.0, 90.0, 140.0] {
        assert!(widths.contains(&w));
    }
    ok(d.path(), &["sweep", "--widths", "360"]);
    let r = csv_rows(d.path(), "aspect_ratio.csv")[0][1];
    assert!((r - 1.0).abs() < 0.02);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| spinscatter(d.path(), args).status.code().unwrap();

    assert_eq!(code(&["process"]), 2, "sampled run without a seed");
    assert_eq!(code(&["process", "--na", "1.2", "--noiseless"]), 2);
    assert_eq!(code(&["sweep", "--widths", "0"]), 2);

    let cfg = d.path().join("bad.json");
    fs::write(&cfg, r#"{"noise": {"background": 0.1}}"#).unwrap();
    let out = spinscatter(d.path(), &["maps", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("noise"));

    let blocker = d.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spinscatter"))
        .args(["maps", "--output-dir"])
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_and_flag_precedence() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.json");
    fs::write(&cfg, r#"{"seed": 3, "grid_points": 100, "noise": {"background_fraction": 0.5}}"#).unwrap();
    ok(d.path(), &["maps", "--config", cfg.to_str().unwrap(), "--background", "0.25"]);
    let s = json(d.path(), "maps_run.json");
    assert_eq!(s["noise"]["background_fraction"], 0.25);
    assert_eq!(s["seed"], 3);
    assert_eq!(csv_rows(d.path(), "entropy_map.csv").len(), 100);
}
