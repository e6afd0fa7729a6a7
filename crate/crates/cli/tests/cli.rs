//! End-to-end runs of the `pencil` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pencil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencil")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn build_example1_writes_mesh_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = pencil(&["build", "--preset", "example1", "-o", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = stdout_json(&out);
    assert!((summary["c_estimate"].as_f64().unwrap() - 3f64.sqrt() / 2.0).abs() <= 1e-9);
    assert_eq!(summary["vertices"], 200 * 50);
    assert_eq!(summary["faces"], 199 * 49);
    assert_eq!(summary["defects"], 0);
    let obj = std::fs::read_to_string(dir.path().join("example1.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 10_000);
    assert_eq!(obj.lines().next(), Some("v 1.00000000 2.44929360e-16 0.00000000"));
    let csv = std::fs::read_to_string(dir.path().join("example1.csv")).unwrap();
    assert!(csv.starts_with("s,inner,phi2,phi3,theta\n"));
}

#[test]
fn infeasible_constant_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = pencil(&["build", "--preset", "example2", "--c", "1", "-o", path(dir.path())]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("infeasible"));
    let out = pencil(&["synthesize", "--preset", "example2", "--c", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn malformed_expression_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"curve": {"x": "cos(s)", "y": "sin(s) +* 2", "z": "0", "param": "s", "range": [0, 1]},
            "marching": {"mode": "explicit", "explicit": {"u": "t", "v": "t", "w": "t"}}}"#,
    )
    .unwrap();
    let out = pencil(&["build", "--config", cfg.to_str().unwrap(), "-o", path(dir.path())]);
    assert_eq!(code(&out), 2);
    let msg = stderr(&out);
    assert!(msg.contains("curve.y") && msg.contains("offset 8"), "{msg}");
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = path(dir.path());
    assert_eq!(code(&pencil(&["verify", "--preset", "example9", "-o", o])), 2);
    assert_eq!(code(&pencil(&["verify", "-o", o])), 2);
    assert_eq!(code(&pencil(&["verify", "--preset", "example1", "--sign", "0.5", "-o", o])), 2);
    assert_eq!(code(&pencil(&["verify", "--preset", "example1", "--samples", "3", "-o", o])), 2);
    assert_eq!(code(&pencil(&["frobnicate", "--preset", "example1"])), 2);
    let cfg = dir.path().join("reversed.json");
    std::fs::write(
        &cfg,
        r#"{"curve": {"x": "cos(s)", "y": "sin(s)", "z": "0", "param": "s", "range": [1, 0]},
            "marching": {"mode": "explicit", "explicit": {"u": "t", "v": "t", "w": "t"}}}"#,
    )
    .unwrap();
    assert_eq!(code(&pencil(&["verify", "--config", cfg.to_str().unwrap(), "-o", o])), 2);
    let cfg = dir.path().join("no_c.json");
    std::fs::write(
        &cfg,
        r#"{"curve": {"x": "cos(s)", "y": "sin(s)", "z": "0", "param": "s", "range": [0, 1]},
            "marching": {"mode": "synthesized"}}"#,
    )
    .unwrap();
    assert_eq!(code(&pencil(&["synthesize", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn verify_reports_the_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = path(dir.path());
    let out = pencil(&["verify", "--preset", "example2", "-o", o]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!((stdout_json(&out)["c_estimate"].as_f64().unwrap() - 0.5).abs() <= 1e-9);
    assert!(dir.path().join("example2.csv").exists());

    // controls y = 1/3 on the circle: c = y v / sqrt((y v)^2 + (z w)^2)
    let (v, w) = (3f64.sqrt() / 2.0 / 3.0, 0.5);
    let out = pencil(&["verify", "--preset", "example1b", "-o", o]);
    assert_eq!(code(&out), 0);
    let c = stdout_json(&out)["c_estimate"].as_f64().unwrap();
    assert!((c - v / v.hypot(w)).abs() <= 1e-12, "{c}");
    assert!((c - 3f64.sqrt() / 2.0).abs() > 0.1);
}

#[test]
fn perturbed_preset_is_not_dtype() {
    let dir = tempfile::tempdir().unwrap();
    let out = pencil(&["verify", "--preset", "example1-perturbed", "-o", path(dir.path())]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["verdict"], false);
    assert!(dir.path().join("example1-perturbed.csv").exists());
}

#[test]
fn tolerance_flag_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let o = path(dir.path());
    let out = pencil(&["verify", "--preset", "example1-perturbed", "--tol", "0.5", "-o", o]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["tolerance"], 0.5);
    let out = pencil(&["verify", "--preset", "example3", "-o", o]);
    assert_eq!(stdout_json(&out)["tolerance"], 1e-6);
    let out = pencil(&["verify", "--preset", "example2", "--samples", "64", "-o", o]);
    assert_eq!(stdout_json(&out)["samples"], 64);
}

#[test]
fn classify_presets() {
    let kind = |preset: &str| {
        let out = pencil(&["classify", "--preset", preset]);
        assert_eq!(code(&out), 0);
        stdout_json(&out)
    };
    assert_eq!(kind("example1")["kind"], "Planar");
    let helix = kind("example2");
    assert_eq!(helix["kind"], "GeneralHelix");
    assert!((helix["evidence"]["value"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert_eq!(kind("example4")["kind"], "Salkowski");
}

#[test]
fn synthesize_emits_a_usable_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = path(dir.path());
    for preset in ["example1", "example3", "example4"] {
        let out = pencil(&["synthesize", "--preset", preset]);
        assert_eq!(code(&out), 0, "{preset}: {}", stderr(&out));
        let cfg = dir.path().join(format!("{preset}-synth.json"));
        std::fs::write(&cfg, &out.stdout).unwrap();
        let out = pencil(&["verify", "--config", cfg.to_str().unwrap(), "-o", o]);
        assert_eq!(code(&out), 0, "{preset}: {}", stderr(&out));
        let c = stdout_json(&out)["c_estimate"].as_f64().unwrap();
        assert!((c - 3f64.sqrt() / 2.0).abs() <= 1e-8, "{preset}: {c}");
    }
}

#[test]
fn synthesize_reports_the_salkowski_feasible_interval() {
    let out = pencil(&["synthesize", "--preset", "example4"]);
    let cfg = stdout_json(&out);
    let domain = cfg["marching"]["feasible_domain"].as_array().unwrap();
    assert_eq!(domain.len(), 1);
    let end = domain[0][1].as_f64().unwrap();
    assert!((end - 26f64.sqrt() * std::f64::consts::PI / 6.0).abs() <= 1e-8);
    assert_eq!(cfg["marching"]["mode"], "synthesized");
    assert_eq!(cfg["grid"]["s_range"][1].as_f64().unwrap(), end);

    let out = pencil(&["synthesize", "--preset", "example1"]);
    assert!(stdout_json(&out)["marching"].get("feasible_domain").is_none());
}

#[test]
fn sign_override_flips_the_branch() {
    let out = pencil(&["synthesize", "--preset", "example2", "--sign", "-1"]);
    let w = stdout_json(&out)["marching"]["product"]["W"].as_str().unwrap().to_string();
    assert!(w.starts_with('-'), "{w}");
}

#[test]
fn build_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(code(&pencil(&["build", "--preset", "example3", "-o", path(d.path())])), 0);
    }
    for f in ["example3.obj", "example3.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn config_output_paths_are_used_without_o() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scene.json");
    let obj = dir.path().join("nested/mesh.obj");
    let csv = dir.path().join("nested/report.csv");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "name": "tiny",
            "curve": {"x": "cos(s)", "y": "sin(s)", "z": "0", "param": "s", "range": [0, "pi"], "unit_speed": true},
            "marching": {"mode": "explicit", "explicit": {"u": "t", "v": "t", "w": "t*s"}},
            "grid": {"ns": 3, "nt": 2},
            "outputs": {"obj_path": obj, "csv_path": csv}
        })
        .to_string(),
    )
    .unwrap();
    let out = pencil(&["build", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(std::fs::read_to_string(&obj).unwrap().lines().filter(|l| l.starts_with("f ")).count(), 2);
    assert!(csv.exists());
}
