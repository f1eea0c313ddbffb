use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gyroled_cli::{run, Pipeline, ScenarioConfig, PRESETS};
use serde_json::Value;

fn gyroled(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gyroled")).args(args).output().expect("spawn")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is json")
}

fn with_dir(preset: &str, dir: &Path) -> ScenarioConfig {
    let mut c = ScenarioConfig::preset(preset).unwrap();
    c.output.dir = dir.to_path_buf();
    c
}

#[test]
fn soliton_audit_passes_with_constant_spin() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Pipeline::Audit, &with_dir("shell-soliton", dir.path())).unwrap();
    assert!(out.passed);
    let drift = &out.summary["drift"];
    for k in ["energy", "angular_momentum", "sigma"] {
        assert!(drift[k].as_f64().unwrap() < 1e-12, "{k}: {}", drift[k]);
    }

    let out = run(Pipeline::Scatter, &with_dir("shell-soliton", dir.path())).unwrap();
    assert!(out.passed);
    let s0 = out.summary["s_b0"].as_f64().unwrap();
    assert_eq!(out.summary["s_b_end"].as_f64().unwrap(), s0);
    assert_eq!(out.summary["max_deviation"].as_f64().unwrap(), 0.0);
}

#[test]
fn print_config_round_trips() {
    for name in PRESETS {
        let out = gyroled(&["--print-config", "--preset", name, "kernel"]);
        assert!(out.status.success(), "{name}");
        let text = String::from_utf8(out.stdout).unwrap();
        let parsed = ScenarioConfig::from_toml(&text).unwrap();
        assert_eq!(parsed, ScenarioConfig::preset(name).unwrap(), "{name}");
        assert_eq!(parsed.to_toml(), text);
    }
}

#[test]
fn config_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    let mut c = ScenarioConfig::preset("shell-soliton").unwrap();
    c.spin.omega0 = Some(0.5);
    fs::write(&path, c.to_toml()).unwrap();
    let out = gyroled(&["rotor", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["summary"]["omega0"].as_f64(), Some(0.5));
}

#[test]
fn malformed_config_is_a_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[units]\ne = 1.0\nradius = 2.0\n").unwrap();
    let out = gyroled(&["kernel", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["message"].as_str().unwrap().contains("radius"));

    fs::write(&path, "[units]\ne = \n").unwrap();
    let out = gyroled(&["kernel", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "config");
}

#[test]
fn both_spin_fields_rejected() {
    let mut c = ScenarioConfig::preset("shell-scatter").unwrap();
    c.spin.s_b0 = Some(0.2);
    assert!(c.validate().is_err());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spin.toml");
    fs::write(&path, "[spin]\nomega0 = 0.3\ns_b0 = 0.2\n").unwrap();
    let out = gyroled(&["scatter", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"]["message"].as_str().unwrap().contains("s_b0"));
}

#[test]
fn unknown_preset_and_subcommand_fail() {
    let out = gyroled(&["kernel", "--preset", "ball-soliton"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "config");
    let out = gyroled(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn superluminal_spin_is_a_physics_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = with_dir("shell-soliton", dir.path());
    c.spin.omega0 = Some(1.2);
    let path = dir.path().join("fast.toml");
    fs::write(&path, c.to_toml()).unwrap();
    let out = gyroled(&["rotor", "--config", path.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr_json(&out)["error"]["kind"].is_string());
}

#[test]
fn sweep_finds_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Pipeline::Sweep, &with_dir("threshold-sweep", dir.path())).unwrap();
    assert!(out.passed);
    let root = out.summary["threshold_coupling"].as_f64().unwrap();
    let exact = 3.0 / (2.0 * 2f64.sqrt() - 1.0);
    assert!((root - exact).abs() < 1e-6, "{root}");

    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("coupling,iota0,norm_1,margin,gamma_bound\n"));
    assert_eq!(csv.lines().count(), 32);
}

#[test]
fn kernel_csv_and_norms() {
    let dir = tempfile::tempdir().unwrap();
    let out = gyroled(&["kernel", "--preset", "shell-scatter", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let norm_1 = v["summary"]["norms"]["norm_1"].as_f64().unwrap();
    assert!((norm_1 - 2.0 * (2.0 * 2f64.sqrt() - 1.0) / 9.0).abs() < 1e-8);

    let mut rdr = csv::Reader::from_path(dir.path().join("kernel.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "K"]);
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let t: f64 = rec[0].parse().unwrap();
        let k: f64 = rec[1].parse().unwrap();
        assert!((k - (1.0 - 0.5 * t * t) / 3.0).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        run(Pipeline::Scatter, &with_dir("shell-scatter", dir.path())).unwrap();
        run(Pipeline::Cosim, &with_dir("shell-scatter", dir.path())).unwrap();
    }
    for name in ["trajectory.csv", "scatter.json", "cosim_trajectory.csv", "cosim_series.csv", "cosim.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn scatter_reports_damping() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Pipeline::Scatter, &with_dir("shell-scatter", dir.path())).unwrap();
    assert!(out.passed);
    let d = &out.summary["decay"];
    let gamma = d["gamma_hat"].as_f64().unwrap();
    assert!(gamma >= (3.0 / (2.0 * (2.0 * 2f64.sqrt() - 1.0))).ln() - 0.05);

    let mut rdr = csv::Reader::from_path(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "s_b", "omega"]);
}

#[test]
fn audit_and_field_headers() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = with_dir("shell-scatter", dir.path());
    c.grid.t_end = 4.0;
    assert!(run(Pipeline::Audit, &c).unwrap().passed);
    run(Pipeline::Field, &c).unwrap();
    let head = |n: &str| fs::read_to_string(dir.path().join(n)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(head("audit.csv"), "t,W,L_axis,sigma,p_norm,power_residual");
    assert_eq!(head("field.csv"), "zeta,z,psi,psi_dot");
}
