//! End-to-end tests of the `qhe` binary: exit codes, CSV artifacts,
//! manifests and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qhe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qhe"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qhe_cli_test_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn rabi_swap_appears_in_csv() {
    let dir = workdir("rabi");
    let config = write_config(
        &dir,
        "rabi.json",
        r#"{
            "scenario": "rabi",
            "parameters": { "omega": 1.0, "t_end": 3.141592653589793, "q": 0.5, "p": 1.0, "samples": 101 }
        }"#,
    );
    let prefix = dir.join("rabi").display().to_string();
    run_ok(qhe().args(["rabi", "--config"]).arg(&config).args(["--out", &prefix]));

    let (header, rows) = read_csv(&dir.join("rabi_trajectory.csv"));
    assert_eq!(header[0], "t");
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let n_b0 = rows[0][col("n_b")];
    let half_pi = std::f64::consts::FRAC_PI_2;
    let row = rows
        .iter()
        .min_by(|a, b| {
            (a[0] - half_pi).abs().partial_cmp(&(b[0] - half_pi).abs()).unwrap()
        })
        .unwrap();
    assert!((row[0] - half_pi).abs() < 1e-9);
    assert!((row[col("n_a")] - n_b0).abs() <= 1e-8);

    // Manifest lists only existing, non-empty artifacts.
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("rabi_manifest.json")).unwrap())
            .unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for o in outputs {
        let path = PathBuf::from(o.as_str().unwrap());
        let meta = std::fs::metadata(&path).unwrap();
        assert!(meta.len() > 0, "{} is empty", path.display());
    }
    assert!(manifest["checks"].as_array().unwrap().iter().all(|c| c["passed"].as_bool().unwrap()));
}

#[test]
fn photonic_optimize_reports_reference_resonance_root() {
    let dir = workdir("resonance");
    let config = write_config(
        &dir,
        "resonance.json",
        r#"{
            "scenario": "photonic-optimize",
            "parameters": { "omega_a0": 3.0, "omega_b0": 1.0, "T_h": 4.0, "T_c": 1.0, "delta": 0.2, "nu": 2.8284271247461903 }
        }"#,
    );
    let prefix = dir.join("resonance").display().to_string();
    run_ok(qhe().args(["photonic-optimize", "--config"]).arg(&config).args(["--out", &prefix]));

    let (header, rows) = read_csv(&dir.join("resonance_report.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let t_c = rows[0][col("cycle_duration")];
    assert!(
        (22.16..=22.36).contains(&t_c),
        "t_c = {t_c} outside [22.16, 22.36]"
    );
    assert!(rows[0][col("d_sq")] > 0.99);
    assert!(rows[0][col("work")] > 0.0);
}

#[test]
fn counter_rotating_cycle_never_pays_out() {
    let dir = workdir("cr");
    // t_cycle = 2 pi / nu closes the sinusoidal profile.
    let config = write_config(
        &dir,
        "cr.json",
        r#"{
            "scenario": "counter-rotating",
            "parameters": { "omega_a0": 1.4, "omega_b0": 0.9, "delta": 0.3, "nu": 2.5,
                            "n_a0": 0.5, "n_b0": 0.2, "t_cycle": 2.5132741228718345 }
        }"#,
    );
    let prefix = dir.join("cr").display().to_string();
    run_ok(qhe().args(["counter-rotating", "--config"]).arg(&config).args(["--out", &prefix]));

    let (header, rows) = read_csv(&dir.join("cr_report.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert!(rows[0][col("work")] <= 0.0);
}

#[test]
fn fixed_step_output_is_byte_identical() {
    let dir = workdir("repro");
    let config = write_config(
        &dir,
        "rabi.json",
        r#"{
            "scenario": "rabi",
            "parameters": { "omega": 1.0, "t_end": 2.0, "samples": 51 }
        }"#,
    );
    for run in ["a", "b"] {
        let prefix = dir.join(run).display().to_string();
        run_ok(
            qhe()
                .args(["rabi", "--config"])
                .arg(&config)
                .args(["--out", &prefix, "--fixed-step", "0.001"]),
        );
    }
    let a = std::fs::read(dir.join("a_trajectory.csv")).unwrap();
    let b = std::fs::read(dir.join("b_trajectory.csv")).unwrap();
    assert_eq!(a, b);

    // The same stepper selected through the config file gives the same bytes.
    let config_fs = write_config(
        &dir,
        "rabi_fs.json",
        r#"{
            "scenario": "rabi",
            "parameters": { "omega": 1.0, "t_end": 2.0, "samples": 51 },
            "integrator": { "fixed_step": { "dt": 0.001 } }
        }"#,
    );
    let prefix = dir.join("c").display().to_string();
    run_ok(qhe().args(["rabi", "--config"]).arg(&config_fs).args(["--out", &prefix]));
    let c = std::fs::read(dir.join("c_trajectory.csv")).unwrap();
    assert_eq!(a, c);
}

#[test]
fn invalid_parameters_exit_2_listing_every_error() {
    let dir = workdir("badcfg");
    let config = write_config(
        &dir,
        "bad.json",
        r#"{
            "scenario": "photonic-cycle",
            "parameters": { "omega_a0": 2.0, "omega_b0": 1.0, "T_h": -2.0, "T_c": 0.8,
                            "t_cycle": 5.0, "mystery": 1 }
        }"#,
    );
    let out = qhe().args(["photonic-cycle", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("T_h"), "stderr: {stderr}");
    assert!(stderr.contains("mystery"), "stderr: {stderr}");
}

#[test]
fn unknown_top_level_key_exits_2_with_location() {
    let dir = workdir("badkey");
    let config = write_config(
        &dir,
        "bad.json",
        r#"{ "scenario": "rabi", "parameters": { "omega": 1.0, "t_end": 1.0 }, "extra": 1 }"#,
    );
    let out = qhe().args(["rabi", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line"), "stderr: {stderr}");
}

#[test]
fn scenario_mismatch_exits_2() {
    let dir = workdir("mismatch");
    let config = write_config(
        &dir,
        "tm.json",
        r#"{ "scenario": "three-mode", "parameters": { "q": 0.5, "p": 1.0, "t_end": 1.0 } }"#,
    );
    let out = qhe().args(["rabi", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn open_counter_rotating_cycle_exits_3() {
    let dir = workdir("open_cycle");
    let config = write_config(
        &dir,
        "cr.json",
        r#"{
            "scenario": "counter-rotating",
            "parameters": { "omega_a0": 1.4, "omega_b0": 0.9, "delta": 0.3, "nu": 2.5, "t_cycle": 0.9 }
        }"#,
    );
    let prefix = dir.join("cr").display().to_string();
    let out = qhe()
        .args(["counter-rotating", "--config"])
        .arg(&config)
        .args(["--out", &prefix])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not closed"), "stderr: {stderr}");
}

#[test]
fn verify_passes_by_default_and_fails_with_corrupted_tolerance() {
    let ok = qhe().args(["verify", "--seed", "7"]).output().unwrap();
    assert!(
        ok.status.success(),
        "verify failed: {}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("all suites passed"));

    let bad = qhe().args(["verify", "--tol", "1e-2"]).output().unwrap();
    assert!(!bad.status.success());
    let stdout = String::from_utf8_lossy(&bad.stdout);
    assert!(stdout.contains("[FAIL]"));
}

#[test]
fn verify_is_stable_across_seeds() {
    for seed in ["1", "2", "3"] {
        let out = qhe().args(["verify", "--seed", seed]).output().unwrap();
        assert!(
            out.status.success(),
            "verify failed for seed {seed}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn carnot_sweep_table_flips_sign_at_boundary() {
    let dir = workdir("sweep");
    let config = write_config(
        &dir,
        "cs.json",
        r#"{
            "scenario": "carnot-sweep",
            "parameters": { "T_h": 2.0, "T_c": 1.0, "omega_a0": 2.0,
                            "omega_b_min": 0.75, "omega_b_max": 1.85, "omega_b_count": 12 }
        }"#,
    );
    let prefix = dir.join("cs").display().to_string();
    run_ok(
        qhe()
            .args(["carnot-sweep", "--config"])
            .arg(&config)
            .args(["--out", &prefix])
            .env("QHE_THREADS", "2"),
    );

    let (header, rows) = read_csv(&dir.join("cs_sweep.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let boundary = 2.0 * 1.0 / 2.0;
    for row in &rows {
        let (wb, w, eta) = (row[col("omega_b")], row[col("W")], row[col("eta")]);
        if wb < boundary - 0.05 {
            assert!(w < 0.0, "W = {w} at omega_b = {wb}");
        }
        if wb > boundary + 0.05 {
            assert!(w > 0.0, "W = {w} at omega_b = {wb}");
            assert!(eta <= 0.5 + 1e-12);
        }
    }
}
