//! End-to-end checks of the `minsi` binary: artifact layout, flag overrides,
//! reproducibility, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn minsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsi"))
        .args(args)
        .output()
        .expect("spawn minsi")
}

fn write_fast_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.json");
    let text = r#"{
        "channel": {
            "synthetic": {
                "geometry": {"rows": 8, "cols": 8, "spacing_wl": 0.5, "tx_rx_gap_m": 0.3, "carrier_hz": 3.5e9},
                "grid": {"f_start_hz": 3.49e9, "f_stop_hz": 3.51e9, "num_points": 33},
                "params": {"l_iso_db": 30.0, "diffuse_ratio": 0.0},
                "seed": 7
            }
        },
        "kind": "lin4",
        "bandwidth_hz": 2e7,
        "pso": {"num_iterations": 12, "seed": 1}
    }"#;
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn optimize_writes_artifacts_and_reports_dominance() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let out_dir = dir.path().join("run");
    let output = minsi(&[
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("dbf"), "missing baseline line: {stdout}");
    assert!(stdout.contains("min-si"), "missing solution line: {stdout}");
    assert!(out_dir.join("solution.json").exists());
    assert!(out_dir.join("trace.csv").exists());
    assert!(out_dir.join("config.json").exists());

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("solution.json")).unwrap())
            .unwrap();
    assert!(doc["gain_over_dbf_db"].as_f64().unwrap() >= 0.0);
}

#[test]
fn gen_channel_then_optimize_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let gen_dir = dir.path().join("gen");
    let output = minsi(&[
        "gen-channel",
        "--config",
        config.to_str().unwrap(),
        "--out",
        gen_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("sha256"), "missing checksum: {stdout}");
    let tensor_path = gen_dir.join("si_channel.sich");
    assert!(tensor_path.exists());
    assert!(gen_dir.join("si_channel.sich.json").exists());
    // Documented size: 40-byte header + 16 bytes per entry.
    assert_eq!(
        std::fs::metadata(&tensor_path).unwrap().len(),
        40 + 16 * 64 * 64 * 33
    );

    let run_dir = dir.path().join("run");
    let output = minsi(&[
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--channel",
        tensor_path.to_str().unwrap(),
        "--out",
        run_dir.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(run_dir.join("solution.json").exists());
}

#[test]
fn gen_channel_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let mut checksums = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let output = minsi(&[
            "gen-channel",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "123",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
        let stdout = String::from_utf8(output.stdout).unwrap();
        let sum = stdout
            .lines()
            .find_map(|l| l.strip_prefix("sha256 "))
            .expect("checksum line")
            .to_string();
        checksums.push(sum);
    }
    assert_eq!(checksums[0], checksums[1]);
}

#[test]
fn rerun_reproduces_artifacts_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let out_dir = dir.path().join("run");
    let args = [
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ];
    assert!(minsi(&args).status.success());
    let first_solution = std::fs::read(out_dir.join("solution.json")).unwrap();
    let first_trace = std::fs::read(out_dir.join("trace.csv")).unwrap();
    assert!(minsi(&args).status.success());
    assert_eq!(
        first_solution,
        std::fs::read(out_dir.join("solution.json")).unwrap()
    );
    assert_eq!(
        first_trace,
        std::fs::read(out_dir.join("trace.csv")).unwrap()
    );
}

#[test]
fn seed_flag_changes_the_swarm_not_the_channel() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let out_dir = dir.path().join("run");
    let output = minsi(&[
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "99",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let resolved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("config.json")).unwrap())
            .unwrap();
    assert_eq!(resolved["pso"]["seed"], 99);
    assert_eq!(resolved["channel"]["synthetic"]["seed"], 7);
}

#[test]
fn malformed_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let output = minsi(&["optimize", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("config"));
}

#[test]
fn missing_channel_file_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let output = minsi(&[
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--channel",
        dir.path().join("nope.sich").to_str().unwrap(),
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn infeasible_window_exits_with_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"pso": {"eps_db": 0.0}, "out_dir": "unused"}"#).unwrap();
    let output = minsi(&["optimize", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&output.stderr).contains("infeasible"));
}

#[test]
fn oracle_grid_cap_exits_with_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    let text = r#"{
        "channel": {
            "synthetic": {
                "geometry": {"rows": 8, "cols": 8, "spacing_wl": 0.5, "tx_rx_gap_m": 0.3, "carrier_hz": 3.5e9},
                "grid": {"f_start_hz": 3.49e9, "f_stop_hz": 3.51e9, "num_points": 33},
                "params": {"l_iso_db": 30.0, "diffuse_ratio": 0.0},
                "seed": 7
            }
        },
        "bandwidth_hz": 2e7,
        "pso": {"num_iterations": 5},
        "oracle": {"angle_step_deg": 0.001, "max_evaluations": 1000}
    }"#;
    std::fs::write(&path, text).unwrap();
    let output = minsi(&[
        "optimize",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&output.stderr).contains("exceeds cap"));
}

#[test]
fn zero_gap_geometry_fails_generation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    let text = r#"{
        "channel": {
            "synthetic": {
                "geometry": {"rows": 8, "cols": 8, "spacing_wl": 0.5, "tx_rx_gap_m": 0.0, "carrier_hz": 3.5e9},
                "grid": {"f_start_hz": 3.49e9, "f_stop_hz": 3.51e9, "num_points": 3},
                "params": {"l_iso_db": 30.0, "diffuse_ratio": 0.0},
                "seed": 7
            }
        }
    }"#;
    std::fs::write(&path, text).unwrap();
    let output = minsi(&[
        "gen-channel",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("gen").to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("overlapping"));
}

#[test]
fn invalid_worker_env_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let output = Command::new(env!("CARGO_BIN_EXE_minsi"))
        .args(["optimize", "--config", config.to_str().unwrap()])
        .env("MINSI_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn kind_and_bandwidth_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fast_config(dir.path());
    let out_dir = dir.path().join("run");
    let output = minsi(&[
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--kind",
        "lin8",
        "--bandwidth-hz",
        "5e6",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("solution.json")).unwrap())
            .unwrap();
    assert_eq!(doc["kind"], "lin8");
    assert_eq!(doc["bandwidth_hz"].as_f64().unwrap(), 5e6);
    assert_eq!(doc["num_samples"], 9);
}
