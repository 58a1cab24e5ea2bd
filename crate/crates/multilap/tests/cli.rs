//! Black-box tests of the `multilap` binary: subcommand behavior, exit
//! codes, output files, and the stability oracles on stdout.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multilap"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("MULTILAP_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn unknown_builtin_name_is_a_usage_error() {
    let out = bin().args(["builtin", "three-layer"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn help_succeeds() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("multilap"));
}

#[test]
fn builtin_emissions_parse_back() {
    for name in ["two-layer", "four-layer", "multiplex-2x5"] {
        let out = bin().args(["builtin", name]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "builtin {name}");
        let parsed = multilap::format::parse_network(&stdout(&out))
            .unwrap_or_else(|e| panic!("builtin {name} does not re-parse: {e}"));
        assert!(parsed.network.is_connected());
    }
}

#[test]
fn four_layer_emission_flags_the_assumed_scale() {
    let out = bin().args(["builtin", "four-layer"]).output().unwrap();
    let text = stdout(&out);
    assert!(
        text.lines()
            .any(|l| l.starts_with('#') && l.contains("assumed")),
        "expected an assumption comment, got:\n{text}"
    );

    let manifest = bin()
        .args(["builtin", "four-layer", "--manifest"])
        .output()
        .unwrap();
    let json = stdout(&manifest);
    assert!(json.contains("\"assumed\": true"), "manifest:\n{json}");
}

#[test]
fn spectrum_of_a_two_node_network_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("pair.txt");
    std::fs::write(&net, "layers: 1 1\ninter 1 1 2 1 1.0\n").unwrap();
    let out = bin().arg("spectrum").arg(&net).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim_end(), "0,0\n1,2");
}

#[test]
fn validate_accepts_a_builtin_emission() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = bin().args(["builtin", "four-layer"]).output().unwrap();
    let net = dir.path().join("fl.txt");
    std::fs::write(&net, stdout(&emitted)).unwrap();

    let out = bin().arg("validate").arg(&net).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("connected: true"));
    assert!(text.contains("status: ok"));
}

#[test]
fn validate_rejects_asymmetric_weights() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("asym.txt");
    std::fs::write(&net, "layers: 2\nintra 1 1 2 1.0\nintra 1 2 1 2.0\n").unwrap();

    let out = bin().arg("validate").arg(&net).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("asymmetric"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn validate_reports_missing_files_as_validation_failures() {
    let out = bin()
        .args(["validate", "/no/such/net.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_writes_trajectory_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    let json = bin()
        .args(["builtin", "multiplex-2x5", "--manifest"])
        .output()
        .unwrap();
    std::fs::write(&manifest, stdout(&json)).unwrap();

    let out_dir = dir.path().join("out");
    let out = run_in(&out_dir, &["run", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t,y_1,"));
    assert!(header.contains(",lambda_1,"));

    let report = std::fs::read_to_string(out_dir.join("trajectory.report.txt")).unwrap();
    assert!(report.contains("reached: true"), "report:\n{report}");
    assert!(stdout(&out).contains("reached: true"));
}

#[test]
fn seed_flag_changes_the_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    let json = bin()
        .args(["builtin", "multiplex-2x5", "--manifest"])
        .output()
        .unwrap();
    std::fs::write(&manifest, stdout(&json)).unwrap();

    let base = run_in(&dir.path().join("a"), &["run", manifest.to_str().unwrap()]);
    assert_eq!(base.status.code(), Some(0));
    let reseeded = run_in(
        &dir.path().join("b"),
        &["run", manifest.to_str().unwrap(), "--seed", "7"],
    );
    assert_eq!(
        reseeded.status.code(),
        Some(0),
        "stderr: {}",
        stderr(&reseeded)
    );

    let a = std::fs::read(dir.path().join("a/trajectory.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/trajectory.csv")).unwrap();
    assert_ne!(a, b, "different seeds must give different trajectories");
}

#[test]
fn bad_manifest_json_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("broken.json");
    std::fs::write(&manifest, "{ \"network\": }").unwrap();
    let out = run_in(dir.path(), &["run", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("manifest"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn numerical_blowup_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("blowup.json");
    // A step size far beyond the stability limit makes RK4 diverge fast.
    std::fs::write(
        &manifest,
        r#"{
            "network": { "builtin": "two-layer" },
            "integrator": { "stepper": { "method": "fixed-rk4", "dt": 50.0 }, "t_end": 400.0 }
        }"#,
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("diverged"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("sweep.json");
    std::fs::write(
        &manifest,
        r#"{
            "network": { "builtin": "multiplex-2x5" },
            "integrator": { "stepper": { "method": "adaptive" }, "t_end": 60.0, "record_stride": 1 },
            "sweep": [ { "parameter": "dinter 1 2", "values": [0.2, 0.4, 0.8] } ]
        }"#,
    )
    .unwrap();
    let out = run_in(dir.path(), &["sweep", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4, "header plus three rows:\n{csv}");
    assert_eq!(
        lines[0],
        "dinter_1_2,lambda2,reached,t_consensus,consensus_value,error"
    );
    assert!(lines[1].starts_with("0.2,"));
    assert!(lines[3].starts_with("0.8,"));
}
