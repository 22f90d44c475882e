//! End-to-end tests of the `ptfesh` binary: exit codes, CSV/JSON contracts,
//! and bit-stable output.

use std::path::Path;
use std::process::{Command, Output};

fn ptfesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptfesh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn invalid_dim_exits_with_config_error() {
    let out = ptfesh(&["spectrum", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("basis_dim"), "message must name the invariant: {msg}");
}

#[test]
fn hermitian_quartic_spectrum_alternates_quasi_parity() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("spec.csv");
    let out = ptfesh(&[
        "spectrum",
        "--dim",
        "20",
        "--g",
        "1",
        "--f",
        "0",
        "--method",
        "feshbach",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 20);
    for (k, row) in rows.iter().enumerate() {
        let energy_im: f64 = row[2].parse().unwrap();
        assert_eq!(energy_im, 0.0, "Hermitian spectrum is real");
        let quasi: i8 = row[3].parse().unwrap();
        let expected = if k % 2 == 0 { 1 } else { -1 };
        assert_eq!(quasi, expected, "level {k}");
        let residual: f64 = row[5].parse().unwrap();
        assert!(residual <= 1e-9);
    }
}

#[test]
fn both_methods_agree_on_the_pt_model() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("both.csv");
    let out = ptfesh(&[
        "spectrum",
        "--dim",
        "24",
        "--g",
        "0.1",
        "--f",
        "0+0.2i",
        "--method",
        "both",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let disc_line = csv
        .lines()
        .find(|l| l.starts_with("# max_discrepancy"))
        .expect("discrepancy comment present");
    let value: f64 = disc_line.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!(value <= 1e-8, "discrepancy {value}");
    // rows for both methods
    let rows = data_rows(&csv);
    assert!(rows.iter().any(|r| r[6] == "feshbach"));
    assert!(rows.iter().any(|r| r[6] == "direct"));
}

#[test]
fn toy_sweep_brackets_the_transition_and_is_bit_stable() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.json");
    write(
        &config_path,
        r#"{
            "toy": { "omega": 0.0, "alpha": -1 },
            "basis_dim": 2,
            "sweep": { "param": "omega", "from": 0.30, "to": 0.60, "steps": 31 }
        }"#,
    );
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let csv_path = dir.path().join(name);
        let out = ptfesh(&[
            "sweep",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            csv_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&csv_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "CSV must be bit-stable across runs");

    let csv = String::from_utf8(outputs[0].clone()).unwrap();
    let bracket_line = csv
        .lines()
        .find(|l| l.starts_with("# first_breaking_bracket"))
        .expect("bracket comment present");
    // cell width 0.01 around omega* = 0.5
    let nums: Vec<f64> = bracket_line
        .split(['[', ']', ','])
        .filter_map(|s| s.trim().parse().ok())
        .collect();
    assert_eq!(nums.len(), 2, "{bracket_line}");
    assert!(nums[1] - nums[0] <= 0.01 + 1e-12);
    assert!(nums[0] <= 0.501 && nums[1] >= 0.499);
    // broken rows report an even broken_count
    let rows = data_rows(&csv);
    assert!(rows.iter().any(|r| r[5] != "0"));
    for r in &rows {
        let broken: usize = r[5].parse().unwrap();
        assert_eq!(broken % 2, 0);
    }
}

#[test]
fn sweep_without_block_is_a_config_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("none.csv");
    let out = ptfesh(&["sweep", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!csv_path.exists(), "no partial CSV on a config error");
}

#[test]
fn evolve_stationary_state_keeps_both_norms() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("evolve.json");
    write(
        &config_path,
        r#"{
            "model": { "f": "0", "g": 1.0 },
            "basis_dim": 12,
            "evolve": { "t_max": 5.0, "steps": 100, "initial": "level:0" }
        }"#,
    );
    let csv_path = dir.path().join("trace.csv");
    let out = ptfesh(&[
        "evolve",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("# pseudo_norm_t0"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 101);
    let euclid0: f64 = rows[0][3].parse().unwrap();
    let pseudo0: f64 = rows[0][1].parse().unwrap();
    for r in &rows {
        let euclid: f64 = r[3].parse().unwrap();
        let pseudo: f64 = r[1].parse().unwrap();
        assert!((euclid - euclid0).abs() <= 1e-8, "stationary Euclidean norm");
        assert!((pseudo - pseudo0).abs() <= 1e-8, "conserved pseudo-norm");
    }
}

#[test]
fn evolve_broken_toy_grows_euclidean_norm_only() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("evolve.json");
    write(
        &config_path,
        r#"{
            "toy": { "omega": 0.6, "alpha": -1 },
            "evolve": { "t_max": 10.0, "steps": 200, "initial": 0 }
        }"#,
    );
    let csv_path = dir.path().join("trace.csv");
    let out = ptfesh(&[
        "evolve",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let rows = data_rows(&csv);
    let pseudo0: f64 = rows[0][1].parse().unwrap();
    let euclid_first: f64 = rows[0][3].parse().unwrap();
    let euclid_last: f64 = rows.last().unwrap()[3].parse().unwrap();
    assert!(euclid_last > 2.0 * euclid_first, "broken phase grows");
    for r in &rows {
        let pseudo: f64 = r[1].parse().unwrap();
        assert!((pseudo - pseudo0).abs() <= 1e-8 * (1.0 + pseudo0.abs()));
    }
}

#[test]
fn check_passes_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = ptfesh(&["check", "--seed", "3", "--out", json_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["all_pass"], serde_json::Value::Bool(true));
    assert_eq!(report["seed"], serde_json::json!(3));
    let checks = report["checks"].as_object().unwrap();
    for required in [
        "h_eff_hermitian",
        "sign_flip_invariance",
        "schur_identity",
        "orthogonality",
        "identity_reconstruction",
        "hamiltonian_reconstruction",
        "pseudo_norm_conservation",
        "oracle_equivalence",
    ] {
        assert!(checks.contains_key(required), "missing check {required}");
        assert_eq!(checks[required]["pass"], serde_json::Value::Bool(true));
    }
}

#[test]
fn corrupted_custom_blocks_fail_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let blocks_path = dir.path().join("blocks.json");
    // a_dagger deliberately does not match a†
    write(
        &blocks_path,
        r#"{
            "f": [[1.0, 0.2], [0.2, 2.0]],
            "g": [[5.0, 0.1], [0.1, 6.0]],
            "a_re": [[0.3, 0.1], [0.0, 0.25]],
            "a_dagger_re": [[0.3, 0.0], [0.9, 0.25]],
            "alpha": 1
        }"#,
    );
    let config_path = dir.path().join("check.json");
    write(
        &config_path,
        &format!(r#"{{ "custom": {:?} }}"#, blocks_path.to_str().unwrap()),
    );
    let json_path = dir.path().join("report.json");
    let out = ptfesh(&[
        "check",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "corrupted A† must fail");
    // the report is still emitted
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["all_pass"], serde_json::Value::Bool(false));
    assert_eq!(
        report["checks"]["custom_h_eff_hermitian"]["pass"],
        serde_json::Value::Bool(false)
    );
}

#[test]
fn spectrum_csv_goes_to_stdout_without_out_flag() {
    let out = ptfesh(&["spectrum", "--dim", "6", "--g", "0.5", "--method", "direct"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("index,energy_re"));
}

#[test]
fn evolve_at_the_exceptional_point_is_a_solver_failure() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("evolve.json");
    write(
        &config_path,
        r#"{
            "toy": { "omega": 0.5, "alpha": -1 },
            "evolve": { "t_max": 1.0, "steps": 10, "initial": 0 }
        }"#,
    );
    let out = ptfesh(&["evolve", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "spectral preparation must fail with exit 2");
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("spectral preparation"), "{msg}");
}
