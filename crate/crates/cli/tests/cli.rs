//! End-to-end tests of the installed binary: each case runs the real
//! executable against a temporary directory and inspects the files it
//! leaves behind.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radial-sle"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("spawn radial-sle")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .map(|c| c.parse().expect("numeric csv cell"))
                .collect()
        })
        .collect()
}

#[test]
fn zero_time_trace_is_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["trace", "--kappa", "2", "--T", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&read(dir.path(), "trace.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0], vec![0.0, 1.0, 0.0]);
}

#[test]
fn forced_zero_kappa_antipodal_trace_is_the_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "trace", "--kappa", "0", "--rho", "2", "--theta1", "0", "--theta2",
            "3.14159265", "--T", "1",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let trace = csv_rows(&read(dir.path(), "trace.csv"));
    assert!(trace.len() >= 100);
    for row in &trace {
        assert!(row[2].abs() < 1e-6, "off-axis point {row:?}");
        assert!(row[1] >= -1e-12, "crossed the origin {row:?}");
    }

    let driver = read(dir.path(), "driver.csv");
    assert!(driver.starts_with("t,xi,v\n"), "driver lacks force-point column");
}

#[test]
fn out_of_range_kappa_exits_with_domain_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["trace", "--kappa", "9", "--T", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("kappa") && stderr.contains("[0, 8)"), "stderr: {stderr}");
}

#[test]
fn partition_table_is_one_at_the_antipode() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["partition", "--kappa", "4", "--alpha", "0.125", "--grid", "256"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&read(dir.path(), "partition.csv"));
    assert_eq!(rows.len(), 255);
    let pi_row = &rows[127];
    assert!((pi_row[0] - std::f64::consts::PI).abs() < 1e-15);
    assert!((pi_row[1] - 1.0).abs() < 1e-12, "antipode value {}", pi_row[1]);
}

#[test]
fn check_report_passes_for_both_weight_families() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "check", "--bpz", "--commutation", "--zero-kappa", "--kappa", "3",
            "--alpha", "0.4", "--mu", "1.0",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "check.json")).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    for section in ["bpz", "commutation", "zero_kappa"] {
        assert_eq!(
            report[section]["pass"],
            serde_json::Value::Bool(true),
            "section {section}"
        );
    }
}

#[test]
fn moment_reruns_are_byte_identical_and_checksummed() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = [
        "crmoment", "--kappa", "3", "--alpha", "0.5", "--theta", "pi", "--n", "2000",
        "--seed", "7",
    ];
    let out_a = run(dir_a.path(), &args);
    assert!(out_a.status.success(), "{}", String::from_utf8_lossy(&out_a.stderr));
    let out_b = run(dir_b.path(), &args);
    assert!(out_b.status.success());

    let report = read(dir_a.path(), "crmoment.json");
    assert_eq!(report, read(dir_b.path(), "crmoment.json"));

    let manifest: serde_json::Value =
        serde_json::from_str(&read(dir_a.path(), "manifest.json")).unwrap();
    let entry = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["path"] == "crmoment.json")
        .expect("manifest lists the report");
    let recomputed = {
        use sha2::Digest;
        let digest = sha2::Sha256::digest(report.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect::<String>()
    };
    assert_eq!(entry["sha256"].as_str().unwrap(), recomputed);
    assert_eq!(entry["bytes"].as_u64().unwrap(), report.len() as u64);
}

#[test]
fn persisted_config_replays_to_identical_outputs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let out = run(
        dir_a.path(),
        &["trace", "--kappa", "2", "--T", "0.5", "--seed", "3"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let replay = bin()
        .arg("--config")
        .arg(dir_a.path().join("config.json"))
        .arg("--out-dir")
        .arg(dir_b.path())
        .output()
        .unwrap();
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));

    for name in ["trace.csv", "driver.csv"] {
        assert_eq!(read(dir_a.path(), name), read(dir_b.path(), name), "{name}");
    }
}

#[test]
fn worker_count_does_not_change_the_estimate() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = [
        "crmoment", "--kappa", "3", "--alpha", "0.3", "--theta", "pi/2", "--n", "500",
        "--seed", "11",
    ];
    let out_a = bin()
        .arg("--workers")
        .arg("1")
        .arg("--out-dir")
        .arg(dir_a.path())
        .args(args)
        .output()
        .unwrap();
    assert!(out_a.status.success(), "{}", String::from_utf8_lossy(&out_a.stderr));
    let out_b = bin()
        .arg("--workers")
        .arg("2")
        .arg("--out-dir")
        .arg(dir_b.path())
        .args(args)
        .output()
        .unwrap();
    assert!(out_b.status.success());
    assert_eq!(
        read(dir_a.path(), "crmoment.json"),
        read(dir_b.path(), "crmoment.json")
    );
}

#[test]
fn pair_summary_reports_balanced_growth() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "pair", "--kappa", "4", "--theta1", "0", "--theta2", "pi", "--T", "0.4",
            "--seed", "1",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "pair.json")).unwrap();
    let cap1 = summary["cap1"].as_f64().unwrap();
    let cap2 = summary["cap2"].as_f64().unwrap();
    let total = summary["total_capacity"].as_f64().unwrap();
    assert!((cap1 - cap2).abs() < 1e-12, "uneven split {cap1} vs {cap2}");
    assert!((cap1 + cap2 - total).abs() < 1e-9);
    let cr = summary["conformal_radius"].as_f64().unwrap();
    assert!((cr - (-total).exp()).abs() < 1e-12);
    assert!(dir.path().join("trace1.csv").exists());
    assert!(dir.path().join("trace2.csv").exists());
}

#[test]
fn conflicting_inputs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let no_family = run(dir.path(), &["partition", "--kappa", "4"]);
    assert_eq!(no_family.status.code(), Some(2));

    let rho_without_force_point = run(dir.path(), &["trace", "--kappa", "2", "--rho", "2", "--T", "1"]);
    assert_eq!(rho_without_force_point.status.code(), Some(2));

    let no_check_selected = run(dir.path(), &["check", "--kappa", "3", "--alpha", "0.4"]);
    assert_eq!(no_check_selected.status.code(), Some(2));
}
