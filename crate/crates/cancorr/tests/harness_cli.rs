//! End-to-end checks of the command-line front end and of artifact
//! determinism across runs and worker counts.

use std::path::{Path, PathBuf};
use std::process::Command;

use cancorr::harness::{run_campaign, ExperimentConfig};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cancorr")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cancorr-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn theory_subcommand_prints_the_constants() {
    let dir = tmp_dir("theory");
    let cfg = write_config(
        &dir,
        r#"{
            "dims": {"p": 100, "q": 80, "n": 400},
            "spike": {"a_values": [1.853777869158877], "b_values": [1.853777869158877],
                      "alignment": {"kind": "identity"}},
            "campaign": "detect"
        }"#,
    );
    let out = Command::new(bin())
        .args(["theory", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report["t_threshold"].as_f64().unwrap() - 0.288675).abs() < 1e-6);
    assert!((report["lambda_plus"].as_f64().unwrap() - 0.696410).abs() < 1e-6);
    assert_eq!(report["r_plus"].as_u64().unwrap(), 1);
    let outliers = report["outliers"].as_array().unwrap();
    assert_eq!(outliers.len(), 1);
    assert!((outliers[0].as_f64().unwrap() - 0.7933333).abs() < 1e-4);
    let gammas = report["gamma_grid"].as_array().unwrap();
    assert_eq!(gammas.len(), 80);
}

#[test]
fn constraint_violations_exit_with_code_two() {
    let dir = tmp_dir("refuse");
    // c1 + c2 = 120/121 > 1 - tau
    let mut x = String::new();
    let mut y = String::new();
    for i in 0..60 {
        let xr: Vec<String> = (0..121)
            .map(|j| format!("{}", ((i * 31 + j * 17) % 13) as f64 - 6.0))
            .collect();
        let yr: Vec<String> = (0..121)
            .map(|j| format!("{}", ((i * 7 + j * 29) % 11) as f64 - 5.0 + 0.01 * i as f64))
            .collect();
        x.push_str(&xr.join(","));
        x.push('\n');
        y.push_str(&yr.join(","));
        y.push('\n');
    }
    let xp = dir.join("x.csv");
    let yp = dir.join("y.csv");
    std::fs::write(&xp, x).unwrap();
    std::fs::write(&yp, y).unwrap();
    let out = Command::new(bin())
        .arg("detect")
        .arg(&xp)
        .arg(&yp)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("constraint violation"));
}

#[test]
fn zero_replicate_campaign_warns_and_succeeds() {
    let dir = tmp_dir("zero");
    let cfg = write_config(
        &dir,
        r#"{
            "dims": {"p": 30, "q": 24, "n": 120},
            "campaign": "rigidity",
            "replicates": 0
        }"#,
    );
    let out = Command::new(bin())
        .args(["campaign", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero replicates"));
}

#[test]
fn unknown_subcommand_is_an_error() {
    let out = Command::new(bin()).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_subcommand_reports_one_replicate() {
    let dir = tmp_dir("simulate");
    let cfg = write_config(
        &dir,
        r#"{
            "dims": {"p": 50, "q": 40, "n": 200},
            "spike": {"a_values": [1.9], "b_values": [1.9],
                      "alignment": {"kind": "identity"}},
            "campaign": "detect",
            "master_seed": 3
        }"#,
    );
    let out = Command::new(bin())
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["interlacing_pass"].as_bool(), Some(true));
    assert_eq!(report["top_perturbed"].as_array().unwrap().len(), 8);
    assert!(report["estimate"]["r_hat"].as_u64().unwrap() >= 1);
}

#[test]
fn goe_subcommand_writes_reference_samples() {
    let dir = tmp_dir("goe");
    let cfg = write_config(
        &dir,
        r#"{
            "dims": {"p": 30, "q": 24, "n": 120},
            "campaign": "detect",
            "goe": {"matrix_size": 60, "samples": 25}
        }"#,
    );
    let out = Command::new(bin())
        .args(["goe", "--config"])
        .arg(&cfg)
        .args(["--out-dir"])
        .arg(&dir)
        .args(["--seed", "5"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(body["samples"].as_u64().unwrap(), 25);
    let csv = std::fs::read_to_string(dir.join("goe.csv")).unwrap();
    assert!(csv.starts_with("index,rescaled_edge"));
    assert_eq!(csv.lines().count(), 26);
}

#[test]
fn verify_identities_subcommand_passes() {
    let dir = tmp_dir("ident");
    let cfg = write_config(
        &dir,
        r#"{
            "dims": {"p": 30, "q": 24, "n": 120},
            "campaign": "identities",
            "tolerances": {"identity_count": 4}
        }"#,
    );
    let out = Command::new(bin())
        .args(["verify-identities", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(body["summary"]["all_pass"].as_bool(), Some(true));
}

#[test]
fn artifacts_are_byte_identical_across_runs_and_workers() {
    let cfg_body = |workers: usize, dir: &Path| {
        format!(
            r#"{{
                "dims": {{"p": 50, "q": 40, "n": 200}},
                "spike": {{"a_values": [1.9], "b_values": [1.9],
                           "alignment": {{"kind": "identity"}}}},
                "campaign": "detect",
                "replicates": 12,
                "master_seed": 77,
                "workers": {workers},
                "out_dir": {}
            }}"#,
            serde_json::to_string(dir).unwrap()
        )
    };
    let d1 = tmp_dir("det1");
    let d2 = tmp_dir("det2");
    let d3 = tmp_dir("det3");
    for (dir, workers) in [(&d1, 1usize), (&d2, 4usize), (&d3, 1usize)] {
        let config = ExperimentConfig::from_json(&cfg_body(workers, dir)).unwrap();
        run_campaign(&config).unwrap();
    }
    let records = |d: &Path| std::fs::read(d.join("records.csv")).unwrap();
    let summary = |d: &Path| std::fs::read(d.join("summary.json")).unwrap();
    assert_eq!(
        records(&d1),
        records(&d2),
        "records differ across worker counts"
    );
    assert_eq!(records(&d1), records(&d3), "records differ across runs");
    assert_eq!(
        summary(&d1),
        summary(&d2),
        "summaries differ across worker counts"
    );
    assert_eq!(summary(&d1), summary(&d3), "summaries differ across runs");
    let text = String::from_utf8(summary(&d1)).unwrap();
    assert!(text.contains("\"config_hash\""));
    assert!(text.contains("\"schema_version\": 1"));
}

#[test]
fn tolerance_changes_move_the_config_hash() {
    let base = ExperimentConfig::from_json(
        r#"{"dims": {"p": 50, "q": 40, "n": 200}, "campaign": "rigidity"}"#,
    )
    .unwrap();
    let mut tweaked = base.clone();
    tweaked.tolerances.eps_tol = 0.2;
    let h1 = cancorr::harness::config_hash(&base);
    let h2 = cancorr::harness::config_hash(&tweaked);
    assert_ne!(h1, h2);
    // but execution environment does not
    let mut moved = base.clone();
    moved.workers = 8;
    moved.out_dir = Some(PathBuf::from("/somewhere/else"));
    assert_eq!(h1, cancorr::harness::config_hash(&moved));
}

#[test]
fn campaign_failure_budget_is_enforced() {
    // a spike rank above min(p, q) fails every replicate at generation
    let config = ExperimentConfig::from_json(
        r#"{
            "dims": {"p": 30, "q": 3, "n": 120},
            "spike": {"a_values": [2.0, 1.5, 1.0, 0.8], "b_values": [2.0, 1.5, 1.0, 0.8],
                      "alignment": {"kind": "identity"}},
            "campaign": "detect",
            "replicates": 8
        }"#,
    )
    .unwrap();
    match run_campaign(&config) {
        Err(err) => assert_eq!(err.exit_code(), 3, "unexpected error kind: {err}"),
        Ok(_) => panic!("campaign should exceed the failure budget"),
    }
}
