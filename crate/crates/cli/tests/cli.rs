//! End-to-end checks of the command surface and file formats.

use std::path::Path;
use std::process::Command;

fn pte() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pte"))
}

fn write_config(dir: &Path, out: &Path, samples: u32) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    let marker_probs: String = pte_core::design::MARKERS
        .iter()
        .map(|m| format!("\"{}\" = {}\n", m.text, m.human_probability))
        .collect();
    std::fs::write(
        &path,
        format!(
            r#"
output_dir = "{}"
master_seed = 5
n_samples = {samples}
bootstrap_replicates = 100

[agent]
kind = "synthetic"
sigma = 0.670
lambda = 2.630
gamma = 0.685
sharpness = 0.5

[agent.marker_probs]
{marker_probs}
"#,
            out.display()
        ),
    )
    .unwrap();
    path
}

#[test]
fn full_pipeline_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let config = write_config(dir.path(), &out, 32);

    for args in [vec!["stage1"], vec!["stage2"]] {
        let status = pte()
            .args(&args)
            .arg("--config")
            .arg(&config)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "{args:?} failed");
    }
    for round in ["round1", "round2", "round3", "round4"] {
        let status = pte()
            .args(["round", "--round", round, "--config"])
            .arg(&config)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "round {round} failed");
    }
    let report = pte().arg("report").arg(&out).output().unwrap();
    assert!(report.status.success());
    let summary = String::from_utf8(report.stdout).unwrap();
    for needle in [
        "baseline",
        "round4",
        "markers by implied probability",
        "reliable",
    ] {
        assert!(
            summary.contains(needle),
            "summary missing {needle:?}:\n{summary}"
        );
    }

    // marker map has all 14 entries
    let map: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("stage2/marker_map.json")).unwrap())
            .unwrap();
    assert_eq!(map["markers"].as_object().unwrap().len(), 14);

    // round reports record the chosen pairs with normalized probabilities
    let r4: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("round4/report.json")).unwrap())
            .unwrap();
    let pairs = r4["chosen_pairs"].as_object().unwrap();
    assert_eq!(pairs.len(), 6);
    for (slot, pair) in pairs {
        let lo = pair["p_low_norm"].as_f64().unwrap();
        let hi = pair["p_high_norm"].as_f64().unwrap();
        assert!((lo + hi - 1.0).abs() < 1e-12, "{slot}: {lo} + {hi}");
    }

    // manifest lists every stage with existing artifacts
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let stages = manifest["stages"].as_object().unwrap();
    assert_eq!(stages.len(), 6);
    for (name, entry) in stages {
        for artifact in entry["artifacts"].as_array().unwrap() {
            assert!(
                Path::new(artifact.as_str().unwrap()).exists(),
                "{name}: missing {artifact}"
            );
        }
    }

    // summary CSVs exist with headers
    let rounds_csv = std::fs::read_to_string(out.join("rounds.csv")).unwrap();
    assert!(rounds_csv.starts_with("round,sigma,lambda,gamma,"));
    assert_eq!(rounds_csv.lines().count(), 6);
    let markers_csv = std::fs::read_to_string(out.join("markers.csv")).unwrap();
    assert_eq!(markers_csv.lines().count(), 15);
}

#[test]
fn errors_are_machine_readable_json_on_stderr() {
    let out = pte().args(["report", "/nonexistent/run"]).output().unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("/nonexistent/run"));
}

#[test]
fn fit_rejects_inconsistent_counts() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    let probs = dir.path().join("probs.json");
    std::fs::write(&counts, "series,index,k_count,n_samples\nS1,1,40,32\n").unwrap();
    std::fs::write(&probs, r#"{"version":1,"round":"baseline","rows":[]}"#).unwrap();
    let out = pte().arg("fit").arg(&counts).arg(&probs).output().unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("row 2"));
}

#[test]
fn round_requires_marker_map() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let config = write_config(dir.path(), &out, 32);
    let result = pte()
        .args(["round", "--round", "round1", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!result.status.success());
    let err: serde_json::Value = serde_json::from_slice(&result.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("marker_map.json"));
}

#[test]
fn unknown_round_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let config = write_config(dir.path(), &out, 32);
    let result = pte()
        .args(["round", "--round", "round9", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!result.status.success());
    let err: serde_json::Value = serde_json::from_slice(&result.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("round9"));
}
