use std::collections::BTreeMap;
use std::path::Path;

use cross_impact::pipeline::{run_pipeline, run_stage, PipelineConfig, RunOptions, Summary};
use cross_impact::synth::SynthConfig;

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn stages_rerun_from_artifacts_and_report_renderings_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        synth: Some(SynthConfig {
            session_ms: 1_800_000,
            ..SynthConfig::demo(12, 0)
        }),
        out: dir.path().join("out"),
        seed: 3,
        ..PipelineConfig::default()
    };
    let manifest = run_pipeline(&cfg, RunOptions::default()).unwrap();
    assert_eq!(manifest.stages.len(), 9);
    assert!(manifest.stages.iter().all(|s| s.millis.is_none()));
    let before = tree(&cfg.out);

    for stage in ["respond", "asym", "spectra", "entropy", "network", "report"] {
        run_stage(&cfg, stage, RunOptions::default()).unwrap();
    }
    assert_eq!(
        before,
        tree(&cfg.out),
        "rerunning stages changed an artifact"
    );

    // Every number of the text summary parses back to the JSON value.
    let summary: Summary = serde_json::from_slice(&before["summary.json"]).unwrap();
    let text = String::from_utf8(before["summary.txt"].clone()).unwrap();
    let mut json_numbers = Vec::new();
    for c in &summary.columns {
        json_numbers.extend(
            [
                c.mode,
                c.mean,
                c.median,
                c.skewness,
                c.overall_asymmetry,
                c.spectrum_entropy,
            ]
            .into_iter()
            .flatten(),
        );
        for p in [c.cross_fit, c.self_fit].into_iter().flatten() {
            json_numbers.extend([p.alpha, p.beta, p.gamma, p.mu0]);
        }
    }
    let text_numbers: Vec<f64> = text
        .split_whitespace()
        .filter_map(|t| t.parse().ok())
        .collect();
    for v in &json_numbers {
        assert!(
            text_numbers.contains(v),
            "{v} missing from the text summary"
        );
    }
    let labels: Vec<&str> = summary.columns.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(labels, ["All", "Single", "Multiple", "Weighted", "Random"]);
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        synth: Some(SynthConfig {
            n_stocks: 3,
            session_ms: 600_000,
            ..SynthConfig::default()
        }),
        out: dir.path().to_path_buf(),
        ..PipelineConfig::default()
    };
    let r = run_stage(&cfg, "synth", RunOptions { timings: true }).unwrap();
    assert!(r.millis.is_some());
    let r = run_stage(&cfg, "ingest", RunOptions::default()).unwrap();
    assert!(r.millis.is_none());
    let m: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run_manifest.json")).unwrap(),
    )
    .unwrap();
    let names: Vec<&str> = m["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["synth", "ingest"]);
}
