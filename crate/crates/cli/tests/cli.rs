use std::path::Path;
use std::process::{Command, Output};

use serde_json::json;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cross-impact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let cfg = json!({
        "synth": {
            "n_stocks": 4,
            "session_ms": 1_800_000,
            "planted": [
                {"source": 0, "target": 1, "delta": 1e-3, "probability": 1.0, "sign_correlation": 1.0, "jitter": 2e-4}
            ],
            "hub": {"stock": 3, "delta": 4e-3, "trade_rate": 2.0}
        },
        "q_groups": 3,
        "random_l": 200,
        "out": dir.join("out"),
    });
    let path = dir.join("config.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn stages_run_one_by_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    // Fits need 100 cross responses; four stocks give only 12, so the
    // random case alone is analysed past the response stage.
    for stage in ["synth", "ingest", "respond"] {
        let o = cli(&[stage, "--config", &cfg]);
        assert!(
            o.status.success(),
            "{stage}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let out = dir.path().join("out");
    for f in [
        "messages.csv",
        "synth_manifest.json",
        "stocks.csv",
        "responses_all.csv",
        "weights.csv",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let o = cli(&["fit", "--config", &cfg, "--case", "single"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage `fit`"));
}

#[test]
fn random_only_run_reports_one_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = cli(&[
        "run-all",
        "--case",
        "random",
        "--random-L",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let cols = summary["columns"].as_array().unwrap();
    assert_eq!(cols.len(), 1);
    assert_eq!(cols[0]["label"], "Random");
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().next().unwrap().trim() == "Random");
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = cli(&[
        "ingest",
        "--input",
        "/definitely/missing",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("ingest") && err.contains("/definitely/missing"),
        "{err}"
    );

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"k_bins": 1, "synth": {}}"#).unwrap();
    let o = cli(&["run-all", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(cli(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(cli(&["fit", "--case", "sideways"]).status.code(), Some(2));
}

#[test]
fn report_of_an_empty_directory_flags_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = cli(&["report", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(
        text.contains("Gaps") && text.contains("stable_fits.json missing"),
        "{text}"
    );
}
