//! Stage orchestration with CSV/JSON artifacts under one output directory.
//!
//! Every stage reads the artifacts of its predecessors from disk, so any
//! stage can be rerun on its own. All randomness comes from the root seed
//! split per stage, and no artifact records wall-clock data unless timings
//! are requested.

mod report;
mod stages;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymmetry::AsymmetryOptions;
use crate::error::{Error, Result};
use crate::io::{read_json, write_json};
use crate::network::ThresholdOptions;
use crate::response::Case;
use crate::seed::stage_seed;
use crate::synth::SynthConfig;

pub use report::{report_summary, Summary, SummaryColumn};
pub use stages::{ingest_messages, IngestedStock};

/// Stage names in execution order.
pub const STAGES: [&str; 9] = [
    "synth", "ingest", "respond", "fit", "asym", "spectra", "entropy", "network", "report",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Message CSV, or a directory holding `messages.csv`.
    pub input: Option<PathBuf>,
    /// Whether the input message file starts with a header line.
    pub input_header: bool,
    /// Synthetic flow used instead of `input`; its seed is replaced by the
    /// stage seed.
    pub synth: Option<SynthConfig>,
    pub session_start_ms: Option<u64>,
    pub session_end_ms: Option<u64>,
    pub cases: Vec<Case>,
    /// Bins for the response probability matrix.
    pub k_bins: usize,
    /// Entropy groups; `round(N / 2.4)` when unset.
    pub q_groups: Option<usize>,
    /// Bins for the spectrum entropy.
    pub spectrum_bins: usize,
    /// Trades per stock in the random baseline; the median cell count when unset.
    pub random_l: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub asymmetry: AsymmetryOptions,
    pub threshold: ThresholdOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            input_header: false,
            synth: None,
            session_start_ms: None,
            session_end_ms: None,
            cases: Case::ALL.to_vec(),
            k_bins: 50,
            q_groups: None,
            spectrum_bins: 25,
            random_l: None,
            seed: 1,
            out: PathBuf::from("out"),
            asymmetry: AsymmetryOptions::default(),
            threshold: ThresholdOptions::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match (&self.input, &self.synth) {
            (Some(_), Some(_)) => return bad("set either `input` or `synth`, not both".into()),
            (None, None) => return bad("one of `input` or `synth` is required".into()),
            (Some(p), None) if !p.exists() => {
                return Err(Error::Stage {
                    stage: "ingest".into(),
                    path: p.clone(),
                    source: Box::new(Error::io(p, std::io::ErrorKind::NotFound.into())),
                })
            }
            (None, Some(s)) => s.validate()?,
            _ => {}
        }
        if self.cases.is_empty() {
            return bad("no cases selected".into());
        }
        let mut seen = self.cases.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.cases.len() {
            return bad("duplicate case in `cases`".into());
        }
        if self.k_bins < 2 || self.spectrum_bins < 1 {
            return bad(format!(
                "k_bins {} and spectrum_bins {} too small",
                self.k_bins, self.spectrum_bins
            ));
        }
        if self.q_groups == Some(0) || self.random_l == Some(0) {
            return bad("q_groups and random_l must be positive".into());
        }
        if let (Some(a), Some(b)) = (self.session_start_ms, self.session_end_ms) {
            if a > b {
                return bad(format!("session starts at {a} after its end {b}"));
            }
        }
        Ok(())
    }

    /// SHA-256 of the configuration with the output directory blanked.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let text = serde_json::to_string(&c).expect("configuration serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn stage_seeds(&self) -> BTreeMap<String, u64> {
        ["synth", "random"]
            .iter()
            .map(|s| (s.to_string(), stage_seed(self.seed, s)))
            .collect()
    }

    /// Cases in canonical order.
    pub fn ordered_cases(&self) -> Vec<Case> {
        Case::ALL
            .into_iter()
            .filter(|c| self.cases.contains(c))
            .collect()
    }

    pub fn default_q(n: usize) -> usize {
        ((n as f64 / 2.4).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub stage_seeds: BTreeMap<String, u64>,
    pub stages: Vec<StageRecord>,
}

pub const MANIFEST: &str = "run_manifest.json";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record per-stage wall-clock milliseconds in the manifest.
    pub timings: bool,
}

fn fresh_manifest(cfg: &PipelineConfig) -> RunManifest {
    RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        stage_seeds: cfg.stage_seeds(),
        stages: Vec::new(),
    }
}

fn load_manifest(cfg: &PipelineConfig) -> RunManifest {
    match read_json::<RunManifest>(&cfg.out.join(MANIFEST)) {
        Ok(m) if m.config_hash == cfg.hash() => m,
        _ => fresh_manifest(cfg),
    }
}

fn store(manifest: &mut RunManifest, record: StageRecord) {
    match manifest.stages.iter_mut().find(|r| r.name == record.name) {
        Some(r) => *r = record,
        None => manifest.stages.push(record),
    }
    manifest
        .stages
        .sort_by_key(|r| STAGES.iter().position(|s| *s == r.name));
}

fn create_out(cfg: &PipelineConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::Stage {
        stage: "setup".into(),
        path: cfg.out.clone(),
        source: Box::new(Error::io(&cfg.out, e)),
    })
}

fn timed(cfg: &PipelineConfig, stage: &str, opts: RunOptions) -> Result<StageRecord> {
    let start = Instant::now();
    let mut record = stages::run(cfg, stage).map_err(|e| stages::wrap(cfg, stage, e))?;
    if opts.timings {
        record.millis = Some(start.elapsed().as_millis() as u64);
    }
    Ok(record)
}

/// Runs one stage and updates the run manifest.
pub fn run_stage(cfg: &PipelineConfig, stage: &str, opts: RunOptions) -> Result<StageRecord> {
    if !STAGES.contains(&stage) {
        return Err(Error::Config(format!("unknown stage `{stage}`")));
    }
    cfg.validate()?;
    create_out(cfg)?;
    let mut manifest = load_manifest(cfg);
    let record = timed(cfg, stage, opts)?;
    store(&mut manifest, record.clone());
    write_json(&cfg.out.join(MANIFEST), &manifest)?;
    Ok(record)
}

/// Runs every stage in order; the synthetic stage only for synthetic input.
pub fn run_pipeline(cfg: &PipelineConfig, opts: RunOptions) -> Result<RunManifest> {
    cfg.validate()?;
    create_out(cfg)?;
    let mut manifest = fresh_manifest(cfg);
    for stage in STAGES {
        if stage == "synth" && cfg.synth.is_none() {
            continue;
        }
        let record = timed(cfg, stage, opts)?;
        store(&mut manifest, record);
        write_json(&cfg.out.join(MANIFEST), &manifest)?;
    }
    Ok(manifest)
}
