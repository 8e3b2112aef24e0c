use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cross_impact::pipeline::{report_summary, run_pipeline, run_stage, PipelineConfig, RunOptions};
use cross_impact::response::Case;
use cross_impact::synth::SynthConfig;
use cross_impact::Error;

/// Immediate cross-impact analysis of order-flow messages.
#[derive(Debug, Parser)]
#[command(name = "cross-impact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON pipeline configuration. Without it a 12-stock synthetic run is used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Message CSV (or directory with messages.csv) instead of synthetic flow.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Restrict to these cases (all, single, multiple, weighted, random).
    #[arg(long = "case", global = true, value_parser = parse_case)]
    cases: Vec<Case>,

    /// Trades per stock in the random baseline.
    #[arg(long = "random-L", global = true)]
    random_l: Option<usize>,

    /// Record per-stage wall-clock time in the run manifest.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic messages.
    Synth,
    /// Replay messages into quote and trade tapes.
    Ingest,
    /// Build the response matrices.
    Respond,
    /// Fit stable laws to the responses.
    Fit,
    /// Asymmetry curves.
    Asym,
    /// Antisymmetric spectra.
    Spectra,
    /// Entropy of impacts.
    Entropy,
    /// Entropy-grouped networks.
    Network,
    /// Every stage in order.
    RunAll,
    /// Summary tables of a finished run.
    Report,
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig {
            synth: Some(SynthConfig::demo(12, 1)),
            ..PipelineConfig::default()
        },
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(input) = &cli.input {
        cfg.input = Some(input.clone());
        cfg.synth = None;
    }
    if !cli.cases.is_empty() {
        cfg.cases = cli.cases.clone();
    }
    if cli.random_l.is_some() {
        cfg.random_l = cli.random_l;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = config(cli)?;
    let opts = RunOptions {
        timings: cli.timings,
    };
    let stage = match cli.command {
        Command::Synth => "synth",
        Command::Ingest => "ingest",
        Command::Respond => "respond",
        Command::Fit => "fit",
        Command::Asym => "asym",
        Command::Spectra => "spectra",
        Command::Entropy => "entropy",
        Command::Network => "network",
        Command::Report => "report",
        Command::RunAll => {
            let manifest = run_pipeline(&cfg, opts)?;
            for r in &manifest.stages {
                for w in &r.warnings {
                    eprintln!("warning [{}]: {w}", r.name);
                }
            }
            print!(
                "{}",
                report_summary(&cfg.out, &cfg.ordered_cases()).to_text()
            );
            return Ok(());
        }
    };
    let record = run_stage(&cfg, stage, opts)?;
    for w in &record.warnings {
        eprintln!("warning [{stage}]: {w}");
    }
    if stage == "report" {
        print!(
            "{}",
            report_summary(&cfg.out, &cfg.ordered_cases()).to_text()
        );
    } else {
        eprintln!(
            "{stage}: {} files written to {}",
            record.outputs.len(),
            cfg.out.display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
