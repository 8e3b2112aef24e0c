use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{PipelineConfig, StageRecord};
use crate::asymmetry::{asymmetry_report, AsymmetryReport};
use crate::entropy::{
    equal_edges, impact_entropy_matrix, probability_matrix, row_col_entropies, scatter_export,
    spectrum_entropy,
};
use crate::error::{Error, Result};
use crate::io::{read_grid, read_json, read_text, write_grid, write_json, write_text};
use crate::itch::{
    dedupe_millisecond_trades, filter_session, parse_messages, read_quotes_csv, read_stock_meta,
    read_trades_csv, reconstruct, split_by_stock, stock_meta, write_quotes_csv, write_stock_meta,
    write_trades_csv, ItchMessage, Tapes,
};
use crate::network::{connectivity_csv, edges_csv, group_networks, threshold_network};
use crate::response::{
    compute_responses, median_count, random_response, Case, RandomResponseConfig, ResponseMatrix,
};
use crate::spectra::{spectral_analysis, BinRule};
use crate::stable::{dist_stats, fit_stable, stable_pdf, DistStats, StableFit, StableParams};
use crate::synth::generate;

const MIN_FIT_SAMPLES: usize = 100;

/// One stock after replay, session filtering and deduplication.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestedStock {
    pub symbol: String,
    pub tapes: Tapes,
    pub dedupe_fraction: f64,
}

/// Replays a mixed message stream into per-stock tapes, keeps the session
/// window and drops trades sharing a millisecond.
pub fn ingest_messages(
    messages: Vec<ItchMessage>,
    session: (Option<u64>, Option<u64>),
) -> Result<Vec<IngestedStock>> {
    let (start, end) = (session.0.unwrap_or(0), session.1.unwrap_or(u64::MAX));
    split_by_stock(messages)
        .into_iter()
        .map(|(symbol, stream)| {
            let tapes = reconstruct(&stream)?;
            let quotes = filter_session(&tapes.quotes, start, end);
            let (trades, dedupe_fraction) =
                dedupe_millisecond_trades(&filter_session(&tapes.trades, start, end));
            Ok(IngestedStock {
                symbol,
                tapes: Tapes { quotes, trades },
                dedupe_fraction,
            })
        })
        .collect()
}

/// Attaches the stage name and the most specific artifact path to an error.
pub(super) fn wrap(cfg: &PipelineConfig, stage: &str, e: Error) -> Error {
    if matches!(e, Error::Stage { .. }) {
        return e;
    }
    let path = match &e {
        Error::Io { path, .. } | Error::Json { path, .. } => path.clone(),
        _ => cfg.out.clone(),
    };
    Error::Stage {
        stage: stage.to_string(),
        path,
        source: Box::new(e),
    }
}

pub(super) fn run(cfg: &PipelineConfig, stage: &str) -> Result<StageRecord> {
    let mut ctx = Ctx {
        cfg,
        record: StageRecord {
            name: stage.to_string(),
            ..StageRecord::default()
        },
    };
    match stage {
        "synth" => ctx.synth()?,
        "ingest" => ctx.ingest()?,
        "respond" => ctx.respond()?,
        "fit" => ctx.fit()?,
        "asym" => ctx.asym()?,
        "spectra" => ctx.spectra()?,
        "entropy" => ctx.entropy()?,
        "network" => ctx.network()?,
        "report" => ctx.report()?,
        _ => return Err(Error::Config(format!("unknown stage `{stage}`"))),
    }
    Ok(ctx.record)
}

struct Ctx<'a> {
    cfg: &'a PipelineConfig,
    record: StageRecord,
}

/// Fit of one sample set with its summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitEntry {
    pub fit: StableFit,
    pub stats: DistStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFits {
    pub case: Case,
    pub cross: FitEntry,
    /// `None` when there are too few self-responses to fit.
    pub self_fit: Option<FitEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSpectrum {
    pub case: Case,
    pub b: f64,
    pub spectrum_entropy: f64,
    pub imputed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseEntropy {
    pub case: Case,
    pub hu: Vec<f64>,
    pub hv: Vec<f64>,
    pub i_diagonal: Vec<f64>,
    /// Stock with the smallest `I_ii`.
    pub min_i_ii: String,
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub q: usize,
    pub edges: usize,
    pub connectivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseNetwork {
    pub case: Case,
    pub q_groups: usize,
    pub groups: Vec<GroupSummary>,
    pub threshold_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RespondSummary {
    pub random_l: Option<usize>,
    pub multiple_fraction: f64,
    pub missing: Vec<(Case, usize)>,
}

pub(super) const FITS_JSON: &str = "stable_fits.json";
pub(super) const ASYM_JSON: &str = "asymmetry.json";
pub(super) const SPECTRA_JSON: &str = "spectra.json";
pub(super) const ENTROPY_JSON: &str = "entropy.json";
pub(super) const NETWORK_JSON: &str = "network.json";
pub(super) const RESPOND_JSON: &str = "respond.json";

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn output(&mut self, name: impl Into<String>) -> PathBuf {
        let name = name.into();
        let p = self.path(&name);
        self.record.outputs.push(name);
        p
    }

    fn warn(&mut self, msg: String) {
        self.record.warnings.push(msg);
    }

    fn symbols(&self) -> Result<Vec<String>> {
        Ok(read_stock_meta(&self.path("stocks.csv"))?
            .into_iter()
            .map(|m| m.symbol)
            .collect())
    }

    fn synth(&mut self) -> Result<()> {
        let Some(base) = &self.cfg.synth else {
            return Err(Error::Config("no synthetic configuration".into()));
        };
        let synth = crate::synth::SynthConfig {
            seed: self.cfg.stage_seeds()["synth"],
            ..base.clone()
        };
        let flow = generate(&synth)?;
        write_text(&self.output("messages.csv"), &flow.to_csv())?;
        write_json(&self.output("synth_manifest.json"), &flow.manifest)?;
        Ok(())
    }

    fn message_path(&self) -> PathBuf {
        match &self.cfg.input {
            Some(p) if p.is_dir() => p.join("messages.csv"),
            Some(p) => p.clone(),
            None => self.path("messages.csv"),
        }
    }

    fn ingest(&mut self) -> Result<()> {
        let path = self.message_path();
        let header = self.cfg.input.is_some() && self.cfg.input_header;
        let messages = parse_messages(&read_text(&path)?, header).map_err(|e| Error::Stage {
            stage: "ingest".into(),
            path: path.clone(),
            source: Box::new(e),
        })?;
        let stocks = ingest_messages(
            messages,
            (self.cfg.session_start_ms, self.cfg.session_end_ms),
        )?;
        if stocks.len() < 2 {
            return Err(Error::Precondition(format!(
                "{} stocks in the input, need at least 2",
                stocks.len()
            )));
        }
        std::fs::create_dir_all(self.path("tapes"))
            .map_err(|e| Error::io(self.path("tapes"), e))?;
        let mut meta = Vec::new();
        for (k, s) in stocks.iter().enumerate() {
            write_quotes_csv(
                &self.output(format!("tapes/quotes_{}.csv", s.symbol)),
                &s.tapes.quotes,
            )?;
            write_trades_csv(
                &self.output(format!("tapes/trades_{}.csv", s.symbol)),
                &s.tapes.trades,
            )?;
            if s.dedupe_fraction > 0.0 {
                self.warn(format!(
                    "{}: {:.4} of trades shared a millisecond and were dropped",
                    s.symbol, s.dedupe_fraction
                ));
            }
            meta.push(stock_meta(k, &s.symbol, &s.tapes));
        }
        write_stock_meta(&self.output("stocks.csv"), &meta)
    }

    fn respond(&mut self) -> Result<()> {
        let symbols = self.symbols()?;
        let mut quotes = Vec::new();
        let mut trades = Vec::new();
        for s in &symbols {
            quotes.push(read_quotes_csv(
                &self.path(&format!("tapes/quotes_{s}.csv")),
            )?);
            trades.push(read_trades_csv(
                &self.path(&format!("tapes/trades_{s}.csv")),
            )?);
        }
        let set = compute_responses(&quotes, &trades)?;
        let mut missing = Vec::new();
        for case in [Case::All, Case::Single, Case::Multiple, Case::Weighted] {
            let m = set.get(case).expect("empirical case");
            self.write_response(&symbols, m)?;
            if m.missing_cells() > 0 {
                self.warn(format!(
                    "{case}: {} cells without observations",
                    m.missing_cells()
                ));
            }
            missing.push((case, m.missing_cells()));
        }
        write_grid(&self.output("weights.csv"), &symbols, &set.weights)?;
        let mut random_l = None;
        if self.cfg.cases.contains(&Case::Random) {
            let l = self
                .cfg
                .random_l
                .unwrap_or_else(|| median_count(&set.all.counts));
            let r = random_response(&RandomResponseConfig {
                n: symbols.len(),
                l,
                seed: self.cfg.stage_seeds()["random"],
            })?;
            self.write_response(&symbols, &r)?;
            random_l = Some(l);
        }
        let summary = RespondSummary {
            random_l,
            multiple_fraction: set.multiple_fraction(),
            missing,
        };
        write_json(&self.output(RESPOND_JSON), &summary)
    }

    fn write_response(&mut self, symbols: &[String], m: &ResponseMatrix) -> Result<()> {
        let c = m.case.name();
        write_grid(
            &self.output(format!("responses_{c}.csv")),
            symbols,
            &m.values,
        )?;
        write_grid(&self.output(format!("counts_{c}.csv")), symbols, &m.counts)?;
        write_grid(
            &self.output(format!("stderr_{c}.csv")),
            symbols,
            &m.std_errors,
        )
    }

    fn read_response(&self, case: Case) -> Result<(Vec<String>, ResponseMatrix)> {
        let c = case.name();
        let (symbols, values) =
            read_grid::<Option<f64>>(&self.path(&format!("responses_{c}.csv")))?;
        let (_, counts) = read_grid::<u64>(&self.path(&format!("counts_{c}.csv")))?;
        let (_, std_errors) = read_grid::<Option<f64>>(&self.path(&format!("stderr_{c}.csv")))?;
        if counts.n() != values.n() || std_errors.n() != values.n() {
            return Err(Error::Dimension(format!(
                "artifacts of case {c} disagree in size"
            )));
        }
        Ok((
            symbols,
            ResponseMatrix {
                case,
                values,
                counts,
                std_errors,
            },
        ))
    }

    fn fit(&mut self) -> Result<()> {
        let mut fits = Vec::new();
        for case in self.cfg.ordered_cases() {
            let (_, m) = self.read_response(case)?;
            let cross = m.cross_values();
            let entry = fit_entry(&cross)?;
            self.note_boundary(case, "cross", &entry.fit);
            write_text(
                &self.output(format!("fit_hist_{case}.csv")),
                &fit_histogram(&cross, &entry.fit.params)?,
            )?;
            let own = m.self_values();
            let self_fit = if own.len() >= MIN_FIT_SAMPLES {
                let e = fit_entry(&own)?;
                self.note_boundary(case, "self", &e.fit);
                Some(e)
            } else {
                self.warn(format!(
                    "{case}: {} self-responses, self fit skipped",
                    own.len()
                ));
                None
            };
            fits.push(CaseFits {
                case,
                cross: entry,
                self_fit,
            });
        }
        write_json(&self.output(FITS_JSON), &fits)
    }

    fn note_boundary(&mut self, case: Case, which: &str, fit: &StableFit) {
        if fit.boundary.any() {
            self.warn(format!(
                "{case} {which}: fit on the parameter boundary {:?}",
                fit.boundary
            ));
        }
        if !fit.converged {
            self.warn(format!("{case} {which}: fit did not converge"));
        }
    }

    fn asym(&mut self) -> Result<()> {
        let mut reports: Vec<AsymmetryReport> = Vec::new();
        for case in self.cfg.ordered_cases() {
            let (_, m) = self.read_response(case)?;
            let (x, imputed) = m.to_dense_imputed();
            if imputed > 0 {
                self.warn(format!(
                    "{case}: {imputed} missing cells set to 0 for the asymmetry"
                ));
            }
            let rep = asymmetry_report(case.label(), &x, imputed, self.cfg.asymmetry)?;
            write_text(&self.output(format!("asymmetry_{case}.csv")), &rep.to_csv())?;
            reports.push(rep);
        }
        write_json(&self.output(ASYM_JSON), &reports)
    }

    fn spectra(&mut self) -> Result<()> {
        let mut out = Vec::new();
        for case in self.cfg.ordered_cases() {
            let (_, m) = self.read_response(case)?;
            let (x, imputed) = m.to_dense_imputed();
            let s = spectral_analysis(&x, BinRule::FreedmanDiaconis)?;
            write_text(
                &self.output(format!("spectrum_{case}.csv")),
                &s.spectrum_csv(),
            )?;
            write_text(
                &self.output(format!("spectrum_hist_{case}.csv")),
                &s.histogram_csv(),
            )?;
            out.push(CaseSpectrum {
                case,
                b: s.b,
                spectrum_entropy: spectrum_entropy(&s.eigs, self.cfg.spectrum_bins)?,
                imputed,
            });
        }
        write_json(&self.output(SPECTRA_JSON), &out)
    }

    fn entropy(&mut self) -> Result<()> {
        let fits: Vec<CaseFits> = read_json(&self.path(FITS_JSON))?;
        let meta = read_stock_meta(&self.path("stocks.csv"))?;
        let avg_trades: Vec<f64> = meta.iter().map(|m| m.n_trades as f64).collect();
        let mut out = Vec::new();
        for case in self.cfg.ordered_cases() {
            let law = fits
                .iter()
                .find(|f| f.case == case)
                .ok_or_else(|| {
                    Error::Precondition(format!("no fit for case {case}; run the fit stage"))
                })?
                .cross
                .fit
                .params;
            let (symbols, m) = self.read_response(case)?;
            // The random baseline has L trades per stock by construction.
            let avg = if case == Case::Random {
                vec![*m.counts.get(0, 0) as f64; symbols.len()]
            } else {
                avg_trades.clone()
            };
            if avg.len() != symbols.len() {
                return Err(Error::Dimension(
                    "stocks.csv and response matrices disagree".into(),
                ));
            }
            let p = probability_matrix(&m.values, &law, self.cfg.k_bins)?;
            if p.clamped > 0 {
                self.warn(format!(
                    "{case}: {} responses outside the bin range",
                    p.clamped
                ));
            }
            let (hu, hv) = row_col_entropies(&p.p);
            let e = impact_entropy_matrix(&hu, &hv)?;
            write_grid(
                &self.output(format!("entropy_matrix_{case}.csv")),
                &symbols,
                &e.i,
            )?;
            let scatter = scatter_export(&symbols, &e, &avg)?;
            write_text(
                &self.output(format!("entropies_{case}.csv")),
                &scatter.to_csv(),
            )?;
            write_json(&self.output(format!("entropies_{case}.json")), &scatter)?;
            let diag = e.diagonal();
            let k_min = (0..diag.len())
                .min_by(|&a, &b| diag[a].total_cmp(&diag[b]))
                .unwrap_or(0);
            out.push(CaseEntropy {
                case,
                hu,
                hv,
                i_diagonal: diag,
                min_i_ii: symbols[k_min].clone(),
                clamped: p.clamped,
            });
        }
        write_json(&self.output(ENTROPY_JSON), &out)
    }

    fn network(&mut self) -> Result<()> {
        std::fs::create_dir_all(self.path("networks"))
            .map_err(|e| Error::io(self.path("networks"), e))?;
        let mut out = Vec::new();
        for case in self.cfg.ordered_cases() {
            let (symbols, i) = read_grid::<f64>(&self.path(&format!("entropy_matrix_{case}.csv")))?;
            let q = self
                .cfg
                .q_groups
                .unwrap_or_else(|| PipelineConfig::default_q(i.n()));
            let groups = group_networks(&i, q)?;
            for g in &groups {
                let name = format!("{case}_q{}", g.q);
                write_text(
                    &self.output(format!("networks/{name}.dot")),
                    &g.network.to_dot(&name, &symbols),
                )?;
            }
            let th = threshold_network(&i, &self.cfg.threshold)?;
            let name = format!("{case}_threshold");
            write_text(
                &self.output(format!("networks/{name}.dot")),
                &th.to_dot(&name, &symbols),
            )?;
            write_text(
                &self.output(format!("edges_{case}.csv")),
                &edges_csv(&groups, &symbols),
            )?;
            write_text(
                &self.output(format!("connectivity_by_group_{case}.csv")),
                &connectivity_csv(&groups, &symbols),
            )?;
            out.push(CaseNetwork {
                case,
                q_groups: q,
                groups: groups
                    .iter()
                    .map(|g| GroupSummary {
                        q: g.q,
                        edges: g.network.edges.len(),
                        connectivity: g.network.edge_incident_connectivity(),
                    })
                    .collect(),
                threshold_edges: th.edges.len(),
            });
        }
        write_json(&self.output(NETWORK_JSON), &out)
    }

    fn report(&mut self) -> Result<()> {
        let summary = super::report_summary(&self.cfg.out, &self.cfg.ordered_cases());
        for gap in &summary.gaps {
            self.warn(format!("summary gap: {gap}"));
        }
        write_text(&self.output("summary.txt"), &summary.to_text())?;
        write_json(&self.output("summary.json"), &summary)
    }
}

fn fit_entry(samples: &[f64]) -> Result<FitEntry> {
    let fit = fit_stable(samples)?;
    let stats = dist_stats(samples, &fit.params)?;
    Ok(FitEntry { fit, stats })
}

/// Sample density over 50 equal bins next to the fitted density at the
/// bin centres.
fn fit_histogram(samples: &[f64], law: &StableParams) -> Result<String> {
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let edges = if lo < hi {
        equal_edges(lo, hi, 50)?
    } else {
        vec![lo - 0.5, lo + 0.5]
    };
    let k = edges.len() - 1;
    let mut counts = vec![0usize; k];
    for &v in samples {
        counts[crate::entropy::bin_index(v, &edges).0] += 1;
    }
    let mut s = String::from("left,right,density,fitted\n");
    for (b, w) in edges.windows(2).enumerate() {
        let width = w[1] - w[0];
        let density = counts[b] as f64 / (samples.len() as f64 * width);
        let fitted = stable_pdf(0.5 * (w[0] + w[1]), law)?;
        s.push_str(&format!("{},{},{density},{fitted}\n", w[0], w[1]));
    }
    Ok(s)
}

/// Reads a JSON artifact if present.
pub(super) fn read_optional<T: serde::de::DeserializeOwned>(
    out: &Path,
    name: &str,
) -> Option<Result<T>> {
    let p = out.join(name);
    p.exists().then(|| read_json(&p))
}
