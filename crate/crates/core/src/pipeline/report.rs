use std::fmt::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stages::{read_optional, CaseFits, CaseSpectrum, ASYM_JSON, FITS_JSON, SPECTRA_JSON};
use crate::asymmetry::AsymmetryReport;
use crate::response::Case;
use crate::stable::StableParams;

/// One case column of the summary. Missing values are gaps of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryColumn {
    pub case: Case,
    pub label: String,
    pub mode: Option<f64>,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub skewness: Option<f64>,
    pub overall_asymmetry: Option<f64>,
    pub spectrum_entropy: Option<f64>,
    pub cross_fit: Option<StableParams>,
    pub self_fit: Option<StableParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub columns: Vec<SummaryColumn>,
    pub gaps: Vec<String>,
}

/// Collects the per-case measurements of a run directory. Absent or
/// unreadable artifacts leave gaps instead of failing.
pub fn report_summary(out: &Path, cases: &[Case]) -> Summary {
    let mut gaps = Vec::new();
    let mut load = |name: &str| -> Option<serde_json::Value> {
        match read_optional::<serde_json::Value>(out, name) {
            Some(Ok(v)) => Some(v),
            Some(Err(e)) => {
                gaps.push(format!("{name}: {e}"));
                None
            }
            None => {
                gaps.push(format!("{name} missing"));
                None
            }
        }
    };
    let fits: Vec<CaseFits> = load(FITS_JSON)
        .and_then(|v| serde_json::from_value(v).ok())
        .unwrap_or_default();
    let asym: Vec<AsymmetryReport> = load(ASYM_JSON)
        .and_then(|v| serde_json::from_value(v).ok())
        .unwrap_or_default();
    let spectra: Vec<CaseSpectrum> = load(SPECTRA_JSON)
        .and_then(|v| serde_json::from_value(v).ok())
        .unwrap_or_default();

    let columns = cases
        .iter()
        .map(|&case| {
            let fit = fits.iter().find(|f| f.case == case);
            let stats = fit.map(|f| f.cross.stats);
            let col = SummaryColumn {
                case,
                label: case.label().to_string(),
                mode: stats.map(|s| s.mode),
                mean: stats.map(|s| s.mean),
                median: stats.map(|s| s.median),
                skewness: stats.map(|s| s.skewness),
                overall_asymmetry: asym
                    .iter()
                    .find(|a| a.label == case.label())
                    .map(|a| a.overall),
                spectrum_entropy: spectra
                    .iter()
                    .find(|s| s.case == case)
                    .map(|s| s.spectrum_entropy),
                cross_fit: fit.map(|f| f.cross.fit.params),
                self_fit: fit.and_then(|f| f.self_fit.as_ref()).map(|e| e.fit.params),
            };
            for (name, missing) in [
                ("fit", col.cross_fit.is_none()),
                ("asymmetry", col.overall_asymmetry.is_none()),
                ("spectrum", col.spectrum_entropy.is_none()),
            ] {
                if missing {
                    gaps.push(format!("{}: no {name} result", col.label));
                }
            }
            col
        })
        .collect();
    Summary { columns, gaps }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:e}"))
}

impl Summary {
    /// Fixed-width rendering: a measurement table and a fit table. Numbers
    /// use the shortest exact scientific form, so they parse back to the
    /// JSON values.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<20}", "");
        for c in &self.columns {
            let _ = write!(s, " {:>24}", c.label);
        }
        s.push('\n');
        type Pick = fn(&SummaryColumn) -> Option<f64>;
        let rows: [(&str, Pick); 6] = [
            ("Mode", |c| c.mode),
            ("Mean", |c| c.mean),
            ("Median", |c| c.median),
            ("Skewness", |c| c.skewness),
            ("Overall asymmetry", |c| c.overall_asymmetry),
            ("Spectrum entropy", |c| c.spectrum_entropy),
        ];
        for (name, pick) in rows {
            let _ = write!(s, "{name:<20}");
            for c in &self.columns {
                let _ = write!(s, " {:>24}", cell(pick(c)));
            }
            s.push('\n');
        }
        s.push_str("\nStable fits\n");
        let _ = writeln!(
            s,
            "{:<20} {:>24} {:>24} {:>24} {:>24}",
            "", "alpha", "beta", "gamma", "mu0"
        );
        for c in &self.columns {
            for (kind, p) in [("cross", c.cross_fit), ("self", c.self_fit)] {
                let _ = write!(s, "{:<20}", format!("{} {kind}", c.label));
                for v in [
                    p.map(|p| p.alpha),
                    p.map(|p| p.beta),
                    p.map(|p| p.gamma),
                    p.map(|p| p.mu0),
                ] {
                    let _ = write!(s, " {:>24}", cell(v));
                }
                s.push('\n');
            }
        }
        if !self.gaps.is_empty() {
            s.push_str("\nGaps\n");
            for g in &self.gaps {
                let _ = writeln!(s, "  {g}");
            }
        }
        s
    }
}
