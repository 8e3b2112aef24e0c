//! Immediate price response of stock `i` to trades of stock `j`.
//!
//! Every trade of `j` at millisecond `t` is paired with the last quote of `i`
//! stamped at or before `t-1` and the first one at or after `t+1`. Trades of
//! `j` that share the same quote pair of `i` form the multiple-trade case.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Grid;
use crate::itch::{QuoteRecord, Sign, TradeEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TradeCase {
    Single,
    Multiple,
}

/// Which response matrix a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    All,
    Single,
    Multiple,
    Weighted,
    Random,
}

impl Case {
    pub const ALL: [Case; 5] = [
        Case::All,
        Case::Single,
        Case::Multiple,
        Case::Weighted,
        Case::Random,
    ];

    /// Lower-case name used in file names and flags.
    pub fn name(self) -> &'static str {
        match self {
            Case::All => "all",
            Case::Single => "single",
            Case::Multiple => "multiple",
            Case::Weighted => "weighted",
            Case::Random => "random",
        }
    }

    /// Column label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Case::All => "All",
            Case::Single => "Single",
            Case::Multiple => "Multiple",
            Case::Weighted => "Weighted",
            Case::Random => "Random",
        }
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown case `{s}`")))
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedObservation {
    /// Impacting stock.
    pub source: usize,
    /// Impacted stock.
    pub target: usize,
    pub timestamp: u64,
    pub sign: Sign,
    pub m_prev: f64,
    pub m_foll: f64,
    pub case: TradeCase,
}

impl PairedObservation {
    /// Signed log-return `(ln m_f - ln m_p) * sign`.
    pub fn signed_return(&self) -> f64 {
        (self.m_foll.ln() - self.m_prev.ln()) * self.sign.value()
    }
}

/// Indices of the previous and following quotes bracketing millisecond `t`.
fn bracket(t: u64, quotes: &[QuoteRecord]) -> Option<(usize, usize)> {
    let before = quotes.partition_point(|q| q.timestamp < t);
    let after = quotes.partition_point(|q| q.timestamp <= t);
    if before == 0 || after == quotes.len() {
        return None;
    }
    Some((before - 1, after))
}

/// Midpoints of the quotes of `i` around a trade at `t`.
pub fn pair_trade_with_quotes(t: u64, quotes: &[QuoteRecord]) -> Option<(f64, f64)> {
    let (p, f) = bracket(t, quotes)?;
    Some((quotes[p].midpoint()?, quotes[f].midpoint()?))
}

/// Case label per trade; `None` when the trade has no bracketing quotes.
pub fn classify_cases(trades: &[TradeEvent], quotes: &[QuoteRecord]) -> Vec<Option<TradeCase>> {
    let brackets: Vec<_> = trades
        .iter()
        .map(|t| bracket(t.timestamp, quotes))
        .collect();
    let mut labels = vec![None; trades.len()];
    let mut k = 0;
    while k < brackets.len() {
        let Some(b) = brackets[k] else {
            k += 1;
            continue;
        };
        // Trades are time-ordered, so trades sharing a bracket are adjacent.
        let run = brackets[k..].iter().take_while(|x| **x == Some(b)).count();
        let case = if run > 1 {
            TradeCase::Multiple
        } else {
            TradeCase::Single
        };
        labels[k..k + run].fill(Some(case));
        k += run;
    }
    labels
}

/// All usable observations for the cell (target `i`, source `j`).
pub fn cell_observations(
    target: usize,
    source: usize,
    trades: &[TradeEvent],
    quotes: &[QuoteRecord],
) -> Vec<PairedObservation> {
    let labels = classify_cases(trades, quotes);
    trades
        .iter()
        .zip(labels)
        .filter_map(|(tr, case)| {
            let case = case?;
            let (m_prev, m_foll) = pair_trade_with_quotes(tr.timestamp, quotes)?;
            Some(PairedObservation {
                source,
                target,
                timestamp: tr.timestamp,
                sign: tr.sign,
                m_prev,
                m_foll,
                case,
            })
        })
        .collect()
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then_some(self.mean)
    }

    /// Standard error of the mean; needs at least two values.
    pub fn std_error(&self) -> Option<f64> {
        (self.n > 1).then(|| (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellStats {
    pub all: Moments,
    pub single: Moments,
    pub multiple: Moments,
}

impl CellStats {
    pub fn from_observations(obs: &[PairedObservation]) -> Self {
        let mut s = CellStats::default();
        for o in obs {
            let r = o.signed_return();
            s.all.push(r);
            match o.case {
                TradeCase::Single => s.single.push(r),
                TradeCase::Multiple => s.multiple.push(r),
            }
        }
        s
    }
}

/// Case-tagged response matrix with per-cell counts and standard errors.
/// Cells without observations are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    pub case: Case,
    pub values: Grid<Option<f64>>,
    pub counts: Grid<u64>,
    pub std_errors: Grid<Option<f64>>,
}

impl ResponseMatrix {
    pub fn n(&self) -> usize {
        self.values.n()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        *self.values.get(i, j)
    }

    fn from_moments(case: Case, stats: &Grid<CellStats>, pick: fn(&CellStats) -> Moments) -> Self {
        ResponseMatrix {
            case,
            values: stats.map(|s| pick(s).mean()),
            counts: stats.map(|s| pick(s).n),
            std_errors: stats.map(|s| pick(s).std_error()),
        }
    }

    /// Defined off-diagonal entries in row-major order.
    pub fn cross_values(&self) -> Vec<f64> {
        self.values
            .off_diagonal()
            .filter_map(|(_, _, v)| *v)
            .collect()
    }

    /// Defined diagonal entries.
    pub fn self_values(&self) -> Vec<f64> {
        (0..self.n()).filter_map(|i| self.get(i, i)).collect()
    }

    pub fn missing_cells(&self) -> usize {
        self.values.cells().iter().filter(|v| v.is_none()).count()
    }

    /// Dense copy with missing cells set to zero, plus how many were filled.
    pub fn to_dense_imputed(&self) -> (DMatrix<f64>, usize) {
        let n = self.n();
        let mut filled = 0;
        let m = DMatrix::from_fn(n, n, |i, j| {
            self.get(i, j).unwrap_or_else(|| {
                filled += 1;
                0.0
            })
        });
        (m, filled)
    }
}

/// Responses for every case derived from paired observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSet {
    pub all: ResponseMatrix,
    pub single: ResponseMatrix,
    pub multiple: ResponseMatrix,
    pub weighted: ResponseMatrix,
    /// `#single / (#single + #multiple)`; `None` without observations.
    pub weights: Grid<Option<f64>>,
}

impl ResponseSet {
    pub fn get(&self, case: Case) -> Option<&ResponseMatrix> {
        match case {
            Case::All => Some(&self.all),
            Case::Single => Some(&self.single),
            Case::Multiple => Some(&self.multiple),
            Case::Weighted => Some(&self.weighted),
            Case::Random => None,
        }
    }

    /// Fraction of all paired observations that fall in the multiple case.
    pub fn multiple_fraction(&self) -> f64 {
        let all: u64 = self.all.counts.cells().iter().sum();
        let mult: u64 = self.multiple.counts.cells().iter().sum();
        if all == 0 {
            0.0
        } else {
            mult as f64 / all as f64
        }
    }
}

/// Builds the response matrices. Row `i` is the impacted stock, column `j`
/// the impacting one; both tapes are indexed by stock.
pub fn compute_responses(
    quotes: &[Vec<QuoteRecord>],
    trades: &[Vec<TradeEvent>],
) -> Result<ResponseSet> {
    let n = quotes.len();
    if trades.len() != n {
        return Err(Error::Dimension(format!(
            "{n} quote tapes but {} trade tapes",
            trades.len()
        )));
    }
    let stats: Vec<CellStats> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            CellStats::from_observations(&cell_observations(i, j, &trades[j], &quotes[i]))
        })
        .collect();
    let stats = Grid::from_vec(n, stats)?;
    let single = ResponseMatrix::from_moments(Case::Single, &stats, |s| s.single);
    let multiple = ResponseMatrix::from_moments(Case::Multiple, &stats, |s| s.multiple);
    let weights = stats.map(|s| {
        let total = s.single.n + s.multiple.n;
        (total > 0).then(|| s.single.n as f64 / total as f64)
    });
    let weighted = weighted_response(&single, &multiple, &weights)?;
    Ok(ResponseSet {
        all: ResponseMatrix::from_moments(Case::All, &stats, |s| s.all),
        single,
        multiple,
        weighted,
        weights,
    })
}

/// `w * R_st + (1 - w) * R_mt` per cell. A boundary weight selects one input
/// outright, so a missing value on the unused side does not propagate.
pub fn weighted_response(
    st: &ResponseMatrix,
    mt: &ResponseMatrix,
    w: &Grid<Option<f64>>,
) -> Result<ResponseMatrix> {
    let n = st.n();
    if mt.n() != n || w.n() != n {
        return Err(Error::Dimension(format!(
            "weighted response from {}x{}, {}x{} and weights {}x{}",
            n,
            n,
            mt.n(),
            mt.n(),
            w.n(),
            w.n()
        )));
    }
    if let Some(bad) = w
        .cells()
        .iter()
        .flatten()
        .find(|x| !(0.0..=1.0).contains(*x))
    {
        return Err(Error::Precondition(format!("weight {bad} outside [0, 1]")));
    }
    let combine = |i: usize, j: usize, a: Option<f64>, b: Option<f64>| -> Option<f64> {
        let w = (*w.get(i, j))?;
        if w == 1.0 {
            a
        } else if w == 0.0 {
            b
        } else {
            Some(w * a? + (1.0 - w) * b?)
        }
    };
    Ok(ResponseMatrix {
        case: Case::Weighted,
        values: Grid::from_fn(n, |i, j| combine(i, j, st.get(i, j), mt.get(i, j))),
        counts: Grid::from_fn(n, |i, j| st.counts.get(i, j) + mt.counts.get(i, j)),
        std_errors: Grid::from_fn(n, |i, j| {
            let w = (*w.get(i, j))?;
            let a = st.std_errors.get(i, j).map(|e| w * e);
            let b = mt.std_errors.get(i, j).map(|e| (1.0 - w) * e);
            match (w, a, b) {
                (1.0, a, _) => a,
                (0.0, _, b) => b,
                (_, Some(a), Some(b)) => Some(a.hypot(b)),
                _ => None,
            }
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomResponseConfig {
    pub n: usize,
    pub l: usize,
    pub seed: u64,
}

/// `(1/L) A sgn(B^T)` for injected `N x L` matrices `A` and `B`.
pub fn random_response_from(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != b.shape() || a.ncols() == 0 {
        return Err(Error::Dimension(format!(
            "random response needs equal non-empty shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let signs = b.transpose().map(|x| if x < 0.0 { -1.0 } else { 1.0 });
    Ok(a * signs / a.ncols() as f64)
}

/// Random baseline with standard-normal `A` and `B` drawn from a seeded
/// ChaCha stream (A filled column-major first, then B).
pub fn random_response(cfg: &RandomResponseConfig) -> Result<ResponseMatrix> {
    if cfg.n < 2 || cfg.l < 1 {
        return Err(Error::Config(format!(
            "random response needs N >= 2 and L >= 1, got N={} L={}",
            cfg.n, cfg.l
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = |_: usize, _: usize| -> f64 { StandardNormal.sample(&mut rng) };
    let a = DMatrix::from_fn(cfg.n, cfg.l, &mut draw);
    let b = DMatrix::from_fn(cfg.n, cfg.l, &mut draw);
    let r = random_response_from(&a, &b)?;
    let se = (1.0 / cfg.l as f64).sqrt();
    Ok(ResponseMatrix {
        case: Case::Random,
        values: Grid::from_fn(cfg.n, |i, j| Some(r[(i, j)])),
        counts: Grid::filled(cfg.n, cfg.l as u64),
        std_errors: Grid::filled(cfg.n, Some(se)),
    })
}

/// Median paired-observation count per cell (lower median), at least 1.
pub fn median_count(counts: &Grid<u64>) -> usize {
    let mut c: Vec<u64> = counts.cells().to_vec();
    if c.is_empty() {
        return 1;
    }
    c.sort_unstable();
    (c[(c.len() - 1) / 2] as usize).max(1)
}
