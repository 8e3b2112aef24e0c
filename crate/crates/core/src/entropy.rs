//! Shannon entropies (natural log) of spectra and of response probability
//! matrices, and the entropy of impacts `I_ij = sqrt(H(u_i) H(v_j))`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Grid;
use crate::stable::Cdf;

/// Entropy of integer bin counts, grouping bins with equal counts:
/// `sum_c (m_c c / n) ln(n / c)`. A uniform histogram over `K` bins gives
/// exactly `ln K`.
pub fn entropy_of_counts(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let mut by_count: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in counts.iter().filter(|&&c| c > 0) {
        *by_count.entry(c).or_default() += 1;
    }
    by_count
        .iter()
        .map(|(&c, &m)| (m * c) as f64 / n as f64 * (n as f64 / c as f64).ln())
        .sum()
}

/// `-sum p ln p` with `0 ln 0 = 0`.
pub fn entropy_of_probabilities(p: &[f64]) -> f64 {
    p.iter().map(|&x| plogp(x)).sum()
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Equal-width edges over `[lo, hi]`.
pub fn equal_edges(lo: f64, hi: f64, k: usize) -> Result<Vec<f64>> {
    if k < 1 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Precondition(format!(
            "cannot place {k} bins on [{lo}, {hi}]"
        )));
    }
    let w = (hi - lo) / k as f64;
    let mut e: Vec<f64> = (0..=k).map(|i| lo + w * i as f64).collect();
    e[k] = hi;
    Ok(e)
}

/// Bin of `x` for increasing edges, the last bin closed on the right.
/// Values outside the range are clamped; the flag reports clamping.
pub fn bin_index(x: f64, edges: &[f64]) -> (usize, bool) {
    let k = edges.len() - 1;
    if x < edges[0] {
        return (0, true);
    }
    if x > edges[k] {
        return (k - 1, true);
    }
    (
        (edges.partition_point(|&e| e <= x).max(1) - 1).min(k - 1),
        false,
    )
}

/// Entropy of `values` histogrammed into `k` equal bins over their range.
pub fn spectrum_entropy(values: &[f64], k: usize) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Precondition(
            "spectrum entropy needs at least 2 values".into(),
        ));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if lo == hi {
        return Ok(0.0);
    }
    let edges = equal_edges(lo, hi, k)?;
    let mut counts = vec![0usize; k];
    for &v in values {
        counts[bin_index(v, &edges).0] += 1;
    }
    Ok(entropy_of_counts(&counts))
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(
            "bin edges must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Probability mass of every bin under `law`; the first and last bins also
/// take the tails beyond the outer edges so that the masses sum to one.
pub fn bin_masses(law: &impl Cdf, edges: &[f64]) -> Result<Vec<f64>> {
    check_edges(edges)?;
    let k = edges.len() - 1;
    let inner: Vec<f64> = edges[1..k]
        .iter()
        .map(|&e| law.cdf(e))
        .collect::<Result<_>>()?;
    let mut m = Vec::with_capacity(k);
    let mut prev = 0.0;
    for f in inner {
        m.push((f - prev).max(0.0));
        prev = f;
    }
    m.push((1.0 - prev).max(0.0));
    Ok(m)
}

/// Mass of the bin containing `r`, with the clamping flag.
pub fn bin_probability(r: f64, law: &impl Cdf, edges: &[f64]) -> Result<(f64, bool)> {
    let masses = bin_masses(law, edges)?;
    let (k, clamped) = bin_index(r, edges);
    Ok((masses[k], clamped))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    /// Normalized probabilities; diagonal 1, missing cells 0.
    pub p: Grid<f64>,
    /// Raw bin mass per cell; `None` for missing cells.
    pub p0: Grid<Option<f64>>,
    pub edges: Vec<f64>,
    /// Responses outside the edge range, assigned to a boundary bin.
    pub clamped: usize,
}

/// Maps responses to probabilities with `K` equal bins over the range of
/// the defined off-diagonal responses.
pub fn probability_matrix(
    r: &Grid<Option<f64>>,
    law: &impl Cdf,
    k: usize,
) -> Result<ProbabilityMatrix> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 bins, got {k}")));
    }
    let (lo, hi) = r
        .off_diagonal()
        .filter_map(|(_, _, v)| *v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if lo > hi {
        return Err(Error::Precondition(
            "every off-diagonal response is missing".into(),
        ));
    }
    probability_matrix_with_edges(r, law, &equal_edges(lo, hi, k)?)
}

/// `P_ij = P0_ij / sum_{k != l} P0_kl` off the diagonal, `P_ii = 1`.
pub fn probability_matrix_with_edges(
    r: &Grid<Option<f64>>,
    law: &impl Cdf,
    edges: &[f64],
) -> Result<ProbabilityMatrix> {
    let masses = bin_masses(law, edges)?;
    let mut clamped = 0;
    let p0 = Grid::from_fn(r.n(), |i, j| {
        let v = (*r.get(i, j))?;
        let (k, c) = bin_index(v, edges);
        if i != j && c {
            clamped += 1;
        }
        Some(masses[k])
    });
    Ok(ProbabilityMatrix {
        p: normalize_masses(&p0)?,
        p0,
        edges: edges.to_vec(),
        clamped,
    })
}

/// Normalizes raw masses over the off-diagonal cells; missing cells get 0
/// and the diagonal 1.
pub fn normalize_masses(p0: &Grid<Option<f64>>) -> Result<Grid<f64>> {
    let total: f64 = p0.off_diagonal().filter_map(|(_, _, v)| *v).sum();
    if !(total > 0.0) {
        return Err(Error::Numeric("off-diagonal bin masses sum to zero".into()));
    }
    Ok(Grid::from_fn(p0.n(), |i, j| {
        if i == j {
            1.0
        } else {
            p0.get(i, j).map_or(0.0, |v| v / total)
        }
    }))
}

/// Row entropies `H(u_i)` and column entropies `H(v_j)`.
pub fn row_col_entropies(p: &Grid<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = p.n();
    let mut hu = vec![0.0; n];
    let mut hv = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let t = plogp(*p.get(i, j));
            hu[i] += t;
            hv[j] += t;
        }
    }
    (hu, hv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyMatrix {
    pub hu: Vec<f64>,
    pub hv: Vec<f64>,
    pub i: Grid<f64>,
}

impl EntropyMatrix {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.i.n()).map(|k| *self.i.get(k, k)).collect()
    }
}

pub fn impact_entropy_matrix(hu: &[f64], hv: &[f64]) -> Result<EntropyMatrix> {
    if hu.len() != hv.len() {
        return Err(Error::Dimension(format!(
            "{} row and {} column entropies",
            hu.len(),
            hv.len()
        )));
    }
    if let Some(h) = hu.iter().chain(hv).find(|h| !(**h >= 0.0)) {
        return Err(Error::Precondition(format!(
            "negative or undefined entropy {h}"
        )));
    }
    Ok(EntropyMatrix {
        hu: hu.to_vec(),
        hv: hv.to_vec(),
        i: Grid::from_fn(hu.len(), |i, j| (hu[i] * hv[j]).sqrt()),
    })
}

/// One row of the entropy-plane scatter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub symbol: String,
    pub hu: f64,
    pub hv: f64,
    pub i_ii: f64,
    pub avg_trades: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterTable {
    pub rows: Vec<ScatterRow>,
    pub mean_hu: f64,
    pub mean_hv: f64,
    pub mean_i_ii: f64,
    pub ref_hu: f64,
    pub ref_hv: f64,
    pub ref_i_ii: f64,
}

pub fn scatter_export(
    symbols: &[String],
    e: &EntropyMatrix,
    avg_trades: &[f64],
) -> Result<ScatterTable> {
    let n = e.hu.len();
    if symbols.len() != n || avg_trades.len() != n {
        return Err(Error::Dimension(format!(
            "{} symbols and {} trade counts for {n} stocks",
            symbols.len(),
            avg_trades.len()
        )));
    }
    let diag = e.diagonal();
    let rows: Vec<ScatterRow> = (0..n)
        .map(|k| ScatterRow {
            symbol: symbols[k].clone(),
            hu: e.hu[k],
            hv: e.hv[k],
            i_ii: diag[k],
            avg_trades: avg_trades[k],
        })
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let (mean_hu, mean_hv, mean_i_ii) = (mean(&e.hu), mean(&e.hv), mean(&diag));
    Ok(ScatterTable {
        rows,
        mean_hu,
        mean_hv,
        mean_i_ii,
        ref_hu: 0.75 * mean_hu,
        ref_hv: 0.75 * mean_hv,
        ref_i_ii: 0.75 * mean_i_ii,
    })
}

impl ScatterTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("symbol,H_u,H_v,I_ii,avg_daily_trades\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.symbol, r.hu, r.hv, r.i_ii, r.avg_trades
            ));
        }
        s
    }
}
