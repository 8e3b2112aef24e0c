//! Antisymmetric spectra of response matrices and the semicircle law of the
//! antisymmetric Gaussian ensemble.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric and antisymmetric parts.
pub fn decompose(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !x.is_square() {
        return Err(Error::Dimension(format!(
            "decomposition of a {}x{} matrix",
            x.nrows(),
            x.ncols()
        )));
    }
    let t = x.transpose();
    Ok(((x + &t) / 2.0, (x - &t) / 2.0))
}

/// Imaginary parts of the eigenvalues of an antisymmetric matrix, sorted
/// ascending. Singular values of an antisymmetric matrix come in equal
/// pairs `sigma, sigma` for each eigenvalue pair `+-i sigma`; each pair is
/// averaged and reported as `-sigma, +sigma`, and odd `N` adds an exact 0.
pub fn antisym_eigs(xa: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !xa.is_square() {
        return Err(Error::Dimension(format!(
            "spectrum of a {}x{} matrix",
            xa.nrows(),
            xa.ncols()
        )));
    }
    let n = xa.nrows();
    let tol = 1e-12 * xa.amax().max(1.0);
    for i in 0..n {
        for j in i..n {
            let d = (xa[(i, j)] + xa[(j, i)]).abs();
            if d > tol {
                return Err(Error::Precondition(format!(
                    "matrix is not antisymmetric at ({i},{j}): |x_ij + x_ji| = {d:e}"
                )));
            }
        }
    }
    let sv = xa.clone().singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut out = Vec::with_capacity(n);
    for pair in s.chunks_exact(2) {
        let v = 0.5 * (pair[0] + pair[1]);
        out.push(v);
        out.push(-v);
    }
    if n % 2 == 1 {
        out.push(0.0);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SommersConfig {
    pub n: usize,
    /// Correlation between `M_ij` and `M_ji`.
    pub c: f64,
    pub seed: u64,
}

/// Gaussian matrix with unit-variance entries and `<M_ij M_ji> = c`.
pub fn sommers_sample(cfg: &SommersConfig) -> Result<DMatrix<f64>> {
    if cfg.n < 2 || !(-1.0..=1.0).contains(&cfg.c) {
        return Err(Error::Config(format!(
            "Sommers ensemble needs N >= 2 and c in [-1, 1], got {cfg:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let s = (1.0 - cfg.c * cfg.c).sqrt();
    let mut m = DMatrix::zeros(cfg.n, cfg.n);
    for i in 0..cfg.n {
        m[(i, i)] = draw();
        for j in i + 1..cfg.n {
            let (z1, z2) = (draw(), draw());
            m[(i, j)] = z1;
            m[(j, i)] = if s == 0.0 {
                cfg.c * z1
            } else {
                cfg.c * z1 + s * z2
            };
        }
    }
    Ok(m)
}

/// `(2 / (pi b^2)) sqrt(b^2 - y^2)` on `[-b, b]`, zero outside.
pub fn semicircle_density(y: f64, b: f64) -> f64 {
    if y.abs() >= b {
        0.0
    } else {
        2.0 / (PI * b * b) * (b * b - y * y).sqrt()
    }
}

pub fn semicircle_cdf(y: f64, b: f64) -> f64 {
    if y <= -b {
        0.0
    } else if y >= b {
        1.0
    } else {
        0.5 + (y * (b * b - y * y).sqrt() + b * b * (y / b).asin()) / (PI * b * b)
    }
}

/// Kolmogorov-Smirnov distance between sample values and the semicircle law.
pub fn ks_semicircle(values: &[f64], b: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = semicircle_cdf(x, b);
            (f - k as f64 / n).abs().max((k + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinRule {
    /// Width `2 IQR n^(-1/3)`.
    FreedmanDiaconis,
    /// Fixed number of bins (rounded up to odd so one bin is centred on 0).
    Count(usize),
}

/// Density-normalized histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let last = *self.edges.last()?;
        if x < self.edges[0] || x > last {
            return None;
        }
        Some((self.edges.partition_point(|&e| e <= x).max(1) - 1).min(self.density.len() - 1))
    }

    pub fn mass(&self) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.density)
            .map(|(w, d)| (w[1] - w[0]) * d)
            .sum()
    }
}

/// Histogram with equal-width bins arranged symmetrically so that one bin
/// is centred on zero.
pub fn centered_histogram(values: &[f64], rule: BinRule) -> Result<Histogram> {
    if values.len() < 2 {
        return Err(Error::Precondition(
            "histogram needs at least 2 values".into(),
        ));
    }
    let reach = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if reach == 0.0 {
        return Err(Error::Numeric("histogram of all-zero values".into()));
    }
    let half_bins = match rule {
        BinRule::Count(k) => k.max(1) / 2,
        BinRule::FreedmanDiaconis => {
            let mut s = values.to_vec();
            s.sort_by(f64::total_cmp);
            let q = |p: f64| s[((p * (s.len() - 1) as f64).round()) as usize];
            let iqr = q(0.75) - q(0.25);
            let width = if iqr > 0.0 {
                2.0 * iqr * (values.len() as f64).powf(-1.0 / 3.0)
            } else {
                2.0 * reach / 10.0
            };
            ((reach / width - 0.5).ceil().max(0.0)) as usize
        }
    };
    // Bins [(k - 1/2) h, (k + 1/2) h] for k = -m..=m, the outer edges at +-reach.
    let h = reach / (half_bins as f64 + 0.5);
    let m = half_bins as i64;
    let mut edges: Vec<f64> = (-m..=m + 1).map(|k| (k as f64 - 0.5) * h).collect();
    edges[0] = -reach;
    *edges.last_mut().expect("non-empty") = reach;
    let mut counts = vec![0usize; edges.len() - 1];
    for &v in values {
        let k = (((v / h) + 0.5).floor() as i64 + m).clamp(0, 2 * m) as usize;
        counts[k] += 1;
    }
    let n = values.len() as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n * (w[1] - w[0])))
        .collect();
    Ok(Histogram { edges, density })
}

/// `b = 2 / (pi p(0))` with `p(0)` the density of the bin containing 0.
pub fn fit_b_from_histogram(h: &Histogram) -> Result<f64> {
    let k = h
        .bin_of(0.0)
        .ok_or_else(|| Error::Numeric("histogram does not cover 0".into()))?;
    let p0 = h.density[k];
    if p0 <= 0.0 {
        return Err(Error::Numeric(
            "cannot rescale the semicircle: p(0) = 0".into(),
        ));
    }
    Ok(2.0 / (PI * p0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub eigs: Vec<f64>,
    pub histogram: Histogram,
    pub b: f64,
}

pub fn spectral_analysis(x: &DMatrix<f64>, rule: BinRule) -> Result<SpectralResult> {
    let (_, xa) = decompose(x)?;
    let eigs = antisym_eigs(&xa)?;
    let histogram = centered_histogram(&eigs, rule)?;
    let b = fit_b_from_histogram(&histogram)?;
    Ok(SpectralResult { eigs, histogram, b })
}

impl SpectralResult {
    pub fn spectrum_csv(&self) -> String {
        let mut s = String::from("im_lambda\n");
        for v in &self.eigs {
            s.push_str(&format!("{v}\n"));
        }
        s
    }

    /// Rows `left,right,density,semicircle` with the semicircle at the bin
    /// centre under the rescaled `b`.
    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("left,right,density,semicircle\n");
        for (w, d) in self.histogram.edges.windows(2).zip(&self.histogram.density) {
            let mid = 0.5 * (w[0] + w[1]);
            s.push_str(&format!(
                "{},{},{d},{}\n",
                w[0],
                w[1],
                semicircle_density(mid, self.b)
            ));
        }
        s
    }
}
