//! Maximum-likelihood fits and summary statistics.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{stable_pdf, StableParams};
use super::table::DensityTable;
use crate::error::{Error, Result};
use crate::optim::{golden_section_max, nelder_mead, NelderMeadOptions};

/// Smallest stability index considered by the fit.
pub const ALPHA_MIN: f64 = 0.7;
const BOUND_EPS: f64 = 1e-4;
const MIN_SAMPLES: usize = 100;
/// From this sample size on every likelihood evaluation builds an exact
/// table; below it the tables come from a shared `(alpha, beta)` lattice.
const EXACT_TABLE_SAMPLES: usize = 2000;
const LATTICE_DA: f64 = 0.025;
const LATTICE_DB: f64 = 0.1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryFlags {
    pub alpha_lower: bool,
    pub alpha_upper: bool,
    pub beta_lower: bool,
    pub beta_upper: bool,
}

impl BoundaryFlags {
    pub fn any(&self) -> bool {
        self.alpha_lower || self.alpha_upper || self.beta_lower || self.beta_upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableFit {
    pub params: StableParams,
    /// Total log-likelihood in the units of the samples.
    pub log_likelihood: f64,
    pub n: usize,
    pub boundary: BoundaryFlags,
    pub converged: bool,
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Linear-interpolation sample quantile of sorted data.
fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let x = p * (s.len() - 1) as f64;
    let k = x.floor() as usize;
    if k + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[k] + (x - k as f64) * (s[k + 1] - s[k])
}

const Q: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];
const GRID_ALPHA: [f64; 14] = [
    0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0,
];
const GRID_BETA: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Standardized quantiles `Q` for each grid point, indexed `[alpha][beta]`.
fn quantile_grid() -> &'static Vec<Vec<[f64; 5]>> {
    static GRID: OnceLock<Vec<Vec<[f64; 5]>>> = OnceLock::new();
    GRID.get_or_init(|| {
        GRID_ALPHA
            .par_iter()
            .map(|&a| {
                GRID_BETA
                    .iter()
                    .map(|&b| {
                        let t = DensityTable::new(a, b);
                        Q.map(|p| t.quantile(p))
                    })
                    .collect()
            })
            .collect()
    })
}

/// Standardized quantiles at any `(alpha, beta)` by bilinear interpolation;
/// negative `beta` uses the mirror symmetry `Z(-beta) = -Z(beta)`.
fn grid_quantiles(alpha: f64, beta: f64) -> [f64; 5] {
    let g = quantile_grid();
    let locate = |grid: &[f64], x: f64| {
        let k = grid.partition_point(|&v| v <= x).clamp(1, grid.len() - 1) - 1;
        let s = ((x - grid[k]) / (grid[k + 1] - grid[k])).clamp(0.0, 1.0);
        (k, s)
    };
    let (ia, sa) = locate(&GRID_ALPHA, alpha);
    let (ib, sb) = locate(&GRID_BETA, beta.abs());
    let mut q = [0.0; 5];
    for (m, v) in q.iter_mut().enumerate() {
        let at = |i: usize, j: usize| g[i][j][m];
        *v = (1.0 - sa) * ((1.0 - sb) * at(ia, ib) + sb * at(ia, ib + 1))
            + sa * ((1.0 - sb) * at(ia + 1, ib) + sb * at(ia + 1, ib + 1));
    }
    if beta < 0.0 {
        let r = q;
        for m in 0..5 {
            q[m] = -r[4 - m];
        }
    }
    q
}

fn nu(q: &[f64; 5]) -> (f64, f64) {
    let spread = q[4] - q[0];
    (
        (spread) / (q[3] - q[1]),
        (q[4] + q[0] - 2.0 * q[2]) / spread,
    )
}

fn check_samples(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "stable fit needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Precondition(
            "stable fit got a non-finite sample".into(),
        ));
    }
    let s = sorted(samples);
    if s[0] == s[s.len() - 1] {
        return Err(Error::Precondition(
            "stable fit of a degenerate sample (all values equal)".into(),
        ));
    }
    Ok(s)
}

/// Quantile-matching estimate: `alpha` and `beta` from the tail and skew
/// ratios of the 5/25/50/75/95% quantiles, then scale from the
/// interquartile range and location from the median.
pub fn quantile_estimate(samples: &[f64]) -> Result<StableParams> {
    let s = check_samples(samples)?;
    Ok(quantile_estimate_sorted(&s))
}

fn quantile_estimate_sorted(s: &[f64]) -> StableParams {
    let qs = Q.map(|p| quantile_sorted(s, p));
    let mut iqr = qs[3] - qs[1];
    if iqr <= 0.0 {
        iqr = (qs[4] - qs[0]).max(s[s.len() - 1] - s[0]) / 10.0;
    }
    let (na, nb) = if qs[3] > qs[1] {
        nu(&qs)
    } else {
        (f64::INFINITY, 0.0)
    };
    let nb = if nb.is_finite() { nb } else { 0.0 };

    let mut best = (f64::INFINITY, 2.0, 0.0);
    for ia in 0..=130 {
        let a = ALPHA_MIN + (2.0 - ALPHA_MIN) * ia as f64 / 130.0;
        for ib in 0..=100 {
            let b = -1.0 + 0.02 * ib as f64;
            let (ga, gb) = nu(&grid_quantiles(a, b));
            let d = (ga.min(50.0) - na.min(50.0)).powi(2) + (gb - nb).powi(2);
            if d < best.0 {
                best = (d, a, b);
            }
        }
    }
    let (_, alpha, beta) = best;
    let q = grid_quantiles(alpha, beta);
    let gamma = iqr / (q[3] - q[1]);
    StableParams {
        alpha,
        beta,
        gamma,
        mu0: qs[2] - gamma * q[2],
    }
}

type TableCache = Mutex<HashMap<(usize, usize), Arc<DensityTable>>>;

fn lattice_table(ia: usize, ib: usize) -> Arc<DensityTable> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("table cache").get(&(ia, ib)) {
        return t.clone();
    }
    let alpha = (ALPHA_MIN + LATTICE_DA * ia as f64).min(2.0);
    let beta = (-1.0 + LATTICE_DB * ib as f64).min(1.0);
    let t = Arc::new(DensityTable::new(alpha, beta));
    cache
        .lock()
        .expect("table cache")
        .insert((ia, ib), t.clone());
    t
}

/// Log-density bilinear in `(alpha, beta)` between lattice tables.
struct LatticeLaw {
    corners: [Arc<DensityTable>; 4],
    sa: f64,
    sb: f64,
}

impl LatticeLaw {
    fn new(alpha: f64, beta: f64) -> Self {
        let xa = (alpha - ALPHA_MIN) / LATTICE_DA;
        let xb = (beta + 1.0) / LATTICE_DB;
        let top_a = ((2.0 - ALPHA_MIN) / LATTICE_DA).round() as usize;
        let top_b = (2.0 / LATTICE_DB).round() as usize;
        let ia = (xa.floor() as usize).min(top_a - 1);
        let ib = (xb.floor() as usize).min(top_b - 1);
        LatticeLaw {
            corners: [
                lattice_table(ia, ib),
                lattice_table(ia, ib + 1),
                lattice_table(ia + 1, ib),
                lattice_table(ia + 1, ib + 1),
            ],
            sa: (xa - ia as f64).clamp(0.0, 1.0),
            sb: (xb - ib as f64).clamp(0.0, 1.0),
        }
    }

    fn ln_pdf(&self, z: f64) -> f64 {
        let [c00, c01, c10, c11] = &self.corners;
        let (sa, sb) = (self.sa, self.sb);
        (1.0 - sa) * ((1.0 - sb) * c00.ln_pdf(z) + sb * c01.ln_pdf(z))
            + sa * ((1.0 - sb) * c10.ln_pdf(z) + sb * c11.ln_pdf(z))
    }
}

fn clamp_shape(alpha: f64, beta: f64) -> (f64, f64, f64) {
    let a = alpha.clamp(ALPHA_MIN, 2.0);
    let b = beta.clamp(-1.0, 1.0);
    let excess = (alpha - a).powi(2) + (beta - b).powi(2);
    (a, b, excess)
}

/// Maximum-likelihood fit, initialized by [`quantile_estimate`].
///
/// Works on data centred by the median and scaled by the initial `gamma`
/// so that the optimizer sees order-one coordinates
/// `(alpha, beta, ln gamma, mu0)`.
pub fn fit_stable(samples: &[f64]) -> Result<StableFit> {
    let s = check_samples(samples)?;
    let init = quantile_estimate_sorted(&s);
    let center = quantile_sorted(&s, 0.5);
    let scale = init.gamma;
    let y: Vec<f64> = samples.iter().map(|x| (x - center) / scale).collect();
    let n = y.len() as f64;

    let mut cache: Option<DensityTable> = None;
    let exact = y.len() >= EXACT_TABLE_SAMPLES;
    let mut nll = |th: &[f64]| -> f64 {
        let (a, b, excess) = clamp_shape(th[0], th[1]);
        let (ln_g, mu) = (th[2], th[3]);
        let inv = (-ln_g).exp();
        let sum: f64 = if exact {
            let reuse = matches!(&cache, Some(t) if t.alpha() == a && t.beta() == b);
            if !reuse {
                cache = Some(DensityTable::new(a, b));
            }
            let table = cache.as_ref().expect("table just built");
            // Fixed chunks summed in order keep the total independent of scheduling.
            let parts: Vec<f64> = y
                .par_chunks(4096)
                .map(|c| c.iter().map(|&v| table.ln_pdf((v - mu) * inv)).sum())
                .collect();
            parts.iter().sum()
        } else {
            let law = LatticeLaw::new(a, b);
            y.iter().map(|&v| law.ln_pdf((v - mu) * inv)).sum()
        };
        -(sum / n - ln_g) + 1e3 * excess
    };

    let x0 = [init.alpha, init.beta, 0.0, (init.mu0 - center) / scale];
    let opts = NelderMeadOptions {
        max_evals: 1500,
        x_tol: 1e-5,
        f_tol: 1e-9,
    };
    let mut m = nelder_mead(&mut nll, &x0, &[0.1, 0.2, 0.1, 0.1], &opts);
    // A restart guards against a collapsed simplex.
    let m2 = nelder_mead(&mut nll, &m.x, &[0.05, 0.1, 0.05, 0.05], &opts);
    if m2.f <= m.f {
        m = m2;
    }

    let (alpha, beta, _) = clamp_shape(m.x[0], m.x[1]);
    // The Gaussian limit does not depend on beta; report the symmetric one.
    let beta = if alpha == 2.0 { 0.0 } else { beta };
    let gamma = scale * m.x[2].exp();
    let params = StableParams::new(alpha, beta, gamma, center + scale * m.x[3])?;
    let log_likelihood = -m.f * n - n * scale.ln();
    if !log_likelihood.is_finite() {
        return Err(Error::Numeric(
            "stable fit produced a non-finite likelihood".into(),
        ));
    }
    Ok(StableFit {
        params,
        log_likelihood,
        n: samples.len(),
        boundary: BoundaryFlags {
            alpha_lower: alpha <= ALPHA_MIN + BOUND_EPS,
            alpha_upper: alpha >= 2.0 - BOUND_EPS,
            beta_lower: beta <= -1.0 + BOUND_EPS,
            beta_upper: beta >= 1.0 - BOUND_EPS,
        },
        converged: m.converged,
    })
}

/// Sample summary next to the fitted law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistStats {
    pub mode: f64,
    pub mean: f64,
    pub median: f64,
    pub skewness: f64,
    pub std_dev: f64,
}

/// Mean, median, population standard deviation and skewness
/// `<(x - mean)^3> / sigma^3` of the sample; mode of the fitted density.
pub fn dist_stats(samples: &[f64], fitted: &StableParams) -> Result<DistStats> {
    if samples.len() < 2 {
        return Err(Error::Precondition(format!(
            "summary statistics need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = samples.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let std_dev = m2.sqrt();
    if std_dev == 0.0 {
        return Err(Error::Numeric(
            "skewness undefined for a sample with zero variance".into(),
        ));
    }
    let s = sorted(samples);
    let median = quantile_sorted(&s, 0.5);

    fitted.validate()?;
    let mut failure = None;
    let (mode, _) = golden_section_max(
        |x| match stable_pdf(x, fitted) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        fitted.mu0 - 3.0 * fitted.gamma,
        fitted.mu0 + 3.0 * fitted.gamma,
        1e-7 * fitted.gamma,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(DistStats {
        mode,
        mean,
        median,
        skewness: m3 / std_dev.powi(3),
        std_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_grid_is_consistent() {
        // alpha = 2 is normal with variance 2: IQR ratio 1.6449/0.6745.
        let (na, nb) = nu(&grid_quantiles(2.0, 0.0));
        assert!((na - 2.4387).abs() < 5e-3, "{na}");
        assert!(nb.abs() < 1e-3);
        // Heavier tails raise the ratio; positive beta gives positive skew.
        assert!(nu(&grid_quantiles(1.2, 0.0)).0 > nu(&grid_quantiles(1.8, 0.0)).0);
        assert!(nu(&grid_quantiles(1.5, 0.5)).1 > 0.0);
        assert!(nu(&grid_quantiles(1.5, -0.5)).1 < 0.0);
    }

    #[test]
    fn summary_of_symmetric_sample() {
        let p = StableParams::new(2.0, 0.0, 1.0, 2.0).unwrap();
        let d = dist_stats(&[1.0, 2.0, 3.0], &p).unwrap();
        assert_eq!(d.mean, 2.0);
        assert_eq!(d.median, 2.0);
        assert_eq!(d.skewness, 0.0);
        assert!((d.std_dev - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((d.mode - 2.0).abs() < 1e-5);
    }

    #[test]
    fn summary_errors() {
        let p = StableParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            dist_stats(&[1.0], &p),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            dist_stats(&[1.0, 1.0], &p),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn fit_preconditions() {
        assert!(matches!(
            fit_stable(&[1.0; 50]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            fit_stable(&[1.0; 500]),
            Err(Error::Precondition(_))
        ));
    }
}
