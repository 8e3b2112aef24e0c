//! Tabulated log-density of the standardized stable law for fast
//! likelihood evaluation.
//!
//! The inversion integral is evaluated with one fixed Gauss-Legendre rule on
//! an `asinh`-spaced grid of `z`, and `ln f` is interpolated with monotone
//! cubic Hermite segments. Beyond the grid the density continues as the
//! power law `|z|^(-alpha-1)` matched at the edge.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::density::{breakpoints, skew_phase};
use super::quad::gauss_legendre;

const Z_MAX: f64 = 50.0;
const POINTS: usize = 513;
const NODES_PER_PANEL: usize = 16;
/// Values below this are quadrature noise and treated as zero density.
const RESOLVED: f64 = 1e-14;
const LN_FLOOR: f64 = -690.775_527_898_213_7; // ln 1e-300

#[derive(Debug, Clone)]
pub struct DensityTable {
    alpha: f64,
    beta: f64,
    t0: f64,
    dt: f64,
    ln_f: Vec<f64>,
    slope: Vec<f64>,
    cdf: Vec<f64>,
}

impl DensityTable {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let t_max = Z_MAX.asinh();
        let dt = 2.0 * t_max / (POINTS - 1) as f64;
        let t0 = -t_max;

        let (gx, gw) = gauss_legendre(NODES_PER_PANEL);
        let bp = breakpoints(alpha, Z_MAX);
        let mut nodes = Vec::with_capacity((bp.len() - 1) * NODES_PER_PANEL);
        for w in bp.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in gx.iter().zip(&gw) {
                let u = c + h * x;
                nodes.push((
                    u,
                    wt * h * (-u.powf(alpha)).exp() / PI,
                    skew_phase(u, alpha, beta),
                ));
            }
        }

        let mut ln_f: Vec<f64> = (0..POINTS)
            .into_par_iter()
            .map(|k| {
                let z = (t0 + dt * k as f64).sinh();
                let f: f64 = nodes
                    .iter()
                    .map(|(u, a, psi)| a * (z * u + psi).cos())
                    .sum();
                if f > RESOLVED {
                    f.ln()
                } else {
                    LN_FLOOR
                }
            })
            .collect();

        // Stable laws are unimodal: remove noise bumps on the way out.
        let peak = (0..POINTS)
            .max_by(|&a, &b| ln_f[a].total_cmp(&ln_f[b]))
            .unwrap_or(0);
        for k in peak + 1..POINTS {
            ln_f[k] = ln_f[k].min(ln_f[k - 1]);
        }
        for k in (0..peak).rev() {
            ln_f[k] = ln_f[k].min(ln_f[k + 1]);
        }

        let slope = pchip_slopes(&ln_f, dt);
        let mut table = DensityTable {
            alpha,
            beta,
            t0,
            dt,
            ln_f,
            slope,
            cdf: Vec::new(),
        };
        table.cdf = table.cumulative();
        table
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn hermite(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.dt;
        let k = (x.floor() as usize).min(POINTS - 2);
        let s = x - k as f64;
        let (s2, s3) = (s * s, s * s * s);
        let h = self.dt;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.ln_f[k]
            + (s3 - 2.0 * s2 + s) * h * self.slope[k]
            + (-2.0 * s3 + 3.0 * s2) * self.ln_f[k + 1]
            + (s3 - s2) * h * self.slope[k + 1]
    }

    /// Log-density of the standardized law.
    pub fn ln_pdf(&self, z: f64) -> f64 {
        if self.alpha == 2.0 {
            return -z * z / 4.0 - (2.0 * PI.sqrt()).ln();
        }
        if z.abs() <= Z_MAX {
            self.hermite(z.asinh())
        } else {
            let edge = if z > 0.0 {
                self.ln_f[POINTS - 1]
            } else {
                self.ln_f[0]
            };
            (edge - (self.alpha + 1.0) * (z.abs() / Z_MAX).ln()).max(LN_FLOOR)
        }
    }

    pub fn pdf(&self, z: f64) -> f64 {
        self.ln_pdf(z).exp()
    }

    fn tail_mass(&self, edge_ln_f: f64) -> f64 {
        if self.alpha == 2.0 {
            0.0
        } else {
            edge_ln_f.exp() * Z_MAX / self.alpha
        }
    }

    /// Cumulative mass at each grid point by Simpson's rule in `t`.
    fn cumulative(&self) -> Vec<f64> {
        let g = |t: f64| self.pdf(t.sinh()) * t.cosh();
        let mut c = Vec::with_capacity(POINTS);
        let mut acc = self.tail_mass(self.ln_f[0]);
        c.push(acc);
        for k in 0..POINTS - 1 {
            let a = self.t0 + self.dt * k as f64;
            let b = a + self.dt;
            acc += self.dt / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
            c.push(acc);
        }
        let total = acc + self.tail_mass(self.ln_f[POINTS - 1]);
        c.iter_mut().for_each(|v| *v /= total);
        c
    }

    /// Distribution function, linear in `t` between grid points.
    pub fn cdf(&self, z: f64) -> f64 {
        let last = POINTS - 1;
        if z < -Z_MAX {
            return self.cdf[0] * (Z_MAX / -z).powf(self.alpha);
        }
        if z > Z_MAX {
            return 1.0 - (1.0 - self.cdf[last]) * (Z_MAX / z).powf(self.alpha);
        }
        let x = (z.asinh() - self.t0) / self.dt;
        let k = (x.floor() as usize).min(last - 1);
        let s = x - k as f64;
        self.cdf[k] + s * (self.cdf[k + 1] - self.cdf[k])
    }

    /// Inverse of [`DensityTable::cdf`].
    pub fn quantile(&self, p: f64) -> f64 {
        let last = POINTS - 1;
        if p <= self.cdf[0] {
            return -Z_MAX * (self.cdf[0] / p).powf(1.0 / self.alpha);
        }
        if p >= self.cdf[last] {
            return Z_MAX * ((1.0 - self.cdf[last]) / (1.0 - p)).powf(1.0 / self.alpha);
        }
        let k = self.cdf.partition_point(|&c| c <= p) - 1;
        let span = self.cdf[k + 1] - self.cdf[k];
        let s = if span > 0.0 {
            (p - self.cdf[k]) / span
        } else {
            0.0
        };
        (self.t0 + self.dt * (k as f64 + s)).sinh()
    }
}

/// Fritsch-Carlson slopes on a uniform grid: no overshoot between samples.
fn pchip_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let d: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        let (a, b) = (d[k - 1], d[k]);
        m[k] = if a * b <= 0.0 {
            0.0
        } else {
            2.0 / (1.0 / a + 1.0 / b)
        };
    }
    m
}
