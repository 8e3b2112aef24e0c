//! Characteristic function, density and distribution function of the
//! stable law, by Fourier inversion.
//!
//! Parameterization: with `u = gamma * |kappa|`,
//! `ln phi(kappa) = -u^alpha - i sgn(kappa) psi(u) + i mu0 kappa` where
//! `psi(u) = beta tan(pi alpha / 2) (u - u^alpha)` for `alpha != 1` and
//! `psi(u) = beta (2/pi) u ln u` for `alpha = 1`. This form is continuous in
//! `alpha` and `mu0` sits close to the mode.

use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::quad::gauss_kronrod;
use crate::error::{Error, Result};

/// Half-width around `alpha = 1` evaluated with the `alpha = 1` branch.
pub const ALPHA_ONE_BAND: f64 = 1e-3;

/// `-ln` of the characteristic-function magnitude where integration stops.
const LN_CUTOFF: f64 = 27.631_021_115_928_547; // ln 1e12

/// Beyond this standardized distance the first-order tail expansion is used.
const ASYMPTOTIC_Z: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu0: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, mu0: f64) -> Result<Self> {
        let p = StableParams {
            alpha,
            beta,
            gamma,
            mu0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.alpha <= 2.0
            && (-1.0..=1.0).contains(&self.beta)
            && self.gamma > 0.0
            && self.gamma.is_finite()
            && self.mu0.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "invalid stable parameters {self:?}"
            )))
        }
    }

    pub fn standardize(&self, x: f64) -> f64 {
        (x - self.mu0) / self.gamma
    }
}

pub(crate) fn near_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < ALPHA_ONE_BAND
}

/// Skew phase `psi(u)` of the standardized law for `u >= 0`.
pub(crate) fn skew_phase(u: f64, alpha: f64, beta: f64) -> f64 {
    if beta == 0.0 || alpha == 2.0 || u == 0.0 {
        0.0
    } else if near_one(alpha) {
        beta * (2.0 / PI) * u * u.ln()
    } else {
        // u - u^alpha = -u (u^(alpha-1) - 1), accurate near alpha = 1.
        -beta * (PI * alpha / 2.0).tan() * u * ((alpha - 1.0) * u.ln()).exp_m1()
    }
}

/// `c_alpha = sin(pi alpha / 2) Gamma(alpha) / pi`, the tail constant.
pub(crate) fn tail_constant(alpha: f64) -> f64 {
    (PI * alpha / 2.0).sin() * gamma_fn(alpha) / PI
}

/// Lanczos approximation of the gamma function for positive arguments.
pub(crate) fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

pub fn stable_cf(kappa: f64, p: &StableParams) -> Complex<f64> {
    if kappa == 0.0 {
        return Complex::new(1.0, 0.0);
    }
    let u = p.gamma * kappa.abs();
    let re = -u.powf(p.alpha);
    let im = -kappa.signum() * skew_phase(u, p.alpha, p.beta) + p.mu0 * kappa;
    Complex::new(re, im).exp()
}

pub(crate) fn u_max(alpha: f64) -> f64 {
    LN_CUTOFF.powf(1.0 / alpha)
}

/// Breakpoints on `[0, u_max]`: decades near the origin, then panels no
/// wider than one period of the fastest oscillation.
pub(crate) fn breakpoints(alpha: f64, freq: f64) -> Vec<f64> {
    let top = u_max(alpha);
    let mut b = vec![0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.1];
    let width = 2.0 * PI / (freq + 10.0);
    let panels = ((top - 0.1) / width).ceil().max(4.0) as usize;
    let step = (top - 0.1) / panels as f64;
    b.extend((1..=panels).map(|k| 0.1 + step * k as f64));
    b
}

fn tail_density(z: f64, alpha: f64, beta: f64) -> f64 {
    let side = if z > 0.0 { 1.0 + beta } else { 1.0 - beta };
    alpha * tail_constant(alpha) * side * z.abs().powf(-alpha - 1.0)
}

/// Density of the standardized law (`gamma = 1`, `mu0 = 0`).
pub fn standard_pdf(z: f64, alpha: f64, beta: f64) -> Result<f64> {
    if z.abs() > ASYMPTOTIC_Z {
        return Ok(tail_density(z, alpha, beta));
    }
    let f = |u: f64| (-u.powf(alpha)).exp() * (z * u + skew_phase(u, alpha, beta)).cos();
    let integral = gauss_kronrod(f, &breakpoints(alpha, z.abs()), 1e-9 * PI, 50_000)?;
    Ok((integral / PI).max(0.0))
}

/// Density by adaptive Gauss-Kronrod inversion of the characteristic function.
pub fn stable_pdf(x: f64, p: &StableParams) -> Result<f64> {
    p.validate()?;
    Ok(standard_pdf(p.standardize(x), p.alpha, p.beta)? / p.gamma)
}

/// Distribution function of the standardized law via the Gil-Pelaez formula
/// `F(z) = 1/2 + (1/pi) int_0^inf exp(-u^alpha) sin(z u + psi(u)) / u du`.
pub fn standard_cdf(z: f64, alpha: f64, beta: f64) -> Result<f64> {
    if z.abs() > ASYMPTOTIC_Z {
        let c = tail_constant(alpha);
        return Ok(if z > 0.0 {
            1.0 - c * (1.0 + beta) * z.powf(-alpha)
        } else {
            c * (1.0 - beta) * (-z).powf(-alpha)
        });
    }
    let g = |u: f64| (z * u + skew_phase(u, alpha, beta)).sin() / u;
    let bp = breakpoints(alpha, z.abs());
    let integral = if alpha < 1.0 && !near_one(alpha) {
        // u = v^(1/alpha) removes the u^(alpha-1) singularity at the origin.
        let vb: Vec<f64> = bp.iter().map(|u| u.powf(alpha)).collect();
        gauss_kronrod(
            |v: f64| {
                let u = v.powf(1.0 / alpha);
                (-v).exp() * (z * u + skew_phase(u, alpha, beta)).sin() / (alpha * v)
            },
            &vb,
            1e-10,
            50_000,
        )?
    } else {
        gauss_kronrod(|u: f64| (-u.powf(alpha)).exp() * g(u), &bp, 1e-10, 50_000)?
    };
    Ok((0.5 + integral / PI).clamp(0.0, 1.0))
}

pub fn stable_cdf(x: f64, p: &StableParams) -> Result<f64> {
    p.validate()?;
    standard_cdf(p.standardize(x), p.alpha, p.beta)
}

/// Distribution functions usable for binning probabilities.
pub trait Cdf {
    fn cdf(&self, x: f64) -> Result<f64>;
}

impl Cdf for StableParams {
    fn cdf(&self, x: f64) -> Result<f64> {
        stable_cdf(x, self)
    }
}
