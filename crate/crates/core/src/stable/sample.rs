//! Chambers-Mallows-Stuck sampling in the location-continuous form used by
//! [`super::StableParams`].
//!
//! The transform yields `Z1` with characteristic exponent
//! `-|k|^alpha (1 - i beta sgn(k) tan(pi alpha / 2))`; shifting by
//! `-beta tan(pi alpha / 2)` gives the standardized law here. At `alpha = 1`
//! both forms coincide.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use super::density::{near_one, StableParams};

/// One draw of the standardized law (`gamma = 1`, `mu0 = 0`).
pub fn sample_standard<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    let w = -(1.0 - rng.random::<f64>()).ln();
    if near_one(alpha) {
        let s = FRAC_PI_2 + beta * v;
        return (2.0 / PI) * (s * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / s).ln());
    }
    let t = beta * (PI * alpha / 2.0).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(1.0 / (2.0 * alpha));
    let z1 = s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
        * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha);
    z1 - t
}

pub fn sample_stable<R: Rng + ?Sized>(p: &StableParams, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| p.mu0 + p.gamma * sample_standard(p.alpha, p.beta, rng))
        .collect()
}
