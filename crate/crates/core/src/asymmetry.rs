//! Structural asymmetry `Lambda = |X - X^T| / (2 |Y|)` of square matrices,
//! where `Y` is `X` with its diagonal removed and `|.|` the Frobenius norm.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_square(x: &DMatrix<f64>) -> Result<usize> {
    if !x.is_square() {
        return Err(Error::Dimension(format!(
            "asymmetry of a {}x{} matrix",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(x.nrows())
}

/// Lambda of the diagonal block starting at `n` with size `k`; `None` when
/// the block's off-diagonal part is zero.
fn block_lambda(x: &DMatrix<f64>, n: usize, k: usize) -> Option<f64> {
    let (mut anti, mut off) = (0.0, 0.0);
    for i in n..n + k {
        for j in i + 1..n + k {
            let (a, b) = (x[(i, j)], x[(j, i)]);
            anti += (a - b) * (a - b);
            off += a * a + b * b;
        }
    }
    // |X - X^T|^2 = 2 anti, so Lambda = sqrt(2 anti / (4 off)).
    (off > 0.0).then(|| (anti / (2.0 * off)).sqrt())
}

pub fn lambda(x: &DMatrix<f64>) -> Result<f64> {
    let n = check_square(x)?;
    if n < 2 {
        return Err(Error::Precondition("asymmetry needs N >= 2".into()));
    }
    block_lambda(x, 0, n)
        .ok_or_else(|| Error::Numeric("asymmetry undefined: off-diagonal part is zero".into()))
}

/// Mean Lambda over the `N - k + 1` diagonal blocks of size `k`, skipping
/// blocks whose off-diagonal part vanishes.
pub fn avg_lambda_k(x: &DMatrix<f64>, k: usize) -> Result<f64> {
    let n = check_square(x)?;
    if k < 2 || k > n {
        return Err(Error::Precondition(format!(
            "block size {k} outside 2..={n}"
        )));
    }
    let (sum, count) = (0..=n - k)
        .filter_map(|s| block_lambda(x, s, k))
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        return Err(Error::Numeric(format!(
            "asymmetry undefined for every {k}x{k} block"
        )));
    }
    Ok(sum / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymmetryOptions {
    /// Count the `k = 1` term (defined as 0) in the overall average.
    pub include_k1: bool,
}

impl Default for AsymmetryOptions {
    fn default() -> Self {
        AsymmetryOptions { include_k1: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryReport {
    pub label: String,
    /// `per_k[k - 1]` is the block average for size `k`; `per_k[0] = 0`.
    pub per_k: Vec<f64>,
    pub overall: f64,
    /// Missing cells replaced by zero before the computation.
    pub imputed: usize,
}

pub fn asymmetry_curve(x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = check_square(x)?;
    if n < 2 {
        return Err(Error::Precondition("asymmetry needs N >= 2".into()));
    }
    let mut curve = vec![0.0];
    curve.extend(
        (2..=n)
            .into_par_iter()
            .map(|k| avg_lambda_k(x, k))
            .collect::<Result<Vec<_>>>()?,
    );
    Ok(curve)
}

/// Mean of the block averages over `k = 1..N` with the `k = 1` term 0.
pub fn overall_asymmetry(x: &DMatrix<f64>) -> Result<f64> {
    Ok(overall_from_curve(
        &asymmetry_curve(x)?,
        AsymmetryOptions::default(),
    ))
}

fn overall_from_curve(curve: &[f64], opts: AsymmetryOptions) -> f64 {
    let used = if opts.include_k1 { curve } else { &curve[1..] };
    used.iter().sum::<f64>() / used.len() as f64
}

pub fn asymmetry_report(
    label: &str,
    x: &DMatrix<f64>,
    imputed: usize,
    opts: AsymmetryOptions,
) -> Result<AsymmetryReport> {
    let per_k = asymmetry_curve(x)?;
    Ok(AsymmetryReport {
        label: label.to_string(),
        overall: overall_from_curve(&per_k, opts),
        per_k,
        imputed,
    })
}

impl AsymmetryReport {
    /// Rows `k,avg_lambda` and a final `overall` row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,avg_lambda\n");
        for (k, v) in self.per_k.iter().enumerate() {
            s.push_str(&format!("{},{v}\n", k + 1));
        }
        s.push_str(&format!("overall,{}\n", self.overall));
        s
    }
}
