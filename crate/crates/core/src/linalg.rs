//! Small direct solvers used by the step systems.

use crate::error::{Error, Result};

/// Solves a symmetric positive-definite tridiagonal system.
///
/// `off[k]` couples unknowns `k` and `k + 1`; `off.len() == diag.len() - 1`.
pub fn solve_spd_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    debug_assert_eq!(off.len(), n.saturating_sub(1));
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut pivot = vec![0.0; n];
    let mut y = vec![0.0; n];
    pivot[0] = diag[0];
    y[0] = rhs[0];
    for k in 1..n {
        if !(pivot[k - 1] > 0.0) {
            return Err(Error::Singular(format!(
                "non-positive pivot at row {}",
                k - 1
            )));
        }
        let l = off[k - 1] / pivot[k - 1];
        pivot[k] = diag[k] - l * off[k - 1];
        y[k] = rhs[k] - l * y[k - 1];
    }
    if !(pivot[n - 1] > 0.0) {
        return Err(Error::Singular(format!(
            "non-positive pivot at row {}",
            n - 1
        )));
    }
    let mut x = vec![0.0; n];
    x[n - 1] = y[n - 1] / pivot[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = (y[k] - off[k] * x[k + 1]) / pivot[k];
    }
    Ok(x)
}

pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
