use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

/// Diagonal jitter schedule for SPD factorizations, relative to `sigma_se^2`.
///
/// The plain matrix is tried first; on failure `initial * scale` is added to
/// the diagonal and multiplied by `factor` until `max * scale` has been tried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterPolicy {
    pub initial: f64,
    pub max: f64,
    pub factor: f64,
}

impl Default for JitterPolicy {
    fn default() -> Self {
        JitterPolicy { initial: 1e-9, max: 1e-3, factor: 10.0 }
    }
}

impl JitterPolicy {
    /// No jitter at all: fail on the first factorization error.
    pub fn none() -> Self {
        JitterPolicy { initial: 0.0, max: 0.0, factor: 10.0 }
    }
}

pub(crate) struct Factor {
    pub chol: Cholesky<f64, Dyn>,
    /// Absolute jitter added to the diagonal (0 when none was needed).
    pub jitter: f64,
}

pub(crate) fn cholesky_jittered(a: &DMatrix<f64>, policy: &JitterPolicy, scale: f64) -> Result<Factor> {
    if let Some(chol) = Cholesky::new(a.clone()) {
        return Ok(Factor { chol, jitter: 0.0 });
    }
    let mut rel = policy.initial;
    while rel > 0.0 && rel <= policy.max * (1.0 + 1e-12) {
        let jitter = rel * scale;
        let mut b = a.clone();
        for i in 0..b.nrows() {
            b[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(b) {
            return Ok(Factor { chol, jitter });
        }
        rel *= policy.factor;
    }
    Err(Error::Numerical { size: a.nrows(), condition: condition_estimate(a) })
}

/// Ratio of largest to smallest eigenvalue magnitude. Only used on the error path.
pub(crate) fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return f64::NAN;
    }
    let eig = a.clone().symmetric_eigenvalues();
    let hi = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lo = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
