//! Squared-exponential ARD kernel and its truncated cross-sections.
//!
//! Inputs are compared in lengthscale-normalized coordinates `x_k / l_k`.
//! The grid lives in that space too, so a single scalar support radius
//! applies to every axis of an anisotropic field.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;

/// Kernel, noise and radius settings.
///
/// `r` (training support radius) and `r_star` (local prediction radius) are
/// measured in normalized coordinates, i.e. in multiples of the lengthscale
/// along each axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    sigma_se: f64,
    lengthscales: Vec<f64>,
    sigma_y: f64,
    r: f64,
    r_star: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

impl HyperParams {
    /// Validated constructor for the default configuration, which requires
    /// `r >= 2 * r_star` so that the local prior needs no truncation.
    pub fn new(sigma_se: f64, lengthscales: Vec<f64>, sigma_y: f64, r: f64, r_star: f64) -> Result<Self> {
        let hp = Self::new_general(sigma_se, lengthscales, sigma_y, r, r_star)?;
        if !hp.untruncated_prior() {
            return Err(Error::InvalidArgument(format!(
                "r ({r}) must be at least 2 * r_star ({}); use new_general to allow it",
                2.0 * r_star
            )));
        }
        Ok(hp)
    }

    /// Like [`HyperParams::new`] but accepts `r < 2 * r_star`, which routes
    /// predictions through the general (truncated) prior construction.
    pub fn new_general(sigma_se: f64, lengthscales: Vec<f64>, sigma_y: f64, r: f64, r_star: f64) -> Result<Self> {
        positive("sigma_se", sigma_se)?;
        positive("sigma_y", sigma_y)?;
        positive("r", r)?;
        positive("r_star", r_star)?;
        if lengthscales.is_empty() {
            return Err(Error::InvalidArgument("at least one lengthscale is required".into()));
        }
        for (k, &l) in lengthscales.iter().enumerate() {
            positive(&format!("lengthscale[{k}]"), l)?;
        }
        Ok(HyperParams { sigma_se, lengthscales, sigma_y, r, r_star })
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn sigma_se(&self) -> f64 {
        self.sigma_se
    }

    /// Prior variance `sigma_se^2`, the kernel value at zero distance.
    pub fn signal_variance(&self) -> f64 {
        self.sigma_se * self.sigma_se
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y
    }

    pub fn noise_variance(&self) -> f64 {
        self.sigma_y * self.sigma_y
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    /// True when `r >= 2 r_star`: no two centers of a local subset are
    /// further apart than `r`, so the local prior precision is the plain
    /// kernel matrix of the centers.
    pub fn untruncated_prior(&self) -> bool {
        self.r >= 2.0 * self.r_star
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "point has dimension {}, hyperparameters have {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Maps a point into lengthscale-normalized coordinates.
    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(x.iter().zip(&self.lengthscales).map(|(v, l)| v / l).collect())
    }

    pub(crate) fn normalize_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(x.iter().zip(&self.lengthscales).map(|(v, l)| v / l));
    }
}

/// Kernel value between two points already in normalized coordinates.
#[inline]
pub(crate) fn se_normalized(a: &[f64], b: &[f64], signal_variance: f64) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    signal_variance * (-0.5 * sq).exp()
}

#[inline]
pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (p, q)| f64::max(m, (p - q).abs()))
}

/// `sigma_se^2 * exp(-1/2 * sum_k ((x_k - x2_k) / l_k)^2)`.
pub fn kernel_eval(x: &[f64], x2: &[f64], hp: &HyperParams) -> Result<f64> {
    hp.check_dim(x)?;
    hp.check_dim(x2)?;
    let sq: f64 = x
        .iter()
        .zip(x2)
        .zip(hp.lengthscales())
        .map(|((a, b), l)| {
            let t = a / l - b / l;
            t * t
        })
        .sum();
    Ok(hp.signal_variance() * (-0.5 * sq).exp())
}

/// Basis function `j` evaluated at the raw point `x`: the kernel between the
/// grid center and `x` inside the closed sup-norm ball of radius `r`, and
/// exactly zero outside it.
pub fn basis_eval(j: usize, x: &[f64], grid: &UniformGrid, hp: &HyperParams) -> Result<f64> {
    if grid.dim() != hp.dim() {
        return Err(Error::InvalidArgument("grid and hyperparameter dimensions differ".into()));
    }
    let xn = hp.normalize(x)?;
    let u = grid.center_of(j)?;
    Ok(basis_normalized(&u, &xn, hp))
}

#[inline]
pub(crate) fn basis_normalized(center: &[f64], xn: &[f64], hp: &HyperParams) -> f64 {
    if sup_distance(center, xn) <= hp.r() {
        se_normalized(center, xn, hp.signal_variance())
    } else {
        0.0
    }
}

/// Dense cross-covariance matrix between two point lists (raw coordinates).
pub fn kernel_matrix<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    points_a: &[P],
    points_b: &[Q],
    hp: &HyperParams,
) -> Result<DMatrix<f64>> {
    if points_a.is_empty() || points_b.is_empty() {
        return Err(Error::InvalidArgument("kernel_matrix needs nonempty point lists".into()));
    }
    let a: Vec<Vec<f64>> = points_a.iter().map(|p| hp.normalize(p.as_ref())).collect::<Result<_>>()?;
    let b: Vec<Vec<f64>> = points_b.iter().map(|p| hp.normalize(p.as_ref())).collect::<Result<_>>()?;
    let s2 = hp.signal_variance();
    Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| se_normalized(&a[i], &b[j], s2)))
}
