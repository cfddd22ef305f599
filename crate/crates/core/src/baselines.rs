//! Dense reference models used to verify the sparse path.
//!
//! Both are deliberately naive: explicit dense matrices and general LU
//! solves, no reuse of the trainer or predictor code.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::kernel::HyperParams;

pub const DEFAULT_DENSE_CAP: usize = 4000;

fn se(a: &[f64], b: &[f64], hp: &HyperParams) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    hp.signal_variance() * (-0.5 * sq).exp()
}

fn normalized<P: AsRef<[f64]>>(xs: &[P], hp: &HyperParams) -> Result<Vec<Vec<f64>>> {
    xs.iter().map(|x| hp.normalize(x.as_ref())).collect()
}

fn lu_checked(m: DMatrix<f64>) -> Result<LU<f64, Dyn, Dyn>> {
    let n = m.nrows();
    let lu = m.lu();
    if !lu.is_invertible() {
        return Err(Error::Numerical { size: n, condition: f64::INFINITY });
    }
    Ok(lu)
}

/// Exact GP regression on all training points.
#[derive(Debug, Clone)]
pub struct DenseGpModel {
    inputs: Vec<Vec<f64>>,
    hp: HyperParams,
    y_mean: f64,
    /// `(K + sigma_y^2 I)^-1 y`
    alpha: DVector<f64>,
    chol: nalgebra::Cholesky<f64, Dyn>,
}

impl DenseGpModel {
    /// `centered` are the targets with `y_mean` already subtracted.
    pub fn new<P: AsRef<[f64]>>(xs: &[P], centered: &[f64], y_mean: f64, hp: &HyperParams, cap: usize) -> Result<Self> {
        if xs.is_empty() || xs.len() != centered.len() {
            return Err(Error::InvalidArgument(format!("{} inputs, {} targets", xs.len(), centered.len())));
        }
        if xs.len() > cap {
            return Err(Error::DenseCap { what: "N", value: xs.len(), cap });
        }
        let inputs = normalized(xs, hp)?;
        let n = inputs.len();
        let mut k = DMatrix::from_fn(n, n, |i, j| se(&inputs[i], &inputs[j], hp));
        for i in 0..n {
            k[(i, i)] += hp.noise_variance();
        }
        let chol = k.clone().cholesky().ok_or(Error::Numerical { size: n, condition: f64::NAN })?;
        let alpha = chol.solve(&DVector::from_column_slice(centered));
        Ok(DenseGpModel { inputs, hp: hp.clone(), y_mean, alpha, chol })
    }

    /// Posterior mean (with `y_mean` added) and latent variance at `x`.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        let xn = self.hp.normalize(x)?;
        let ks = DVector::from_iterator(self.inputs.len(), self.inputs.iter().map(|u| se(u, &xn, &self.hp)));
        let mean = ks.dot(&self.alpha);
        let var = self.hp.signal_variance() - ks.dot(&self.chol.solve(&ks));
        Ok((mean + self.y_mean, var.max(0.0)))
    }
}

pub fn full_gp_predict(model: &DenseGpModel, x_star: &[f64]) -> Result<(f64, f64)> {
    model.predict(x_star)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtcBasis {
    /// Kernel cross-sections truncated at sup-norm radius `r`.
    Truncated,
    /// Full kernel cross-sections (plain grid inducing points).
    Untruncated,
}

/// DTC prediction with an explicit dense basis-function matrix.
#[derive(Debug, Clone)]
pub struct GlobalDtcModel {
    centers: Vec<Vec<f64>>,
    hp: HyperParams,
    basis: DtcBasis,
    y_mean: f64,
    iota: DVector<f64>,
    a_lu: LU<f64, Dyn, Dyn>,
    prior_lu: LU<f64, Dyn, Dyn>,
}

impl GlobalDtcModel {
    /// DTC over every center of `grid`.
    pub fn new<P: AsRef<[f64]>>(
        grid: &UniformGrid,
        hp: &HyperParams,
        xs: &[P],
        centered: &[f64],
        y_mean: f64,
        basis: DtcBasis,
        cap: usize,
    ) -> Result<Self> {
        let all: Vec<usize> = (0..grid.len()).collect();
        Self::on_subset(grid, hp, &all, xs, centered, y_mean, basis, cap)
    }

    /// DTC restricted to the basis functions listed in `subset`, trained on
    /// every measurement.
    #[allow(clippy::too_many_arguments)]
    pub fn on_subset<P: AsRef<[f64]>>(
        grid: &UniformGrid,
        hp: &HyperParams,
        subset: &[usize],
        xs: &[P],
        centered: &[f64],
        y_mean: f64,
        basis: DtcBasis,
        cap: usize,
    ) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InvalidArgument("DTC needs at least one basis function".into()));
        }
        if subset.len() > cap {
            return Err(Error::DenseCap { what: "m", value: subset.len(), cap });
        }
        if xs.len() != centered.len() {
            return Err(Error::InvalidArgument(format!("{} inputs, {} targets", xs.len(), centered.len())));
        }
        let centers: Vec<Vec<f64>> = subset.iter().map(|&j| grid.center_of(j)).collect::<Result<_>>()?;
        let inputs = normalized(xs, hp)?;
        let m = centers.len();
        let phi_at = |c: &[f64], x: &[f64]| basis_value(c, x, hp, basis);

        let phi = DMatrix::from_fn(m, inputs.len(), |i, t| phi_at(&centers[i], &inputs[t]));
        let iota = &phi * DVector::from_column_slice(centered);
        let imat = &phi * phi.transpose();

        let k = DMatrix::from_fn(m, m, |i, j| se(&centers[i], &centers[j], hp));
        let phi_u = DMatrix::from_fn(m, m, |i, j| phi_at(&centers[i], &centers[j]));
        // prior exact at the centers: P^-1 = Phi_u K^-1 Phi_u^T, which is K itself
        // when no pair of centers is truncated
        let prior_prec = if phi_u == k {
            k
        } else {
            let k_inv = lu_checked(k)?.try_inverse().ok_or(Error::Numerical { size: m, condition: f64::INFINITY })?;
            &phi_u * k_inv * phi_u.transpose()
        };
        let a = imat + &prior_prec * hp.noise_variance();
        Ok(GlobalDtcModel {
            centers,
            hp: hp.clone(),
            basis,
            y_mean,
            iota,
            a_lu: lu_checked(a)?,
            prior_lu: lu_checked(prior_prec)?,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        let xn = self.hp.normalize(x)?;
        let phi = DVector::from_iterator(
            self.centers.len(),
            self.centers.iter().map(|c| basis_value(c, &xn, &self.hp, self.basis)),
        );
        let noise = self.hp.noise_variance();
        let solve = |lu: &LU<f64, Dyn, Dyn>, b: &DVector<f64>| {
            lu.solve(b).ok_or(Error::Numerical { size: b.len(), condition: f64::INFINITY })
        };
        let mean = phi.dot(&solve(&self.a_lu, &self.iota)?);
        let var = noise * phi.dot(&solve(&self.a_lu, &phi)?) + self.hp.signal_variance()
            - phi.dot(&solve(&self.prior_lu, &phi)?);
        Ok((mean + self.y_mean, var.max(0.0)))
    }
}

fn basis_value(center: &[f64], x: &[f64], hp: &HyperParams, basis: DtcBasis) -> f64 {
    let inside = center.iter().zip(x).all(|(c, v)| (c - v).abs() <= hp.r());
    match basis {
        DtcBasis::Truncated if !inside => 0.0,
        _ => se(center, x, hp),
    }
}

pub fn dtc_predict(model: &GlobalDtcModel, x_star: &[f64]) -> Result<(f64, f64)> {
    model.predict(x_star)
}
