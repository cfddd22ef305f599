//! Prediction from a local subset of basis functions.
//!
//! For a query point `x*` the subset `S* = S(x*, r_star)` is gathered from
//! the trained state. The entries of the information vector and matrix that
//! belong to `S*` are exactly the information of a model built only on those
//! basis functions, so solving the `|S*|`-dimensional system gives the
//! sparse-GP prediction of that reduced model from all measurements.
//!
//! With `A = I* + sigma_y^2 P*^-1`:
//!
//! ```text
//! mean     = phi^T A^-1 iota*
//! variance = sigma_y^2 phi^T A^-1 phi + k(x*, x*) - phi^T P* phi
//! ```
//!
//! The variance is evaluated as `k(x*, x*) - (P* phi)^T I* (A^-1 phi)`,
//! which is the same quantity (`P* - sigma_y^2 A^-1 = P* I* A^-1`) without
//! subtracting two large terms. In particular it is exactly `sigma_se^2`
//! wherever `I*` is zero. The basis weights themselves are never formed.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::kernel::{basis_normalized, se_normalized, HyperParams};
use crate::linalg::{cholesky_jittered, JitterPolicy};
use crate::trainer::InformationView;

/// Dense system for one query point.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    /// Ascending grid indices of `S*`.
    pub subset: Vec<usize>,
    pub iota_sub: DVector<f64>,
    pub imat_sub: DMatrix<f64>,
    /// Prior precision `P*^-1` of the subset's basis weights.
    pub prior_prec: DMatrix<f64>,
    /// Basis functions of the subset evaluated at the query point.
    pub phi_star: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionResult {
    /// Posterior mean with the dataset mean added back.
    pub mean: f64,
    /// Marginal posterior variance of the latent function.
    pub variance: f64,
    pub subset_size: usize,
    /// True when rounding produced a negative variance that was clamped to 0.
    pub clamped: bool,
    /// Largest absolute diagonal jitter used by either factorization.
    pub jitter: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PredictOptions {
    pub jitter: JitterPolicy,
}

/// Prior precision of the basis weights of `subset` (ascending grid indices).
///
/// When `r >= 2 r_star` no pair of centers in a local subset is separated by
/// more than `r`, the basis matrix at the centers is the kernel matrix, and
/// the precision reduces to `K(u, u)`. Otherwise it is `Phi_u K^-1 Phi_u^T`
/// with `Phi_u` the truncated basis evaluated at the centers, which makes the
/// prior exact at the centers.
pub fn prior_precision(subset: &[usize], grid: &UniformGrid, hp: &HyperParams) -> Result<DMatrix<f64>> {
    prior_precision_with(subset, grid, hp, &JitterPolicy::default())
}

pub fn prior_precision_with(
    subset: &[usize],
    grid: &UniformGrid,
    hp: &HyperParams,
    jitter: &JitterPolicy,
) -> Result<DMatrix<f64>> {
    if subset.is_empty() {
        return Err(Error::NoLocalBasis);
    }
    let n = subset.len();
    let d = grid.dim();
    let mut centers = vec![0.0; n * d];
    for (a, &j) in subset.iter().enumerate() {
        grid.center_into(j, &mut centers[a * d..(a + 1) * d]);
    }
    let u = |a: usize| &centers[a * d..(a + 1) * d];
    let s2 = hp.signal_variance();
    let mut k = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = se_normalized(u(a), u(b), s2);
            k[(a, b)] = v;
            k[(b, a)] = v;
        }
    }
    if hp.untruncated_prior() {
        return Ok(k);
    }

    let phi_u = DMatrix::from_fn(n, n, |a, b| basis_normalized(u(a), u(b), hp));
    if phi_u == k {
        return Ok(k);
    }
    let lu = phi_u.clone().lu();
    let diag = lu.u().diagonal();
    let hi = diag.amax();
    let lo = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(lo > 1e-13 * hi) {
        return Err(Error::Conditioning(format!(
            "truncated basis matrix of a {n}-function subset is singular (pivot ratio {:.3e})",
            lo / hi
        )));
    }
    let kf = cholesky_jittered(&k, jitter, s2)?;
    let x = kf
        .chol
        .l()
        .solve_lower_triangular(&phi_u.transpose())
        .ok_or_else(|| Error::Conditioning("kernel factor is singular".into()))?;
    let p = x.transpose() * x;
    Ok((&p + p.transpose()) * 0.5)
}

/// Gathers the local system for `x_star` (raw coordinates).
pub fn extract_local<V: InformationView + ?Sized>(view: &V, x_star: &[f64]) -> Result<LocalSystem> {
    extract_local_with(view, x_star, &PredictOptions::default())
}

fn extract_local_with<V: InformationView + ?Sized>(
    view: &V,
    x_star: &[f64],
    opts: &PredictOptions,
) -> Result<LocalSystem> {
    let hp = view.hyper();
    let grid = view.grid();
    let xn = hp.normalize(x_star)?;
    let subset = grid.support_set(&xn, hp.r_star());
    if subset.is_empty() {
        return Err(Error::NoLocalBasis);
    }
    let iota_sub = view.gather_iota(&subset);
    let mut imat_sub = DMatrix::zeros(0, 0);
    view.gather_imat(&subset, &mut imat_sub);
    let prior_prec = prior_precision_with(&subset, grid, hp, &opts.jitter)?;
    let mut center = vec![0.0; grid.dim()];
    let phi_star = DVector::from_iterator(
        subset.len(),
        subset.iter().map(|&j| {
            grid.center_into(j, &mut center);
            basis_normalized(&center, &xn, hp)
        }),
    );
    Ok(LocalSystem { subset, iota_sub, imat_sub, prior_prec, phi_star })
}

/// Solves a local system. `y_mean` is added to the returned mean.
pub fn solve_local(sys: &LocalSystem, hp: &HyperParams, y_mean: f64, opts: &PredictOptions) -> Result<PredictionResult> {
    let n = sys.subset.len();
    let s2 = hp.signal_variance();
    let noise = hp.noise_variance();

    let prior = cholesky_jittered(&sys.prior_prec, &opts.jitter, s2)?;
    let mut a = &sys.imat_sub + &sys.prior_prec * noise;
    if prior.jitter > 0.0 {
        for i in 0..n {
            a[(i, i)] += noise * prior.jitter;
        }
    }
    let af = cholesky_jittered(&a, &opts.jitter, s2)?;

    let mean = sys.phi_star.dot(&af.chol.solve(&sys.iota_sub));

    // A (as factorized) minus sigma_y^2 P*^-1 (as factorized) is I* plus the A jitter
    let a_phi = af.chol.solve(&sys.phi_star);
    let p_phi = prior.chol.solve(&sys.phi_star);
    let mut info_a_phi = &sys.imat_sub * &a_phi;
    if af.jitter > 0.0 {
        info_a_phi.axpy(af.jitter, &a_phi, 1.0);
    }
    let raw = s2 - p_phi.dot(&info_a_phi);
    let clamped = raw < 0.0;

    Ok(PredictionResult {
        mean: mean + y_mean,
        variance: if clamped { 0.0 } else { raw },
        subset_size: n,
        clamped,
        jitter: prior.jitter.max(af.jitter),
    })
}

/// Local prediction at `x_star` (raw coordinates) with default options.
pub fn predict<V: InformationView + ?Sized>(view: &V, x_star: &[f64]) -> Result<PredictionResult> {
    predict_with(view, x_star, &PredictOptions::default())
}

pub fn predict_with<V: InformationView + ?Sized>(
    view: &V,
    x_star: &[f64],
    opts: &PredictOptions,
) -> Result<PredictionResult> {
    let sys = extract_local_with(view, x_star, opts)?;
    solve_local(&sys, view.hyper(), view.y_mean(), opts)
}

/// Predicts every point, in input order, on the current rayon pool.
pub fn predict_batch<V, P>(view: &V, points: &[P], opts: &PredictOptions) -> Vec<Result<PredictionResult>>
where
    V: InformationView + ?Sized,
    P: AsRef<[f64]> + Sync,
{
    points.par_iter().map(|p| predict_with(view, p.as_ref(), opts)).collect()
}
