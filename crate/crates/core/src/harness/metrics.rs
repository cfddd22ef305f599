//! Standardized error metrics. The reference predictor is the training mean
//! (and, for MSLL, a Gaussian with the training mean and variance).

use crate::error::{Error, Result};

/// Mean and variance of the training targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingStats {
    pub mean: f64,
    pub variance: f64,
}

impl TrainingStats {
    pub fn from_targets(targets: &[f64]) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::UndefinedMetric("no training targets"));
        }
        let n = targets.len() as f64;
        let mean = targets.iter().sum::<f64>() / n;
        let variance = targets.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n;
        Ok(TrainingStats { mean, variance })
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidArgument(format!("length mismatch: {a} vs {b}")));
    }
    if a == 0 {
        return Err(Error::UndefinedMetric("no test points"));
    }
    Ok(())
}

/// MAE of `pred` divided by the MAE of always predicting `train_mean`.
pub fn smae(pred: &[f64], target: &[f64], train_mean: f64) -> Result<f64> {
    check_lengths(pred.len(), target.len())?;
    let num: f64 = pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum();
    let den: f64 = target.iter().map(|t| (train_mean - t).abs()).sum();
    if den == 0.0 {
        return Err(Error::UndefinedMetric("SMAE: targets all equal the training mean"));
    }
    Ok(num / den)
}

/// MSE of `pred` divided by the mean squared deviation of the targets about `train_mean`.
pub fn smse(pred: &[f64], target: &[f64], train_mean: f64) -> Result<f64> {
    check_lengths(pred.len(), target.len())?;
    let num: f64 = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
    let den: f64 = target.iter().map(|t| (t - train_mean) * (t - train_mean)).sum();
    if den == 0.0 {
        return Err(Error::UndefinedMetric("SMSE: targets all equal the training mean"));
    }
    Ok(num / den)
}

fn nll(mu: f64, var: f64, y: f64) -> f64 {
    0.5 * (2.0 * std::f64::consts::PI * var).ln() + (y - mu) * (y - mu) / (2.0 * var)
}

/// Mean negative log density under N(pred, var) minus that under the training Gaussian.
/// `var` must be the predictive variance of the targets, noise included.
pub fn msll(pred: &[f64], var: &[f64], target: &[f64], train: TrainingStats) -> Result<f64> {
    check_lengths(pred.len(), target.len())?;
    check_lengths(var.len(), target.len())?;
    if !(train.variance > 0.0) {
        return Err(Error::UndefinedMetric("MSLL: training targets have zero variance"));
    }
    if var.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::UndefinedMetric("MSLL: non-positive predictive variance"));
    }
    let n = target.len() as f64;
    let total: f64 = (0..target.len())
        .map(|i| nll(pred[i], var[i], target[i]) - nll(train.mean, train.variance, target[i]))
        .sum();
    Ok(total / n)
}
