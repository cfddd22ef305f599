use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use super::metrics::{msll, smae, smse, TrainingStats};
use super::pipeline::predict_or_prior;
use crate::error::{Error, Result};
use crate::predictor::{PredictOptions, PredictionResult};
use crate::trainer::InformationView;

/// Describes the metric definitions in every report.
pub const METRIC_CONVENTION: &str = "SMAE = MAE / MAE(training mean); SMSE = MSE / mean((y - training mean)^2); \
MSLL = mean NLL under N(mean, variance + sigma_y^2) minus mean NLL under N(training mean, training variance)";

/// Mean and sample standard deviation over repetitions, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeStats {
    pub mean: f64,
    /// Zero for a single repetition.
    pub std: f64,
    pub repetitions: usize,
}

impl TimeStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return TimeStats { mean: 0.0, std: 0.0, repetitions: 0 };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        TimeStats { mean, std, repetitions: n }
    }
}

/// Distribution of single-prediction wall times, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatencyStats {
    pub median: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

impl LatencyStats {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut s = samples.to_vec();
        s.sort_by(f64::total_cmp);
        let q = |p: f64| s[((s.len() - 1) as f64 * p).round() as usize];
        let median = if s.len() % 2 == 1 { s[s.len() / 2] } else { 0.5 * (s[s.len() / 2 - 1] + s[s.len() / 2]) };
        Some(LatencyStats { median, p90: q(0.9), p99: q(0.99), max: s[s.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n_test: usize,
    pub smae: Option<f64>,
    pub smse: Option<f64>,
    pub msll: Option<f64>,
    pub metric_convention: &'static str,
    pub train_time: Option<TimeStats>,
    /// Per-prediction time, averaged within each repetition.
    pub predict_time: Option<TimeStats>,
    pub latency: Option<LatencyStats>,
    /// `|S*|` -> number of test points.
    pub subset_histogram: BTreeMap<usize, usize>,
    pub clamped: usize,
    pub out_of_grid: usize,
    pub warnings: Vec<String>,
}

impl EvalReport {
    /// Report with counts and warnings, no metrics or timings.
    pub fn from_predictions(results: &[PredictionResult]) -> Self {
        let mut hist = BTreeMap::new();
        let (mut clamped, mut outside) = (0, 0);
        for r in results {
            *hist.entry(r.subset_size).or_insert(0) += 1;
            clamped += r.clamped as usize;
            outside += (r.subset_size == 0) as usize;
        }
        let mut warnings = Vec::new();
        if clamped > 0 {
            warnings.push(format!("{clamped} predicted variances were negative from rounding and clamped to 0"));
        }
        if outside > 0 {
            warnings.push(format!("{outside} points had no basis function in range; prior returned"));
        }
        EvalReport {
            n_test: results.len(),
            smae: None,
            smse: None,
            msll: None,
            metric_convention: METRIC_CONVENTION,
            train_time: None,
            predict_time: None,
            latency: None,
            subset_histogram: hist,
            clamped,
            out_of_grid: outside,
            warnings,
        }
    }

    /// Fills the metrics. An undefined metric is left empty with a warning.
    pub fn score(
        &mut self,
        results: &[PredictionResult],
        targets: &[f64],
        train: TrainingStats,
        noise_variance: f64,
    ) -> Result<()> {
        let mean: Vec<f64> = results.iter().map(|r| r.mean).collect();
        let var: Vec<f64> = results.iter().map(|r| r.variance + noise_variance).collect();
        let mut keep = |v: Result<f64>| -> Result<Option<f64>> {
            match v {
                Ok(x) => Ok(Some(x)),
                Err(Error::UndefinedMetric(why)) => {
                    self.warnings.push(why.to_string());
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        };
        let a = keep(smae(&mean, targets, train.mean))?;
        let b = keep(smse(&mean, targets, train.mean))?;
        let c = keep(msll(&mean, &var, targets, train))?;
        self.smae = a;
        self.smse = b;
        self.msll = c;
        Ok(())
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.6}"));
        writeln!(f, "test points: {}", self.n_test)?;
        if self.smae.is_some() || self.smse.is_some() || self.msll.is_some() {
            writeln!(f, "SMAE: {}", opt(self.smae))?;
            writeln!(f, "SMSE: {}", opt(self.smse))?;
            writeln!(f, "MSLL: {}", opt(self.msll))?;
            writeln!(f, "metrics: {}", self.metric_convention)?;
        }
        if let Some(t) = self.train_time {
            writeln!(f, "training time: {:.6} s +- {:.6} s ({} reps)", t.mean, t.std, t.repetitions)?;
        }
        if let Some(t) = self.predict_time {
            writeln!(f, "prediction time: {:.3e} s +- {:.3e} s per point ({} reps)", t.mean, t.std, t.repetitions)?;
        }
        if let Some(l) = self.latency {
            writeln!(f, "latency: median {:.3e} s, p90 {:.3e} s, p99 {:.3e} s, max {:.3e} s", l.median, l.p90, l.p99, l.max)?;
        }
        let hist: Vec<String> = self.subset_histogram.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        writeln!(f, "subset sizes: {}", hist.join(" "))?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Times every prediction individually, single-threaded, `repetitions` times.
pub fn benchmark<V, P>(view: &V, points: &[P], repetitions: usize, opts: &PredictOptions) -> Result<EvalReport>
where
    V: InformationView + ?Sized,
    P: AsRef<[f64]>,
{
    let reps = repetitions.max(1);
    let mut latencies = Vec::with_capacity(points.len() * reps);
    let mut per_rep = Vec::with_capacity(reps);
    let mut results = Vec::with_capacity(points.len());
    for rep in 0..reps {
        let start = latencies.len();
        for p in points {
            let t0 = Instant::now();
            let res = predict_or_prior(view, p.as_ref(), opts)?;
            latencies.push(t0.elapsed().as_secs_f64());
            if rep == 0 {
                results.push(res);
            }
        }
        let spent: f64 = latencies[start..].iter().sum();
        per_rep.push(if points.is_empty() { 0.0 } else { spent / points.len() as f64 });
    }
    let mut report = EvalReport::from_predictions(&results);
    report.predict_time = Some(TimeStats::from_samples(&per_rep));
    report.latency = LatencyStats::from_samples(&latencies);
    Ok(report)
}
