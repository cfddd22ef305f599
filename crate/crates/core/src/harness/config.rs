use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::DEFAULT_DENSE_CAP;
use crate::error::{Error, Result};
use crate::kernel::HyperParams;
use crate::linalg::JitterPolicy;
use crate::predictor::PredictOptions;

/// Model and runtime settings, read from a TOML file.
///
/// `l_u`, `r`, `r_star` and `grid_margin` are in lengthscale-normalized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub sigma_se: f64,
    pub lengthscales: Vec<f64>,
    pub sigma_y: f64,
    /// Grid spacing.
    pub l_u: f64,
    /// Local prediction radius.
    pub r_star: f64,
    /// Training support radius; defaults to `2 * r_star`.
    #[serde(default)]
    pub r: Option<f64>,
    /// Grid extension beyond the data bounds; defaults to `r`.
    #[serde(default)]
    pub grid_margin: Option<f64>,
    /// Allow `r < 2 * r_star` (general truncated prior).
    #[serde(default)]
    pub general_prior: bool,
    /// Compensated summation during training.
    #[serde(default)]
    pub compensated: bool,
    #[serde(default)]
    pub jitter: JitterConfig,
    #[serde(default = "default_dense_cap")]
    pub dense_cap: usize,
    #[serde(default = "default_max_grid")]
    pub max_grid_size: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JitterConfig {
    pub initial: f64,
    pub max: f64,
    pub factor: f64,
}

impl Default for JitterConfig {
    fn default() -> Self {
        let p = JitterPolicy::default();
        JitterConfig { initial: p.initial, max: p.max, factor: p.factor }
    }
}

fn default_dense_cap() -> usize {
    DEFAULT_DENSE_CAP
}

fn default_max_grid() -> usize {
    50_000_000
}

fn default_workers() -> usize {
    1
}

impl Config {
    /// Minimal configuration with every optional field at its default.
    pub fn new(sigma_se: f64, lengthscales: Vec<f64>, sigma_y: f64, l_u: f64, r_star: f64) -> Self {
        Config {
            sigma_se,
            lengthscales,
            sigma_y,
            l_u,
            r_star,
            r: None,
            grid_margin: None,
            general_prior: false,
            compensated: false,
            jitter: JitterConfig::default(),
            dense_cap: default_dense_cap(),
            max_grid_size: default_max_grid(),
            workers: default_workers(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.hyper_params()?;
        if !(self.l_u.is_finite() && self.l_u > 0.0) {
            return Err(Error::Config(format!("l_u must be positive, got {}", self.l_u)));
        }
        if let Some(m) = self.grid_margin {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::Config(format!("grid_margin must be non-negative, got {m}")));
            }
        }
        let j = &self.jitter;
        if !(j.initial >= 0.0 && j.max >= j.initial && j.factor > 1.0) {
            return Err(Error::Config("jitter needs 0 <= initial <= max and factor > 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn support_radius(&self) -> f64 {
        self.r.unwrap_or(2.0 * self.r_star)
    }

    pub fn margin(&self) -> f64 {
        self.grid_margin.unwrap_or_else(|| self.support_radius())
    }

    pub fn hyper_params(&self) -> Result<HyperParams> {
        let r = self.support_radius();
        let hp = if self.general_prior {
            HyperParams::new_general(self.sigma_se, self.lengthscales.clone(), self.sigma_y, r, self.r_star)
        } else {
            HyperParams::new(self.sigma_se, self.lengthscales.clone(), self.sigma_y, r, self.r_star)
        };
        hp.map_err(|e| Error::Config(e.to_string()))
    }

    pub fn predict_options(&self) -> PredictOptions {
        PredictOptions {
            jitter: JitterPolicy { initial: self.jitter.initial, max: self.jitter.max, factor: self.jitter.factor },
        }
    }
}
