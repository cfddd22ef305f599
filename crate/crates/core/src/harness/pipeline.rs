//! End-to-end training and prediction used by the command-line tool.

use std::path::Path;

use rayon::prelude::*;

use super::config::Config;
use super::dataset::{CsvRows, Dataset, Schema};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::kernel::HyperParams;
use crate::predictor::{predict_with, PredictOptions, PredictionResult};
use crate::trainer::{InformationState, InformationView};

/// Rows buffered before a sharded training step.
const CHUNK: usize = 1 << 16;

/// Grid over raw-coordinate data bounds, normalized by the lengthscales and
/// padded by the configured margin. Axes with no spread get one spacing of width.
pub fn grid_for(bounds: &[(f64, f64)], cfg: &Config) -> Result<UniformGrid> {
    if bounds.len() != cfg.lengthscales.len() {
        return Err(Error::Config(format!(
            "data has {} input columns but {} lengthscales are configured",
            bounds.len(),
            cfg.lengthscales.len()
        )));
    }
    let norm: Vec<(f64, f64)> = bounds
        .iter()
        .zip(&cfg.lengthscales)
        .map(|(&(lo, hi), &l)| {
            let (a, b) = (lo / l, hi / l);
            if b > a { (a, b) } else { (a, a + cfg.l_u) }
        })
        .collect();
    UniformGrid::covering(&norm, cfg.l_u, cfg.margin(), cfg.max_grid_size)
}

fn empty_state(grid: UniformGrid, hp: HyperParams, y_mean: f64, cfg: &Config) -> InformationState {
    if cfg.compensated {
        InformationState::with_compensation(grid, hp, y_mean)
    } else {
        InformationState::new(grid, hp, y_mean)
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} worker threads: {e}")))
}

/// Feeds centered rows in order. With several workers each chunk is split
/// into contiguous shards, one per worker state; states are merged at the end.
struct ShardedTrainer {
    states: Vec<InformationState>,
    pool: Option<rayon::ThreadPool>,
    xs: Vec<f64>,
    ys: Vec<f64>,
    lines: Vec<u64>,
    dim: usize,
}

impl ShardedTrainer {
    fn new(grid: UniformGrid, hp: HyperParams, y_mean: f64, cfg: &Config) -> Result<Self> {
        let dim = grid.dim();
        let states = (0..cfg.workers).map(|_| empty_state(grid.clone(), hp.clone(), y_mean, cfg)).collect();
        let pool = if cfg.workers > 1 { Some(pool(cfg.workers)?) } else { None };
        Ok(ShardedTrainer { states, pool, xs: Vec::new(), ys: Vec::new(), lines: Vec::new(), dim })
    }

    fn push(&mut self, x: &[f64], y: f64, line: u64) -> Result<()> {
        if self.pool.is_none() {
            return self.states[0].update(x, y).map_err(|e| at_line(e, line));
        }
        self.xs.extend_from_slice(x);
        self.ys.push(y);
        self.lines.push(line);
        if self.ys.len() >= CHUNK {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let n = self.ys.len();
        if n == 0 {
            return Ok(());
        }
        let w = self.states.len();
        let per = n.div_ceil(w);
        let (xs, ys, lines, d) = (&self.xs, &self.ys, &self.lines, self.dim);
        let pool = self.pool.as_ref().expect("sharded mode");
        pool.install(|| {
            self.states.par_iter_mut().enumerate().try_for_each(|(k, st)| {
                let lo = (k * per).min(n);
                let hi = ((k + 1) * per).min(n);
                for i in lo..hi {
                    st.update(&xs[i * d..(i + 1) * d], ys[i]).map_err(|e| at_line(e, lines[i]))?;
                }
                Ok::<(), Error>(())
            })
        })?;
        self.xs.clear();
        self.ys.clear();
        self.lines.clear();
        Ok(())
    }

    fn finish(mut self) -> Result<InformationState> {
        self.flush()?;
        let mut it = self.states.into_iter();
        let mut acc = it.next().expect("at least one worker");
        for st in it {
            acc = acc.merge(&st)?;
        }
        Ok(acc)
    }
}

fn at_line(e: Error, line: u64) -> Error {
    match e {
        Error::OutsideGrid { .. } => Error::Data { line, msg: "input lies outside the grid".into() },
        Error::InvalidArgument(msg) => Error::Data { line, msg },
        other => other,
    }
}

/// Centers the targets, builds the grid from the data bounds and trains.
pub fn train_dataset(ds: &Dataset, cfg: &Config) -> Result<InformationState> {
    let hp = cfg.hyper_params()?;
    hp.check_dim(ds.input(0)).map_err(|_| dim_mismatch(ds.dim(), &hp))?;
    let grid = grid_for(&ds.bounds(), cfg)?;
    let y_mean = ds.targets().iter().sum::<f64>() / ds.len() as f64;
    let mut trainer = ShardedTrainer::new(grid, hp, y_mean, cfg)?;
    for (i, (x, y)) in ds.rows().enumerate() {
        trainer.push(x, y - y_mean, i as u64 + 2)?;
    }
    trainer.finish()
}

fn dim_mismatch(d: usize, hp: &HyperParams) -> Error {
    Error::Config(format!("data has {d} input columns but {} lengthscales are configured", hp.dim()))
}

/// Same result as loading the file and calling [`train_dataset`], but reads
/// the file twice instead of holding it in memory.
pub fn train_csv(path: impl AsRef<Path>, cfg: &Config) -> Result<InformationState> {
    let path = path.as_ref();
    let hp = cfg.hyper_params()?;

    let mut rows = CsvRows::open(path, Schema::WithTarget)?;
    if rows.dim() != hp.dim() {
        return Err(dim_mismatch(rows.dim(), &hp));
    }
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); hp.dim()];
    let (mut sum, mut n) = (0.0, 0u64);
    while let Some(row) = rows.next_row()? {
        for (b, &v) in bounds.iter_mut().zip(&row.x) {
            b.0 = b.0.min(v);
            b.1 = b.1.max(v);
        }
        sum += row.y.expect("target column");
        n += 1;
    }
    if n == 0 {
        return Err(Error::Dataset(format!("{}: no data rows", path.display())));
    }
    let y_mean = sum / n as f64;
    let grid = grid_for(&bounds, cfg)?;

    let mut trainer = ShardedTrainer::new(grid, hp, y_mean, cfg)?;
    let mut rows = CsvRows::open(path, Schema::WithTarget)?;
    while let Some(row) = rows.next_row()? {
        trainer.push(&row.x, row.y.expect("target column") - y_mean, row.line)?;
    }
    trainer.finish()
}

/// Prior mean and variance, reported with an empty subset.
pub fn prior_prediction<V: InformationView + ?Sized>(view: &V) -> PredictionResult {
    PredictionResult {
        mean: view.y_mean(),
        variance: view.hyper().signal_variance(),
        subset_size: 0,
        clamped: false,
        jitter: 0.0,
    }
}

/// Local prediction, falling back to the prior when no basis function reaches the point.
pub fn predict_or_prior<V: InformationView + ?Sized>(
    view: &V,
    x: &[f64],
    opts: &PredictOptions,
) -> Result<PredictionResult> {
    match predict_with(view, x, opts) {
        Err(Error::NoLocalBasis) => Ok(prior_prediction(view)),
        other => other,
    }
}

/// Predicts all points in order using `workers` threads.
pub fn predict_points<V, P>(view: &V, points: &[P], opts: &PredictOptions, workers: usize) -> Result<Vec<PredictionResult>>
where
    V: InformationView + ?Sized,
    P: AsRef<[f64]> + Sync,
{
    if workers <= 1 {
        return points.iter().map(|p| predict_or_prior(view, p.as_ref(), opts)).collect();
    }
    pool(workers)?.install(|| points.par_iter().map(|p| predict_or_prior(view, p.as_ref(), opts)).collect())
}
