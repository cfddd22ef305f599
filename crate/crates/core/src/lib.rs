//! Approximate Gaussian-process regression for large, low-dimensional
//! spatial fields.
//!
//! Training accumulates an information vector and a sparse information
//! matrix over a uniform grid of finite-support basis functions (truncated
//! squared-exponential cross-sections). Each update touches only the basis
//! functions whose support covers the measurement, so training is linear in
//! the number of measurements.
//!
//! Prediction gathers the rows and columns of the trained system that belong
//! to the basis functions near the query point and solves a small dense
//! system. Because the information entries of any subset of basis functions
//! are exactly the corresponding entries of the full trained system, the
//! local prediction is the sparse-GP (DTC) prediction built from that subset
//! and every measurement, at a cost set by the subset size alone.
//!
//! ```
//! use localgp::{HyperParams, InformationState, UniformGrid, predictor};
//!
//! let hp = HyperParams::new(1.0, vec![1.0], 0.1, 2.0, 1.0).unwrap();
//! let grid = UniformGrid::covering(&[(0.0, 10.0)], 0.5, hp.r(), 1 << 20).unwrap();
//! let mut state = InformationState::new(grid, hp, 0.0);
//! for i in 0..50 {
//!     let x = i as f64 * 0.2;
//!     state.update(&[x], x.sin()).unwrap();
//! }
//! let p = predictor::predict(&state, &[3.1]).unwrap();
//! assert!((p.mean - 3.1f64.sin()).abs() < 0.1);
//! ```

// `!(a > b)` comparisons deliberately also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod format;
pub mod grid;
pub mod harness;
pub mod kernel;
mod linalg;
pub mod predictor;
pub mod trainer;

pub use error::{Error, Result};
pub use grid::UniformGrid;
pub use kernel::HyperParams;
pub use linalg::JitterPolicy;
pub use predictor::{LocalSystem, PredictOptions, PredictionResult};
pub use trainer::{CompactInformation, InformationState, InformationView};
