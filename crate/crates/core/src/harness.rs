//! Dataset ingestion, evaluation metrics, timing and end-to-end pipelines
//! shared by the command-line tool and the test suites.

pub mod bench;
pub mod config;
pub mod dataset;
pub mod metrics;
pub mod pipeline;

pub use bench::{benchmark, EvalReport, LatencyStats, TimeStats};
pub use config::Config;
pub use dataset::{center_targets, load_csv, CsvRows, Dataset, Schema};
pub use metrics::{msll, smae, smse, TrainingStats};
