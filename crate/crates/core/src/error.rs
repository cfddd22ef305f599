use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid sizing: {0}")]
    GridSize(String),

    /// No basis function covers the measurement. `row` is the zero-based
    /// position in the batch (0 for single updates).
    #[error("measurement {row} lies outside the grid: no basis function supports it")]
    OutsideGrid { row: usize },

    #[error("incompatible information states: {0}")]
    IncompatibleState(String),

    #[error("no basis function lies within the local radius of the query point")]
    NoLocalBasis,

    #[error("ill-conditioned local prior ({0}); use r >= 2 * r_star")]
    Conditioning(String),

    #[error("factorization of a {size}x{size} system failed after jitter escalation (condition estimate {condition:.3e})")]
    Numerical { size: usize, condition: f64 },

    #[error("dense oracle limit exceeded: {what} = {value} > cap {cap}")]
    DenseCap {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    #[error("data error at line {line}: {msg}")]
    Data { line: u64, msg: String },

    #[error("data error: {0}")]
    Dataset(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("model file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the command-line tool: 2 data, 3 numerical, 4 config.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical { .. } | Error::Conditioning(_) | Error::NoLocalBasis => 3,
            Error::Config(_) | Error::GridSize(_) | Error::DenseCap { .. } => 4,
            Error::InvalidArgument(_)
            | Error::OutsideGrid { .. }
            | Error::IncompatibleState(_)
            | Error::UndefinedMetric(_)
            | Error::Data { .. }
            | Error::Dataset(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::Csv(_) => 2,
        }
    }
}
