use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("branching matrix spectral radius {radius} is not below 1")]
    StabilityViolation { radius: f64 },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series is empty")]
    EmptySeries,

    #[error("asset {asset} has {total} shares in total, fewer than the {requested} requested buckets")]
    InsufficientVolume {
        asset: usize,
        total: u64,
        requested: usize,
    },

    #[error("need at least {needed} observations per asset, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("estimator requires a synchronous homogeneous grid")]
    GridNotSynchronous,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
