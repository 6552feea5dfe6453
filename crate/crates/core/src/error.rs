use thiserror::Error;

/// Errors raised by the evaluators, the prover front end and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tilt parameters: {0}")]
    InvalidParams(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("zero exp-polynomial has no sign")]
    ZeroPolynomial,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("box does not meet the {0} region")]
    EmptyRegion(String),
    #[error("box is not valid for this expression: {0}")]
    RegionMismatch(String),
    #[error("infeasible family constraints: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
