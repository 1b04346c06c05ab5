use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("mode index {0:?} is not part of the basis")]
    UnknownMode(Vec<usize>),
    #[error("quadrature grid under-resolved: {cells} cells per dim, need at least {required}")]
    UnderResolvedQuadrature { cells: usize, required: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("degenerate covariance in mixture component {0}")]
    DegenerateCovariance(usize),
    #[error("rejection budget exhausted after {0} draws outside the search space")]
    RejectionBudgetExhausted(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("camera at or below the ground plane (altitude {0})")]
    CameraBelowGround(f64),
    #[error("pitch {0} rad reached the gimbal guard")]
    GimbalLock(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("invalid controller configuration: {0}")]
    InvalidConfig(String),
    #[error("iLQR diverged: {0}")]
    Divergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
