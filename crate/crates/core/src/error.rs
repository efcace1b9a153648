use thiserror::Error;

/// Errors raised across the library. Each variant names the failing check.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("groupoid relation failure: {0}")]
    GroupoidRelation(String),
    #[error("group law failure: {0}")]
    GroupLaw(String),
    #[error("action is not proper: {0}")]
    NotProper(String),
    #[error("action is not free: {0}")]
    NotFree(String),
    #[error("orientation class mismatch: {0}")]
    Orientation(String),
    #[error("negative or degenerate density: {0}")]
    Density(String),
    #[error("degenerate cut-off: {0}")]
    DegenerateCutoff(String),
    #[error("metric is not positive definite: {0}")]
    Metric(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree out of range: {0}")]
    Degree(String),
    #[error("form is not invariant (defect {defect:e})")]
    NotInvariant { defect: f64 },
    #[error("form is not closed (defect {defect:e})")]
    NotClosed { defect: f64 },
    #[error("input is not idempotent (defect {defect:e})")]
    NotIdempotent { defect: f64 },
    #[error("symbol is not band-limited: {0}")]
    BandLimit(String),
    #[error("operator is not elliptic: {0}")]
    NotElliptic(String),
    #[error("operator is not invariant: {0}")]
    OperatorInvariance(String),
    #[error("kernel is not smoothing: {0}")]
    NotSmoothing(String),
    #[error("rank gap too small: {0}")]
    RankGap(String),
    #[error("rank jump across base points: {0}")]
    RankJump(String),
    #[error("idempotent iteration did not converge: {0}")]
    Convergence(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("calibration failure: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
