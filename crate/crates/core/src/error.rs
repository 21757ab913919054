use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported operator order {0}")]
    UnsupportedOrder(usize),
    #[error("too few nodes: {n} given, closure needs at least {needed}")]
    TooFewNodes { n: usize, needed: usize },
    #[error("invalid DG degree {0}")]
    InvalidDegree(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("elements mix operator families or sizes")]
    MixedOperatorFamilies,
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-positive water height {h} at node {node}")]
    NonPositiveHeight { node: usize, h: f64 },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("fit window too short: {0} samples")]
    WindowTooShort(usize),
    #[error("empty fit window")]
    EmptyWindow,
    #[error("not a single-element equidistant grid")]
    NotFDGrid,
    #[error("resample failure: {0}")]
    ResampleFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
