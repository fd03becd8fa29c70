use thiserror::Error;

/// Outcome of a failed evaluation of an entire function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    /// The modulus of the result is at least the promotion threshold.
    /// `ln_abs` carries `ln|f(z)|` when the evaluator can still produce it.
    #[error("evaluation overflow (ln|f| = {ln_abs:?})")]
    Overflow { ln_abs: Option<f64> },
    #[error("series not entire at working precision")]
    NotEntire,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coefficients unavailable for `{0}`")]
    CoefficientsUnavailable(String),
    #[error("`{0}` is non-transcendental")]
    NonTranscendental(String),
    #[error("negative value {0} cannot be a magnitude")]
    NegativeMagnitude(f64),
    #[error("value is not representable as a magnitude")]
    UnrepresentableMagnitude,
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
    #[error("unrepresentable radius")]
    UnrepresentableRadius,
    #[error("R invalid: M(r) <= r at r = {radius}")]
    InvalidR { radius: f64 },
    #[error("R invalid for mu: mu(r) <= r at r = {radius}")]
    InvalidMuR { radius: f64 },
    #[error("no valid R found below {0}")]
    NoValidR(f64),
    #[error("fewer than 10 nonzero coefficients below index {0}")]
    TooFewCoefficients(u64),
    #[error("ladder too short: needs rung {needed}, has {available}")]
    LadderTooShort { needed: usize, available: usize },
    #[error("ladder truncated at rung {0}")]
    LadderTruncated(usize),
    #[error("radius {0} exceeds the depth-0 range")]
    OutOfRange(f64),
    #[error("mask is not bounded in the window")]
    UnboundedMask,
    #[error("origin cell is already at level >= {0}")]
    OriginInLevel(i32),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{0}")]
    Evaluation(#[from] EvalError),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
