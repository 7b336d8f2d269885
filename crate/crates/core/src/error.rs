use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size mismatch: expected {expected} levels, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("population {index} is {value:e}, below the rounding clamp")]
    NegativePopulation { index: usize, value: f64 },

    #[error("distribution does not sum to one (sum = {0})")]
    NotNormalized(f64),

    #[error("tail mass {tail:e} at level {n_max} exceeds tolerance {tol:e}")]
    TruncationOverflow { n_max: usize, tail: f64, tol: f64 },

    #[error("no normalizable steady state below {max_levels} levels")]
    NonNormalizable { max_levels: usize },

    #[error("generator kernel has dimension {0}; steady state is not unique")]
    DegenerateKernel(usize),

    #[error("integrator failed at t = {t:e}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("diagonal closure violated: off-diagonal element {value:e} at ({row}, {col})")]
    DiagonalClosure { row: usize, col: usize, value: f64 },

    #[error("inconsistent device parameters: {0}")]
    Inconsistent(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
