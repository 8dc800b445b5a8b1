use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Variants split into validation failures (bad input, violated preconditions)
/// and numerical failures (the computation ran and did not succeed); see
/// [`Error::is_validation`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: need N >= {1}")]
    InvalidDimension(i64, usize),
    #[error("invalid level {0}: levels must be nonnegative")]
    InvalidLevel(f64),
    #[error("empty grid")]
    EmptyGrid,
    #[error("invalid exponent {value}: {reason}")]
    InvalidExponent { value: f64, reason: &'static str },
    #[error("out-of-range lambda {lambda}: need |lambda| < {bound}")]
    OutOfRangeLambda { lambda: f64, bound: f64 },
    #[error("unsupported datum: {0}")]
    UnsupportedDatum(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mismatched meshes: {0}")]
    MismatchedMeshes(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("slope not integrable at the origin (local exponent {exponent})")]
    BlowUpAtOrigin { exponent: f64 },
    #[error("solver diverged after {iterations} iterations (last residual {residual:e})")]
    Diverged { iterations: usize, residual: f64 },
    #[error("singular linearization: {0}")]
    SingularLinearization(String),
    #[error("a priori bound not applicable: {0}")]
    BoundNotApplicable(String),
    #[error("L-infinity estimate not guaranteed: {0}")]
    EstimateNotGuaranteed(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Whether the error signals rejected input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::BlowUpAtOrigin { .. }
                | Error::Diverged { .. }
                | Error::SingularLinearization(_)
                | Error::Inconclusive(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
