use thiserror::Error;

/// Errors raised while building densities, curves and reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid density `{label}`: {reason}")]
    InvalidDensity { label: String, reason: String },

    #[error("aliasing detected: mass {mass:e} within 1% of the window edge (window [{lo}, {hi}])")]
    Aliasing { mass: f64, lo: f64, hi: f64 },

    #[error("density `{0}` has no derivative table")]
    MissingDerivative(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
