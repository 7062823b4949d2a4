use thiserror::Error;

/// Errors raised by the library and mapped onto CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),

    #[error("speed-limit bound undefined: {0}")]
    UndefinedBound(String),

    #[error("step rejected: {0}")]
    StepRejected(String),

    #[error("state invariant violated: {0}")]
    InvariantViolation(String),

    #[error("convergence gate failed: {0}")]
    ConvergenceFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status: 2 validation, 3 numerical consistency, 4 oracle convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::InvalidMeasurement(_) | Error::StepRejected(_) => 2,
            Error::NumericalConsistency(_)
            | Error::UndefinedBound(_)
            | Error::InvariantViolation(_) => 3,
            Error::ConvergenceFailure(_) => 4,
            Error::Io(_) | Error::Serialization(_) => 1,
        }
    }

    /// Short machine-readable tag for the error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidMeasurement(_) => "invalid_measurement",
            Error::NumericalConsistency(_) => "numerical_consistency",
            Error::UndefinedBound(_) => "undefined_bound",
            Error::StepRejected(_) => "step_rejected",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::ConvergenceFailure(_) => "convergence_failure",
            Error::Io(_) => "io",
            Error::Serialization(_) => "serialization",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
