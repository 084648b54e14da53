use thiserror::Error;

/// Failures raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precision budget exceeded in {what}: estimated error {estimate:e} > target {target:e}")]
    BudgetExceeded {
        what: &'static str,
        estimate: f64,
        target: f64,
    },
    #[error("L-value too close to zero at {at} (|L| = {modulus:e})")]
    ZeroOfL { at: String, modulus: f64 },
    #[error("contour passes through a singularity of {0}")]
    ContourSingular(String),
    #[error("pole cancellation failed in {what}: residual {residual:e}")]
    CancellationFailure { what: String, residual: f64 },
    #[error("point {0} lies below the evaluation floor and cannot be routed")]
    EvaluationFloor(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn pole(function: &'static str, at: impl std::fmt::Display) -> LabError {
    LabError::Pole {
        function,
        at: at.to_string(),
    }
}
