use thiserror::Error;

use crate::dsl::{ParseError, Span};
use crate::structure::StructureKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("block size must be at least 1 (got {0})")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The field is not smooth (or not defined) at the requested point.
    #[error("domain error: {message}")]
    Domain { message: String, span: Option<Span> },

    #[error("singular Hessian (condition estimate {cond:.3e})")]
    SingularHessian { cond: f64 },

    /// Two independent assembly routes disagree. This indicates a convention
    /// bug rather than bad input.
    #[error("internal inconsistency in {what}: deviation {deviation:.3e}")]
    Inconsistent { what: String, deviation: f64 },

    #[error("metric is not compatible with structure {kind} (violation {violation:.3e})")]
    Incompatible { kind: StructureKind, violation: f64 },

    #[error("metric tensor rejected: {0}")]
    InvalidMetric(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    /// An integrator stage failed; `t` is the stage time.
    #[error("integrator stage {stage} at t = {t:.6e}: {source}")]
    Stage { stage: usize, t: f64, source: Box<Error> },

    #[error("step size underflow at t = {t:.6e} (dt = {dt:.3e})")]
    StepSizeUnderflow { t: f64, dt: f64 },
}

impl Error {
    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain {
            message: message.into(),
            span: None,
        }
    }

    pub(crate) fn domain_at(message: impl Into<String>, span: Span) -> Self {
        Error::Domain {
            message: message.into(),
            span: Some(span),
        }
    }

    /// True for errors caused by malformed user input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension(_) | Error::InvalidArgument(_) | Error::Parse(_) | Error::InvalidMetric(_)
        )
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
