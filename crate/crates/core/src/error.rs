use thiserror::Error;

/// Errors raised by the exact, asymptotic and sampling routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index tuple {0} violates the recursion preconditions")]
    InvalidIndex(String),

    #[error("n = {n} exceeds the {mode} guard of {limit}; pass an explicit override to proceed")]
    GuardExceeded {
        n: usize,
        limit: usize,
        mode: &'static str,
    },

    #[error("value {value} at index {index} left [0, 1]; upstream polynomial is inconsistent")]
    OutOfUnitInterval { index: usize, value: String },

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InvalidIndex(_) => "invalid_index",
            Error::GuardExceeded { .. } => "guard_exceeded",
            Error::OutOfUnitInterval { .. } => "out_of_unit_interval",
            Error::IdentityViolation(_) => "identity_violation",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
