use thiserror::Error;

/// Coarse classification used by the CLI and the C ABI to pick exit/status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: expression syntax, unknown names, bad arguments.
    Input,
    /// A documented precondition of an operation does not hold.
    Precondition,
    /// A numerical procedure failed (domain error, divergence, non-finite value).
    Numerical,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("`{name}` at position {position} expects {expected} argument(s), found {found}")]
    Arity {
        name: String,
        position: usize,
        expected: usize,
        found: usize,
    },

    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },

    #[error("variable `{0}` is not assigned")]
    Unbound(char),

    #[error("{what} = {value} lies outside [0, 1]")]
    OutsideUnitInterval { what: &'static str, value: f64 },

    #[error("{0}")]
    Precondition(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("function has no {0} channel")]
    MissingChannel(&'static str),

    #[error("Haar pair precondition violated: {0}")]
    HaarPair(String),

    #[error("adaptive quadrature on [{a}, {b}] did not converge within depth {depth}")]
    QuadratureDiverged { a: f64, b: f64, depth: u32 },

    #[error("non-finite value {value} from {context}")]
    NonFinite { context: String, value: f64 },

    #[error("integer overflow while computing {0}")]
    Overflow(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::Arity { .. }
            | Error::Unbound(_) => ErrorKind::Input,
            Error::OutsideUnitInterval { .. }
            | Error::Precondition(_)
            | Error::LengthMismatch(_)
            | Error::MissingChannel(_)
            | Error::HaarPair(_) => ErrorKind::Precondition,
            Error::Domain { .. }
            | Error::QuadratureDiverged { .. }
            | Error::NonFinite { .. }
            | Error::Overflow(_) => ErrorKind::Numerical,
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutsideUnitInterval { what, value })
    }
}

pub(crate) fn finite(context: impl FnOnce() -> String, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            context: context(),
            value,
        })
    }
}
