use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A numeric parameter is out of range or violates a divisibility condition.
    #[error("parameter error: {0}")]
    Param(String),

    #[error("modulus is not irreducible over F_{p}: {detail}")]
    Reducible { p: u32, detail: String },

    /// Field of size p^(hn) beyond the supported desk scale.
    #[error("field too large: {p}^{degree} exceeds 2^20 elements")]
    FieldTooLarge { p: u32, degree: u32 },

    #[error("objects belong to different fields")]
    FieldMismatch,

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("undefined for this input: {0}")]
    Undefined(String),

    #[error("empty linear set: the subspace is zero")]
    EmptySet,

    /// A named precondition of a construction does not hold.
    #[error("precondition `{name}` violated: {detail}")]
    Precondition { name: &'static str, detail: String },

    #[error("classification error: {0}")]
    Classification(String),

    /// A structural claim that must hold for every valid input failed on this one.
    #[error("claim `{claim}` failed: {detail}")]
    ClaimFailed { claim: &'static str, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn pre(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn claim(claim: &'static str, detail: impl Into<String>) -> Self {
        Error::ClaimFailed {
            claim,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
