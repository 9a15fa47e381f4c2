use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("matrix is not invertible modulo p (determinant is not a unit): {0}")]
    NotInvertibleModP(String),

    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },

    #[error("non-integer exponent at position {pos}")]
    NonIntegerExponent { pos: usize },

    #[error("empty J; consider --all-points (no interior lattice points)")]
    EmptyJ,

    #[error("precision too low: need p^{needed}, context has p^{available}")]
    PrecisionTooLow { needed: u32, available: u32 },

    #[error("zero polynomial has no Newton polytope")]
    ZeroPolynomial,

    #[error("integrability failure at degree {degree}: {detail}")]
    Integrability { degree: u32, detail: String },

    #[error("division by disallowed prime {prime}")]
    DisallowedDivision { prime: u64 },

    #[error("inconsistent point counts: {0}")]
    InconsistentCounts(String),

    #[error("root {root} modulo {p} is not simple")]
    NonSimpleRoot { root: u64, p: u64 },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("internal divisibility check failed: {0}")]
    CheckFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
