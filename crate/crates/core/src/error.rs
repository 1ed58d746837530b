use thiserror::Error;

use crate::matrix::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates an operation's preconditions (shape, symmetry, emptiness).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("the zero operator does not define a semi-Hilbertian structure")]
    ZeroWeight,

    #[error("operator is not A-bounded (residual {residual:e})")]
    NotABounded { residual: f64 },

    #[error("operator is not A-adjointable (residual {residual:e})")]
    NotAAdjointable { residual: f64 },

    #[error("operator is not A-invertible (smallest singular value of compression {sigma_min:e})")]
    NotAInvertible { sigma_min: f64 },

    /// The shifted QR iteration ran out of budget; `deflated` holds the
    /// eigenvalues that had already split off.
    #[error("eigenvalue iteration did not converge after {iterations} iterations ({} of {dim} eigenvalues deflated)", deflated.len())]
    NonConvergence {
        iterations: usize,
        dim: usize,
        deflated: Vec<C64>,
    },

    #[error("invalid conjugation: {0}")]
    InvalidConjugation(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown identifier `{name}` at byte {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("cannot close within eps = {eps:e}: no entry within {budget:e} of {limit} up to n = {searched}")]
    CannotClose {
        eps: f64,
        budget: f64,
        limit: C64,
        searched: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dims(expected: impl std::fmt::Display, found: impl std::fmt::Display) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
