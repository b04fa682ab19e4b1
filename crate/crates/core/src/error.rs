use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// A repeated eigenvalue with only one eigenvector. For the Hamiltonian
    /// family built here this happens exactly at the symmetry-breaking point.
    #[error("matrix is defective: repeated eigenvalue with a single eigenvector")]
    Defective,

    #[error(
        "PT symmetry is broken at alpha = {alpha}: the parameters sit at or beyond \
         the breaking point |sin(alpha)| = 1, where the propagator is undefined"
    )]
    BrokenSymmetry { alpha: f64 },

    #[error("trivial Hamiltonian (s = 0): the level splitting vanishes and tau = pi/dE is undefined")]
    TrivialHamiltonian,

    #[error("matrix is not PT-symmetric")]
    NotPtSymmetric,

    #[error("not canonicalizable: {reason}")]
    NotCanonicalizable { reason: String },

    #[error("invalid range: {0}")]
    InvalidRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
