use thiserror::Error;

/// Errors produced by the factorization, solver and diagnostic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty vector or matrix")]
    Empty,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("diagonal entry t0 = {t0} is not positive")]
    NonPositiveDiagonal { t0: f64 },

    /// A downdating step could not proceed: |e_k^T u_k| <= |e_{k+1}^T v_k|.
    /// `step` is the 1-based index k of the step u_k -> u_{k+1}.
    #[error("breakdown at step {step}: matrix is not positive definite")]
    Breakdown { step: usize },

    /// Dense Cholesky hit a non-positive pivot (0-based row index).
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("zero pivot at index {index}")]
    ZeroPivot { index: usize },

    #[error("eigenvalue iteration did not converge")]
    IllConditioned,

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("solution vector has zero norm")]
    ZeroSolution,

    #[error("reference solution has zero norm")]
    ZeroTruth,

    #[error("problem too large for this routine: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },
}

impl Error {
    /// True for errors that certify the input is not (numerically) positive definite.
    pub fn is_breakdown(&self) -> bool {
        matches!(
            self,
            Error::Breakdown { .. } | Error::NotPositiveDefinite { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
