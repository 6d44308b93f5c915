use thiserror::Error;

/// Errors produced by the coherence toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is not 1 (got {trace})")]
    BadTrace { trace: f64 },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("completeness relation violated (deviation {deviation:e})")]
    Incomplete { deviation: f64 },

    #[error("projector set is not an orthogonal resolution of identity: {0}")]
    BadDecomposition(String),

    #[error("basis is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("basis does not refine the projector decomposition: {0}")]
    NotRefinement(String),

    #[error("the l1 quantifier of a Lüders frame needs a representation basis")]
    MissingRepresentation,

    #[error("solver did not converge (residual {residual:e})")]
    SolverNonConvergence { residual: f64 },

    #[error(
        "Kraus operator {kraus_index} maps an invariant state outside the invariant set \
         (deviation {deviation:e})"
    )]
    NotBlockPreserving {
        kraus_index: usize,
        deviation: f64,
        witness: Box<crate::linalg::CMatrix>,
    },

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
