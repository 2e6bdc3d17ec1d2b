use alloc::string::String;

use crate::linalg::c64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("system generation failed after {0} attempts")]
    GenerationFailed(usize),

    #[error("operation requires an output map (p >= 1)")]
    NoOutput,

    #[error("subspace is not output-nulling (residual {0:.3e})")]
    NotOutputNulling(f64),

    #[error("spectrum not assignable: residual {0:.3e} after synthesis")]
    SpectrumNotAssignable(f64),

    #[error("decomposition residual {0:.3e} exceeds tolerance")]
    DecompositionResidual(f64),

    #[error("duplicate eigenvalue {0}")]
    DuplicateLambda(c64),

    #[error("spectrum is not self-conjugate: {0} has no conjugate partner")]
    NotSelfConjugate(c64),

    #[error("eigenvalue {lambda} is within {distance:.3e} of forbidden value {forbidden}")]
    TooCloseToForbidden {
        lambda: c64,
        forbidden: c64,
        distance: f64,
    },

    #[error("selected eigenvectors are linearly dependent (rank {rank} of {count})")]
    DependentSelection { rank: usize, count: usize },

    #[error("selection is not self-conjugate: {0}")]
    NonSelfConjugateSelection(String),

    #[error("matrix is not diagonal")]
    NonDiagonal,

    #[error("reachable block has rank {rank}, expected {dim}")]
    BlockNotReachable { rank: usize, dim: usize },
}
