use thiserror::Error;

/// Errors raised by the numerical kernel, the state models and the
/// information routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcrbError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |m_ij - conj(m_ji)| = {max_asymmetry:e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("non-finite entry in matrix or vector")]
    NonFinite,

    #[error("vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error(
        "Jacobi eigensolver did not converge after {sweeps} sweeps \
         (off-diagonal norm {off_norm:e}, Frobenius norm {frobenius:e})"
    )]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        frobenius: f64,
    },

    #[error(
        "right-hand side is not supported on the range of the operator \
         (dropped entry of magnitude {max_dropped:e})"
    )]
    RankDeficientInconsistent { max_dropped: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pure family is stationary at theta = {theta} (I_H1 = {info:e})")]
    StationaryFamily { theta: f64, info: f64 },

    #[error(
        "boundary regularity violated for eigenvalue {index}: \
         lambda = {lambda:e}, dlambda = {dlambda:e}"
    )]
    BoundaryRegularity {
        index: usize,
        lambda: f64,
        dlambda: f64,
    },

    #[error(
        "outcome {outcome} has probability {prob:e} but score numerator {score:e}; \
         the classical score is unbounded"
    )]
    SupportRegularity {
        outcome: usize,
        prob: f64,
        score: f64,
    },

    #[error("measurement carries no information (i = {info:e})")]
    ZeroInformation { info: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, QcrbError>;
