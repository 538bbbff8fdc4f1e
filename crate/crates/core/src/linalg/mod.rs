//! Dense complex-Hermitian linear algebra: eigendecomposition, matrix
//! functions, trace algebra and eigenbasis solves.

mod density;
mod eigh;
mod functions;
mod matrix;

pub use density::{DensityMatrix, NEGATIVE_CLAMP, TRACE_TOL};
pub use eigh::{eigh, SpectralDecomposition, MAX_SWEEPS, OFF_DIAGONAL_REL_TOL};
pub(crate) use functions::trace3;
pub use functions::{
    psd_sqrt, solve_symmetric_product, trace_product, unitary_exp, SymmetricSolution, EIGEN_ZERO,
    PSD_REJECT_TOL, SUPPORT_CONSISTENCY_TOL, SUPPORT_TOL,
};
pub use matrix::{
    inner, vec_norm, CMatrix, HermitianMatrix, UnitVector, HERMITIAN_TOL, UNIT_NORM_TOL,
};
