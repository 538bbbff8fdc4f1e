//! Classical Fisher, Helstrom and Wigner-Yanase information for
//! one-parameter families of finite-dimensional quantum states.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense Hermitian kernel (Jacobi `eigh`, PSD square root,
//!   eigenbasis solves of `(aX + Xa)/2 = b`).
//! - [`models`]: parametric families `theta -> rho(theta)` with analytic or
//!   finite-difference derivatives.
//! - [`quantum`]: symmetric logarithmic derivative, Helstrom and
//!   Wigner-Yanase information through several independent routes.
//! - [`classical`]: POVMs, outcome distributions and classical Fisher
//!   information.
//! - [`sim`]: Monte Carlo check of the Cramer-Rao bound.
//! - [`verify`]: the invariant suite behind `qcrb-kit verify`.

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod config;
pub mod error;
pub mod linalg;
pub mod models;
pub mod quantum;
pub mod sim;
pub mod verify;

pub use error::{QcrbError, Result};
pub use linalg::{CMatrix, DensityMatrix, HermitianMatrix, SpectralDecomposition, UnitVector};
pub use models::StateModel;
pub use num_complex::Complex64;
