//! Quantum information quantities: the symmetric logarithmic derivative,
//! Helstrom information and Wigner-Yanase skew information, each through
//! several independent routes, plus the relations between them.

mod info;
mod report;
mod sld;

pub use info::{
    alpha_beta, gamma_from_point, gamma_spectral, helstrom_from_point, helstrom_info_pure,
    helstrom_info_qubit_closed, helstrom_info_sld, helstrom_info_spectral, qubit_spectral_point,
    wy_from_point, wy_info_generic, wy_info_pure, wy_info_qubit_closed, wy_info_spectral,
    WyGeneric, BOUNDARY_DERIVATIVE_TOL, EIGENVALUE_FLOOR,
};
pub use report::{relation_report, QuantumInfoResult, Tolerances, RATIO_FLOOR};
pub use sld::{helstrom_from_sld, sld, sld_defining_residual, sld_from_spectrum, SldResult};
