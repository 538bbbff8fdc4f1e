use crate::error::Result;
use crate::linalg::{trace_product, HermitianMatrix, SUPPORT_TOL};
use crate::models::{DerivOptions, StateModel};

/// Symmetric logarithmic derivative at one `theta`.
#[derive(Debug, Clone)]
pub struct SldResult {
    pub matrix: HermitianMatrix,
    /// Entries outside the support of `rho` were set to zero.
    pub support_dropped: bool,
    /// `tr(rho L)`, zero for a genuine quantum score.
    pub score_mean: f64,
}

/// Solves `(rho L + L rho)/2 = rho'` in the eigenbasis of `rho`.
pub fn sld(model: &StateModel, theta: f64, opts: &DerivOptions) -> Result<SldResult> {
    let rho = model.rho_at(theta)?;
    let drho = model.drho_at(theta, opts)?;
    let sol = rho.solve_symmetric(&drho, SUPPORT_TOL)?;
    let score_mean = rho.matrix().trace_inner(&sol.solution);
    Ok(SldResult {
        matrix: sol.solution,
        support_dropped: sol.support_dropped,
        score_mean,
    })
}

/// `sum_{l,k} 2/(lambda_l + lambda_k) rho_l rho' rho_k` over pairs with
/// `lambda_l + lambda_k > SUPPORT_TOL`.
pub fn sld_from_spectrum(
    lambdas: &[f64],
    projectors: &[HermitianMatrix],
    drho: &HermitianMatrix,
) -> HermitianMatrix {
    let n = drho.dim();
    let mut acc = crate::linalg::CMatrix::zeros(n);
    for (l, pl) in projectors.iter().enumerate() {
        let left = pl.as_matrix() * drho.as_matrix();
        for (k, pk) in projectors.iter().enumerate() {
            let denom = lambdas[l] + lambdas[k];
            if denom <= SUPPORT_TOL {
                continue;
            }
            let term = &left * pk.as_matrix();
            acc = &acc + &term.scale(2.0 / denom);
        }
    }
    HermitianMatrix::hermitian_part(&acc)
}

/// `||(rho L + L rho)/2 - rho'||_F`, restricted to the support of `rho`.
pub fn sld_defining_residual(
    model: &StateModel,
    theta: f64,
    l: &HermitianMatrix,
    opts: &DerivOptions,
) -> Result<f64> {
    let rho = model.rho_at(theta)?;
    let drho = model.drho_at(theta, opts)?;
    let r = rho.matrix().as_matrix();
    let lhs = (&(r * l.as_matrix()) + &(l.as_matrix() * r)).scale(0.5);
    let diff = &lhs - drho.as_matrix();
    // restrict to the support: P diff P with P the projector onto eigenvalues > tol
    let eig = rho.spectral();
    let in_eig = eig.to_eigenbasis(&diff);
    let n = eig.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if eig.values[i] + eig.values[j] > SUPPORT_TOL {
                acc += in_eig[(i, j)].norm_sqr();
            }
        }
    }
    Ok(acc.sqrt())
}

/// `tr(rho L^2)`.
pub fn helstrom_from_sld(rho: &HermitianMatrix, l: &HermitianMatrix) -> Result<f64> {
    Ok(trace_product(&[rho, l, l])?.re)
}
