use super::eigh::{eigh, SpectralDecomposition};
use super::functions::{psd_sqrt_from, solve_in_eigenbasis, SymmetricSolution};
use super::matrix::HermitianMatrix;
use crate::error::{QcrbError, Result};

pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVE_CLAMP, 0)` are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix. Keeps its
/// eigendecomposition since every downstream routine needs it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    eig: SpectralDecomposition,
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let trace = matrix.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(QcrbError::InvalidDensity(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let mut eig = eigh(&matrix)?;
        let min = eig.values[0];
        if min < -NEGATIVE_CLAMP {
            return Err(QcrbError::InvalidDensity(format!(
                "eigenvalue {min:e} is below -{NEGATIVE_CLAMP:e}"
            )));
        }
        if min < 0.0 {
            for l in eig.values.iter_mut() {
                *l = l.max(0.0);
            }
            let matrix = eig.reconstruct();
            return Ok(Self { matrix, eig });
        }
        Ok(Self { matrix, eig })
    }

    /// Maximally mixed state `I/n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
            .expect("I/n is a valid state")
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn sqrt(&self) -> HermitianMatrix {
        psd_sqrt_from(&self.eig).expect("density matrices are PSD")
    }

    /// `(rho X + X rho)/2 = rhs`.
    pub fn solve_symmetric(&self, rhs: &HermitianMatrix, tol: f64) -> Result<SymmetricSolution> {
        solve_in_eigenbasis(&self.eig, &self.eig.values, rhs, tol)
    }

    /// `sqrt(rho) X + X sqrt(rho) = rhs`, i.e. the derivative of the square
    /// root when `rhs` is the derivative of `rho`.
    pub fn solve_sqrt_sylvester(
        &self,
        rhs: &HermitianMatrix,
        tol: f64,
    ) -> Result<SymmetricSolution> {
        let weights: Vec<f64> = self
            .eig
            .values
            .iter()
            .map(|&l| 2.0 * super::functions::clamped_sqrt(l))
            .collect();
        solve_in_eigenbasis(&self.eig, &weights, rhs, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_trace() {
        let m = HermitianMatrix::from_real_diagonal(&[0.51, 0.5]);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(QcrbError::InvalidDensity(_))
        ));
    }

    #[test]
    fn rejects_indefinite() {
        let m = HermitianMatrix::from_real_diagonal(&[1.1, -0.1]);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn clamps_tiny_negative_eigenvalues() {
        let m = HermitianMatrix::from_real_diagonal(&[1.0 + 5e-11, -5e-11]);
        let d = DensityMatrix::new(m).unwrap();
        assert!(d.eigenvalues().iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn sqrt_of_orthogonal_mixture() {
        // w P1 + (1-w) P2 -> sqrt(w) P1 + sqrt(1-w) P2
        let w = 0.3;
        let d = DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[w, 1.0 - w])).unwrap();
        let expected = HermitianMatrix::from_real_diagonal(&[w.sqrt(), (1.0 - w).sqrt()]);
        assert!(d.sqrt().frobenius_distance(&expected) < 1e-15);
    }
}
