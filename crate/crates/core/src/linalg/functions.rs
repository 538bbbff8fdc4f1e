//! Matrix functions built on the eigendecomposition: PSD square root,
//! eigenbasis solves of `(aX + Xa)/2 = rhs`, trace products and unitary
//! exponentials.

use num_complex::Complex64;

use super::eigh::{eigh, SpectralDecomposition};
use super::matrix::{CMatrix, HermitianMatrix, ZERO};
use crate::error::{QcrbError, Result};

/// Eigenvalues below this are reported as [`QcrbError::NotPositiveSemidefinite`].
pub const PSD_REJECT_TOL: f64 = 1e-8;
/// Eigenvalues of magnitude below this are treated as exact zeros before a
/// square root is taken.
pub const EIGEN_ZERO: f64 = 1e-13;
/// Dropped eigenbasis entries above this make a solve inconsistent.
pub const SUPPORT_CONSISTENCY_TOL: f64 = 1e-6;
/// Default cutoff on `lambda_i + lambda_j` for eigenbasis solves.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Unique PSD square root of a PSD matrix.
pub fn psd_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = eigh(m)?;
    psd_sqrt_from(&eig)
}

pub(crate) fn psd_sqrt_from(eig: &SpectralDecomposition) -> Result<HermitianMatrix> {
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -PSD_REJECT_TOL {
        return Err(QcrbError::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    Ok(eig.map_eigenvalues(clamped_sqrt))
}

pub(crate) fn clamped_sqrt(l: f64) -> f64 {
    if l <= EIGEN_ZERO {
        0.0
    } else {
        l.sqrt()
    }
}

/// Solution of a symmetric product equation together with a flag telling
/// whether entries outside the support were zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSolution {
    pub solution: HermitianMatrix,
    pub support_dropped: bool,
}

/// Solves `(a X + X a)/2 = rhs` for Hermitian `X` in the eigenbasis of the
/// PSD matrix `a`.
///
/// Eigenbasis entries with `lambda_i + lambda_j <= tol` are set to zero; if
/// the right-hand side has weight above [`SUPPORT_CONSISTENCY_TOL`] there,
/// the equation has no solution and `RankDeficientInconsistent` is returned.
pub fn solve_symmetric_product(
    a: &HermitianMatrix,
    rhs: &HermitianMatrix,
    tol: f64,
) -> Result<SymmetricSolution> {
    if a.dim() != rhs.dim() {
        return Err(QcrbError::Dimension {
            expected: a.dim(),
            found: rhs.dim(),
        });
    }
    let eig = eigh(a)?;
    if let Some(&min) = eig.values.first() {
        if min < -PSD_REJECT_TOL {
            return Err(QcrbError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
    }
    solve_in_eigenbasis(&eig, &eig.values, rhs, tol)
}

/// Eigenbasis solve with explicit operator eigenvalues `weights`, paired with
/// the eigenvectors of `eig`. Lets callers reuse a decomposition of `rho`
/// for operators such as `2 sqrt(rho)` that share its eigenvectors.
pub(crate) fn solve_in_eigenbasis(
    eig: &SpectralDecomposition,
    weights: &[f64],
    rhs: &HermitianMatrix,
    tol: f64,
) -> Result<SymmetricSolution> {
    let n = eig.dim();
    let r = eig.to_eigenbasis(rhs.as_matrix());
    let mut x = CMatrix::zeros(n);
    let mut dropped = false;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let denom = weights[i].max(0.0) + weights[j].max(0.0);
            if denom > tol {
                x[(i, j)] = r[(i, j)] * (2.0 / denom);
            } else {
                dropped = true;
                worst = worst.max(r[(i, j)].norm());
            }
        }
    }
    if worst > SUPPORT_CONSISTENCY_TOL {
        return Err(QcrbError::RankDeficientInconsistent { max_dropped: worst });
    }
    Ok(SymmetricSolution {
        solution: HermitianMatrix::hermitian_part(&eig.from_eigenbasis(&x)),
        support_dropped: dropped,
    })
}

/// `tr(m_1 m_2 ... m_k)`.
pub fn trace_product(ms: &[&HermitianMatrix]) -> Result<Complex64> {
    let Some(first) = ms.first() else {
        return Err(QcrbError::Dimension {
            expected: 1,
            found: 0,
        });
    };
    let n = first.dim();
    if let Some(bad) = ms.iter().find(|m| m.dim() != n) {
        return Err(QcrbError::Dimension {
            expected: n,
            found: bad.dim(),
        });
    }
    let mut acc = first.as_matrix().clone();
    for m in &ms[1..] {
        acc = &acc * m.as_matrix();
    }
    Ok(acc.trace())
}

/// `tr(a b c)` without the dimension checks, for inner loops.
pub(crate) fn trace3(a: &HermitianMatrix, b: &HermitianMatrix, c: &HermitianMatrix) -> Complex64 {
    let bc = b.as_matrix() * c.as_matrix();
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * bc[(j, i)];
        }
    }
    acc
}

/// `exp(t K)` for skew-Hermitian `K`, given as the Hermitian `H = -i K`.
pub fn unitary_exp(generator: &HermitianMatrix, t: f64) -> Result<CMatrix> {
    let eig = eigh(generator)?;
    let n = eig.dim();
    let u = &eig.vectors;
    Ok(CMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| u[(i, k)] * Complex64::from_polar(1.0, t * eig.values[k]) * u[(j, k)].conj())
            .sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    #[test]
    fn sqrt_of_half_identity() {
        let m = HermitianMatrix::identity(2).scale(0.5);
        let r = psd_sqrt(&m).unwrap();
        let expected = HermitianMatrix::identity(2).scale(0.5f64.sqrt());
        assert!(r.frobenius_distance(&expected) < 1e-15);
    }

    #[test]
    fn sqrt_of_projector_is_itself() {
        let v = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let p = HermitianMatrix::projector(&v);
        let r = psd_sqrt(&p).unwrap();
        assert!(r.frobenius_distance(&p) < 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = HermitianMatrix::from_real_diagonal(&[1.0, -1e-6]);
        assert!(matches!(
            psd_sqrt(&m),
            Err(QcrbError::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn solve_with_identity_returns_rhs() {
        let h = HermitianMatrix::from_real_rows(&[vec![0.2, -1.0], vec![-1.0, 3.0]]).unwrap();
        let sol = solve_symmetric_product(&HermitianMatrix::identity(2), &h, SUPPORT_TOL).unwrap();
        assert!(sol.solution.frobenius_distance(&h) < 1e-14);
        assert!(!sol.support_dropped);
    }

    #[test]
    fn solve_on_one_dimensional_support() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let rhs = HermitianMatrix::from_real_diagonal(&[0.7, 0.0]);
        let sol = solve_symmetric_product(&a, &rhs, SUPPORT_TOL).unwrap();
        let expected = HermitianMatrix::from_real_diagonal(&[0.7, 0.0]);
        assert!(sol.solution.frobenius_distance(&expected) < 1e-15);
        assert!(sol.support_dropped);
    }

    #[test]
    fn solve_flags_unsupported_rhs() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let rhs = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert!(matches!(
            solve_symmetric_product(&a, &rhs, SUPPORT_TOL),
            Err(QcrbError::RankDeficientInconsistent { .. })
        ));
    }

    #[test]
    fn trace_product_examples() {
        assert_eq!(
            trace_product(&[&HermitianMatrix::identity(2)]).unwrap(),
            Complex64::new(2.0, 0.0)
        );
        let p0 = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert_eq!(trace_product(&[&p0, &p1]).unwrap(), ZERO);
        assert!(matches!(
            trace_product(&[&p0, &HermitianMatrix::identity(3)]),
            Err(QcrbError::Dimension { .. })
        ));
        assert!(trace_product(&[]).is_err());
    }

    #[test]
    fn unitary_exp_of_rotation_generator() {
        // K = [[0,-1],[1,0]] = i H with H = [[0, i],[-i, 0]]
        let h = HermitianMatrix::new(
            CMatrix::from_rows(&[
                vec![ZERO, Complex64::new(0.0, 1.0)],
                vec![Complex64::new(0.0, -1.0), ZERO],
            ])
            .unwrap(),
        )
        .unwrap();
        let t = 0.4f64;
        let u = unitary_exp(&h, t).unwrap();
        let expected = CMatrix::from_rows(&[
            vec![ONE * t.cos(), -ONE * t.sin()],
            vec![ONE * t.sin(), ONE * t.cos()],
        ])
        .unwrap();
        assert!((&u - &expected).frobenius_norm() < 1e-14);
    }
}
