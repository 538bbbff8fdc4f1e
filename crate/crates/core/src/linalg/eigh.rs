//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation acts on a `(p, q)` pivot with `a_pq = r e^{i phi}` through
//!
//! ```text
//! J = [ c            s e^{i phi} ]
//!     [ -s e^{-i phi}     c      ]
//! ```
//!
//! which is the real Jacobi rotation conjugated by the phase that makes the
//! pivot real. Sweeps stop once the off-diagonal Frobenius norm falls below
//! `1e-14 * ||m||_F`.

use num_complex::Complex64;

use super::matrix::{CMatrix, HermitianMatrix, ZERO};
use crate::error::{QcrbError, Result};

pub const MAX_SWEEPS: usize = 100;
pub const OFF_DIAGONAL_REL_TOL: f64 = 1e-14;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `U f(diag(lambda)) U*`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.reconstruct_with(&mapped)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(&self.values)
    }

    fn reconstruct_with(&self, diag: &[f64]) -> HermitianMatrix {
        let n = self.dim();
        let u = &self.vectors;
        let m = CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| u[(i, k)] * diag[k] * u[(j, k)].conj())
                .sum::<Complex64>()
        });
        HermitianMatrix::hermitian_part(&m)
    }

    /// `U* m U`, the representation of `m` in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        let ua = self.vectors.adjoint();
        &(&ua * m) * &self.vectors
    }

    /// `U m U*`.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        let ua = self.vectors.adjoint();
        &(&self.vectors * m) * &ua
    }

    /// `||U* U - I||_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let g = &self.vectors.adjoint() * &self.vectors;
        (&g - &CMatrix::identity(n)).frobenius_norm()
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending. Each eigenvector's phase is fixed so that
/// its largest-magnitude component is real and positive, ties resolved to
/// the lowest index.
pub fn eigh(m: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    let frob = a.frobenius_norm();
    let threshold = OFF_DIAGONAL_REL_TOL * frob;

    let mut converged = off_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_norm(&a) <= threshold;
    }
    if !converged {
        return Err(QcrbError::NoConvergence {
            sweeps,
            off_norm: off_norm(&a),
            frobenius: frob,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    for j in 0..n {
        fix_phase(&mut vectors, j);
    }
    Ok(SpectralDecomposition { values, vectors })
}

fn off_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / r;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on rows/cols (p, q)
    let jpp = Complex64::new(c, 0.0);
    let jpq = phase * s;
    let jqp = -phase.conj() * s;
    let jqq = Complex64::new(c, 0.0);

    let n = a.dim();
    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A <- J* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn fix_phase(vectors: &mut CMatrix, col: usize) {
    let n = vectors.dim();
    let max = (0..n).map(|i| vectors[(i, col)].norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = (0..n)
        .find(|&i| vectors[(i, col)].norm() >= max - 1e-12)
        .unwrap_or(0);
    let z = vectors[(pivot, col)];
    let rot = z.conj() / z.norm();
    for i in 0..n {
        vectors[(i, col)] *= rot;
    }
    vectors[(pivot, col)].im = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_decomposes(m: &HermitianMatrix) -> SpectralDecomposition {
        let eig = eigh(m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        assert!(eig.orthonormality_defect() <= 1e-10);
        assert!(eig.reconstruct().frobenius_distance(m) <= 1e-10 * scale);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        eig
    }

    #[test]
    fn diagonal_input_is_returned_as_is() {
        let m = HermitianMatrix::from_real_diagonal(&[0.3, 0.7]);
        let eig = assert_decomposes(&m);
        assert_eq!(eig.values, vec![0.3, 0.7]);
        assert_eq!(eig.vectors, CMatrix::identity(2));
    }

    #[test]
    fn degenerate_identity() {
        let eig = assert_decomposes(&HermitianMatrix::identity(3));
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let eig = assert_decomposes(&x);
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_has_complex_eigenvectors() {
        let y = HermitianMatrix::new(
            CMatrix::from_rows(&[
                vec![ZERO, Complex64::new(0.0, -1.0)],
                vec![Complex64::new(0.0, 1.0), ZERO],
            ])
            .unwrap(),
        )
        .unwrap();
        let eig = assert_decomposes(&y);
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        // phase convention: largest component real and positive
        for k in 0..2 {
            let col = eig.eigenvector(k);
            let pivot = col
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap()
                .0;
            assert!(col[pivot].re >= 0.0);
        }
    }

    #[test]
    fn zero_matrix() {
        let eig = assert_decomposes(&HermitianMatrix::zeros(4));
        assert!(eig.values.iter().all(|&l| l == 0.0));
    }
}
