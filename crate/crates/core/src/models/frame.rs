use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{eigh, CMatrix, HermitianMatrix, SpectralDecomposition};

/// Smooth orthonormal frame `U(theta) = exp(theta K) U0` with skew-Hermitian
/// `K = i H`. Columns stay orthonormal for every `theta` and never cross.
#[derive(Debug, Clone)]
pub struct SmoothFrame {
    generator: HermitianMatrix,
    generator_eig: SpectralDecomposition,
    base: CMatrix,
}

impl SmoothFrame {
    /// `generator` is `H`; the frame moves along `exp(i theta H)`.
    pub fn new(generator: HermitianMatrix, base: CMatrix) -> Result<Self> {
        if generator.dim() != base.dim() {
            return Err(crate::QcrbError::Dimension {
                expected: generator.dim(),
                found: base.dim(),
            });
        }
        let generator_eig = eigh(&generator)?;
        Ok(Self {
            generator,
            generator_eig,
            base,
        })
    }

    /// Real rotation in the `(0, 1)` plane: column 0 is `(cos t, sin t, 0, ...)`.
    pub fn plane_rotation(dim: usize) -> Self {
        let mut k = CMatrix::zeros(dim);
        k[(0, 1)] = Complex64::new(0.0, 1.0);
        k[(1, 0)] = Complex64::new(0.0, -1.0);
        let h = HermitianMatrix::new(k).expect("generator is Hermitian");
        Self::new(h, CMatrix::identity(dim)).expect("dimensions agree")
    }

    /// Random generator and random unitary starting frame.
    pub fn random<R: Rng>(dim: usize, generator_scale: f64, rng: &mut R) -> Self {
        let h = random_hermitian(dim, rng).scale(generator_scale);
        let base = random_unitary(dim, rng);
        Self::new(h, base).expect("random frame is well formed")
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn generator(&self) -> &HermitianMatrix {
        &self.generator
    }

    fn propagator(&self, theta: f64) -> CMatrix {
        let eig = &self.generator_eig;
        let n = eig.dim();
        let u = &eig.vectors;
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| {
                    u[(i, k)] * Complex64::from_polar(1.0, theta * eig.values[k]) * u[(j, k)].conj()
                })
                .sum()
        })
    }

    pub fn at(&self, theta: f64) -> CMatrix {
        &self.propagator(theta) * &self.base
    }

    /// `dU/dtheta = i H U(theta)`.
    pub fn derivative(&self, theta: f64) -> CMatrix {
        let u = self.at(theta);
        (self.generator.as_matrix() * &u).scale_complex(Complex64::new(0.0, 1.0))
    }

    pub fn projectors(&self, theta: f64) -> Vec<HermitianMatrix> {
        let u = self.at(theta);
        (0..self.dim())
            .map(|l| HermitianMatrix::projector(&u.column(l)))
            .collect()
    }

    pub fn projector_derivatives(&self, theta: f64) -> Vec<HermitianMatrix> {
        let u = self.at(theta);
        let du = (self.generator.as_matrix() * &u).scale_complex(Complex64::new(0.0, 1.0));
        (0..self.dim())
            .map(|l| HermitianMatrix::symmetric_outer(&du.column(l), &u.column(l)))
            .collect()
    }
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// GUE-distributed Hermitian matrix.
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let g = CMatrix::from_fn(dim, |_, _| gaussian_complex(rng));
    HermitianMatrix::hermitian_part(&g)
}

/// Eigenvector matrix of a GUE draw.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    eigh(&random_hermitian(dim, rng))
        .expect("Jacobi converges on small random matrices")
        .vectors
}

/// `B B*` with complex Gaussian `B`.
pub fn random_psd<R: Rng>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let b = CMatrix::from_fn(dim, |_, _| gaussian_complex(rng));
    HermitianMatrix::hermitian_part(&(&b * &b.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_stays_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SmoothFrame::random(4, 1.0, &mut rng);
        for &t in &[-1.0, 0.0, 0.5, 2.0] {
            let u = f.at(t);
            let g = &u.adjoint() * &u;
            assert!((&g - &CMatrix::identity(4)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = SmoothFrame::random(3, 0.7, &mut rng);
        let (t, h) = (0.3, 1e-5);
        let fd = (&f.at(t + h) - &f.at(t - h)).scale(0.5 / h);
        assert!((&fd - &f.derivative(t)).frobenius_norm() < 1e-8);
    }

    #[test]
    fn plane_rotation_first_column() {
        let f = SmoothFrame::plane_rotation(2);
        let u = f.at(0.4);
        assert!((u[(0, 0)].re - 0.4f64.cos()).abs() < 1e-15);
        assert!((u[(1, 0)].re - 0.4f64.sin()).abs() < 1e-15);
    }
}
