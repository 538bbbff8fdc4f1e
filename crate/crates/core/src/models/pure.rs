use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::frame::SmoothFrame;
use crate::error::Result;
use crate::linalg::{HermitianMatrix, UnitVector};

pub type VectorFn = Arc<dyn Fn(f64) -> Vec<Complex64> + Send + Sync>;

/// Family of unit vectors `theta -> |psi(theta)>`, optionally with an
/// analytic derivative.
#[derive(Clone)]
pub struct PureFamily {
    name: String,
    dim: usize,
    psi: VectorFn,
    dpsi: Option<VectorFn>,
}

impl fmt::Debug for PureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PureFamily")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("analytic_derivative", &self.dpsi.is_some())
            .finish()
    }
}

impl PureFamily {
    pub fn from_fns(
        name: impl Into<String>,
        dim: usize,
        psi: VectorFn,
        dpsi: Option<VectorFn>,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            psi,
            dpsi,
        }
    }

    /// `(cos theta, sin theta)`.
    pub fn rotation() -> Self {
        Self::from_fns(
            "rotation",
            2,
            Arc::new(|t: f64| vec![Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)]),
            Some(Arc::new(|t: f64| {
                vec![Complex64::new(-t.sin(), 0.0), Complex64::new(t.cos(), 0.0)]
            })),
        )
    }

    /// `(cos theta, i sin theta)`.
    pub fn phase_rotation() -> Self {
        Self::from_fns(
            "phase-rotation",
            2,
            Arc::new(|t: f64| vec![Complex64::new(t.cos(), 0.0), Complex64::new(0.0, t.sin())]),
            Some(Arc::new(|t: f64| {
                vec![Complex64::new(-t.sin(), 0.0), Complex64::new(0.0, t.cos())]
            })),
        )
    }

    pub fn constant(state: UnitVector) -> Self {
        let v = state.into_vec();
        let dim = v.len();
        let zero = vec![Complex64::new(0.0, 0.0); dim];
        Self::from_fns(
            "constant",
            dim,
            Arc::new(move |_| v.clone()),
            Some(Arc::new(move |_| zero.clone())),
        )
    }

    /// `exp(theta K) psi0` with random skew-Hermitian `K` and random `psi0`,
    /// both drawn from a ChaCha8 stream seeded with `seed`.
    pub fn random_smooth(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = Arc::new(SmoothFrame::random(dim, 1.0, &mut rng));
        let f2 = Arc::clone(&frame);
        Self::from_fns(
            format!("random-smooth({seed}, {dim})"),
            dim,
            Arc::new(move |t| frame.at(t).column(0)),
            Some(Arc::new(move |t| f2.derivative(t).column(0))),
        )
    }

    /// Drops the analytic derivative so every consumer takes the
    /// finite-difference route.
    pub fn without_derivative(mut self) -> Self {
        self.dpsi = None;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.dpsi.is_some()
    }

    pub fn psi(&self, theta: f64) -> Result<UnitVector> {
        let v = (self.psi)(theta);
        if v.len() != self.dim {
            return Err(crate::QcrbError::Dimension {
                expected: self.dim,
                found: v.len(),
            });
        }
        UnitVector::new(v)
    }

    pub fn projector(&self, theta: f64) -> Result<HermitianMatrix> {
        Ok(self.psi(theta)?.projector())
    }

    /// Analytic `|psi'><psi| + |psi><psi'|`, if the family has `dpsi`.
    pub fn analytic_dprojector(&self, theta: f64) -> Option<Result<HermitianMatrix>> {
        let dpsi = self.dpsi.as_ref()?;
        Some(
            self.psi(theta)
                .map(|psi| HermitianMatrix::symmetric_outer(&dpsi(theta), psi.as_slice())),
        )
    }

    /// Analytic projector derivative when available, central difference
    /// with step `h` otherwise.
    pub fn dprojector(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        match self.analytic_dprojector(theta) {
            Some(r) => r,
            None => self.fd_dprojector(theta, h),
        }
    }

    pub fn fd_dprojector(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        let plus = self.projector(theta + h)?;
        let minus = self.projector(theta - h)?;
        Ok(plus.sub(&minus).scale(0.5 / h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_projector_derivative_matches_symbolic() {
        // d/dtheta [[cos^2, cs],[cs, sin^2]] = [[-sin 2t, cos 2t],[cos 2t, sin 2t]]
        let fam = PureFamily::rotation();
        for &t in &[0.0, 0.3, 1.1, -0.7] {
            let d = fam.dprojector(t, 1e-5).unwrap();
            let expected = HermitianMatrix::from_real_rows(&[
                vec![-(2.0 * t).sin(), (2.0 * t).cos()],
                vec![(2.0 * t).cos(), (2.0 * t).sin()],
            ])
            .unwrap();
            assert!(d.frobenius_distance(&expected) < 1e-14);
        }
    }

    #[test]
    fn random_smooth_is_normalized() {
        let fam = PureFamily::random_smooth(5, 42);
        for &t in &[-2.0, 0.0, 0.9] {
            assert!(fam.psi(t).is_ok());
        }
    }

    #[test]
    fn analytic_and_fd_derivatives_agree() {
        let fam = PureFamily::random_smooth(3, 7);
        let a = fam.dprojector(0.4, 1e-5).unwrap();
        let f = fam.fd_dprojector(0.4, 1e-5).unwrap();
        assert!(a.frobenius_distance(&f) < 1e-7);
    }
}
