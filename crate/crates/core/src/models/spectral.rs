use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frame::SmoothFrame;
use crate::error::{QcrbError, Result};
use crate::linalg::HermitianMatrix;

pub const SPECTRUM_SUM_TOL: f64 = 1e-10;

pub type SpectrumFn = Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Eigenvalue path `theta -> lambda(theta)` together with its derivative.
#[derive(Clone)]
pub enum Spectrum {
    Constant(Vec<f64>),
    /// `lambda = softmax(offsets + amplitudes * sin theta)`
    Softmax {
        offsets: Vec<f64>,
        amplitudes: Vec<f64>,
    },
    /// Returns `(lambda, dlambda)`.
    Custom {
        dim: usize,
        f: SpectrumFn,
    },
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(l) => write!(f, "Constant({l:?})"),
            Self::Softmax {
                offsets,
                amplitudes,
            } => f
                .debug_struct("Softmax")
                .field("offsets", offsets)
                .field("amplitudes", amplitudes)
                .finish(),
            Self::Custom { dim, .. } => write!(f, "Custom {{ dim: {dim} }}"),
        }
    }
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        match self {
            Self::Constant(l) => l.len(),
            Self::Softmax { offsets, .. } => offsets.len(),
            Self::Custom { dim, .. } => *dim,
        }
    }

    /// Validates a fixed probability vector.
    pub fn constant(lambdas: Vec<f64>) -> Result<Self> {
        validate_probabilities(&lambdas)?;
        Ok(Self::Constant(lambdas))
    }

    pub fn eval(&self, theta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (l, dl) = match self {
            Self::Constant(l) => (l.clone(), vec![0.0; l.len()]),
            Self::Softmax {
                offsets,
                amplitudes,
            } => {
                let s = theta.sin();
                let c = theta.cos();
                let logits: Vec<f64> = offsets
                    .iter()
                    .zip(amplitudes)
                    .map(|(o, a)| o + a * s)
                    .collect();
                let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = logits.iter().map(|x| (x - max).exp()).collect();
                let z: f64 = e.iter().sum();
                let l: Vec<f64> = e.iter().map(|x| x / z).collect();
                let mean_slope: f64 = l.iter().zip(amplitudes).map(|(li, a)| li * a * c).sum();
                let dl = l
                    .iter()
                    .zip(amplitudes)
                    .map(|(li, a)| li * (a * c - mean_slope))
                    .collect();
                (l, dl)
            }
            Self::Custom { f, .. } => f(theta),
        };
        validate_probabilities(&l)?;
        let dsum: f64 = dl.iter().sum();
        if dsum.abs() > 1e-8 {
            return Err(QcrbError::InvalidSpectrum(format!(
                "eigenvalue derivatives sum to {dsum:e}"
            )));
        }
        Ok((l, dl))
    }
}

fn validate_probabilities(l: &[f64]) -> Result<()> {
    if l.is_empty() {
        return Err(QcrbError::InvalidSpectrum("empty spectrum".into()));
    }
    if let Some(bad) = l.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(QcrbError::InvalidSpectrum(format!(
            "eigenvalue {bad} outside [0, 1]"
        )));
    }
    let sum: f64 = l.iter().sum();
    if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
        return Err(QcrbError::InvalidSpectrum(format!(
            "eigenvalues sum to {sum}"
        )));
    }
    Ok(())
}

/// `rho(theta) = sum_l lambda_l(theta) rho_l(theta)` with rank-one projectors
/// taken from the columns of a smooth orthonormal frame.
#[derive(Debug, Clone)]
pub struct SpectralMixtureModel {
    pub spectrum: Spectrum,
    pub frame: SmoothFrame,
}

/// Everything the spectral closed forms need at one `theta`.
#[derive(Debug, Clone)]
pub struct SpectralPoint {
    pub lambdas: Vec<f64>,
    pub dlambdas: Vec<f64>,
    pub projectors: Vec<HermitianMatrix>,
    pub dprojectors: Vec<HermitianMatrix>,
}

impl SpectralPoint {
    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn rho(&self) -> HermitianMatrix {
        let n = self.dim();
        self.projectors
            .iter()
            .zip(&self.lambdas)
            .fold(HermitianMatrix::zeros(n), |acc, (p, l)| {
                acc.add_scaled(*l, p)
            })
    }

    pub fn drho(&self) -> HermitianMatrix {
        let n = self.dim();
        let mut acc = HermitianMatrix::zeros(n);
        for l in 0..n {
            acc = acc
                .add_scaled(self.dlambdas[l], &self.projectors[l])
                .add_scaled(self.lambdas[l], &self.dprojectors[l]);
        }
        acc
    }
}

impl SpectralMixtureModel {
    pub fn new(spectrum: Spectrum, frame: SmoothFrame) -> Result<Self> {
        if spectrum.dim() != frame.dim() {
            return Err(QcrbError::Dimension {
                expected: frame.dim(),
                found: spectrum.dim(),
            });
        }
        Ok(Self { spectrum, frame })
    }

    /// Seeded random model: softmax spectrum with logits in `[-1, 1]` and
    /// amplitudes in `[-0.5, 0.5]`, random frame generator and start frame.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let amplitudes = (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect();
        let frame = SmoothFrame::random(dim, 0.5, &mut rng);
        Self::new(
            Spectrum::Softmax {
                offsets,
                amplitudes,
            },
            frame,
        )
        .expect("dimensions agree by construction")
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn point(&self, theta: f64) -> Result<SpectralPoint> {
        let (lambdas, dlambdas) = self.spectrum.eval(theta)?;
        Ok(SpectralPoint {
            lambdas,
            dlambdas,
            projectors: self.frame.projectors(theta),
            dprojectors: self.frame.projector_derivatives(theta),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_derivative_matches_fd() {
        let s = Spectrum::Softmax {
            offsets: vec![0.2, -0.4, 0.9],
            amplitudes: vec![0.3, -0.1, 0.25],
        };
        let (t, h) = (0.6, 1e-5);
        let (_, dl) = s.eval(t).unwrap();
        let (lp, _) = s.eval(t + h).unwrap();
        let (lm, _) = s.eval(t - h).unwrap();
        for k in 0..3 {
            assert!(((lp[k] - lm[k]) / (2.0 * h) - dl[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_spectrum_validation() {
        assert!(Spectrum::constant(vec![0.7, 0.2, 0.1]).is_ok());
        assert!(Spectrum::constant(vec![0.7, 0.2]).is_err());
        assert!(Spectrum::constant(vec![1.2, -0.2]).is_err());
    }

    #[test]
    fn random_model_projectors_are_orthogonal() {
        let m = SpectralMixtureModel::random(4, 9);
        let p = m.point(0.25).unwrap();
        for l in 0..4 {
            for k in 0..4 {
                let expected = if l == k { 1.0 } else { 0.0 };
                assert!((p.projectors[l].trace_inner(&p.projectors[k]) - expected).abs() < 1e-10);
            }
        }
        assert!((p.rho().trace() - 1.0).abs() < 1e-12);
        assert!(p.drho().trace().abs() < 1e-12);
    }
}
