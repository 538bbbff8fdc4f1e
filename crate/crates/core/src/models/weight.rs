use std::fmt;
use std::sync::Arc;

use crate::error::{QcrbError, Result};

/// Weights outside `(WEIGHT_EPS, 1 - WEIGHT_EPS)` are rejected.
pub const WEIGHT_EPS: f64 = 1e-12;
/// Ratio above which the sampled boundary-regularity proxy is flagged.
pub const BOUNDARY_RATIO_LIMIT: f64 = 1e6;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Mixing coefficient `w(theta)` of a two-component mixture.
#[derive(Clone)]
pub enum WeightFunction {
    Constant(f64),
    /// `(1 + amplitude sin theta) / 2`
    Sine {
        amplitude: f64,
    },
    /// `1 / (1 + exp(-(slope theta + offset)))`
    Logistic {
        slope: f64,
        offset: f64,
    },
    Custom {
        w: ScalarFn,
        dw: Option<ScalarFn>,
    },
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Sine { amplitude } => write!(f, "Sine {{ amplitude: {amplitude} }}"),
            Self::Logistic { slope, offset } => {
                write!(f, "Logistic {{ slope: {slope}, offset: {offset} }}")
            }
            Self::Custom { dw, .. } => write!(f, "Custom {{ analytic: {} }}", dw.is_some()),
        }
    }
}

/// `w(theta)` and `w'(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightValue {
    pub w: f64,
    pub dw: f64,
}

impl WeightFunction {
    fn raw(&self, theta: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Sine { amplitude } => 0.5 * (1.0 + amplitude * theta.sin()),
            Self::Logistic { slope, offset } => 1.0 / (1.0 + (-(slope * theta + offset)).exp()),
            Self::Custom { w, .. } => w(theta),
        }
    }

    fn raw_derivative(&self, theta: f64, h: f64) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Sine { amplitude } => 0.5 * amplitude * theta.cos(),
            Self::Logistic { slope, .. } => {
                let w = self.raw(theta);
                slope * w * (1.0 - w)
            }
            Self::Custom { dw: Some(dw), .. } => dw(theta),
            Self::Custom { w, dw: None } => (w(theta + h) - w(theta - h)) / (2.0 * h),
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        !matches!(self, Self::Custom { dw: None, .. })
    }

    /// Evaluates `w` and `w'`; `h` is only used by custom weights without an
    /// analytic derivative.
    pub fn eval(&self, theta: f64, h: f64) -> Result<WeightValue> {
        let w = self.raw(theta);
        if !(w > WEIGHT_EPS && w < 1.0 - WEIGHT_EPS) {
            return Err(QcrbError::Domain(format!(
                "weight w({theta}) = {w} is outside (0, 1)"
            )));
        }
        Ok(WeightValue {
            w,
            dw: self.raw_derivative(theta, h),
        })
    }

    /// Largest `|w'| / min(sqrt(w), sqrt(1 - w))` over the grid, as a
    /// sampled proxy for `w'` vanishing at least as fast as the square
    /// roots near the boundary. Points where `w` itself is rejected are
    /// skipped.
    pub fn boundary_ratio(&self, grid: &[f64], h: f64) -> f64 {
        grid.iter()
            .filter_map(|&t| self.eval(t, h).ok())
            .map(|v| v.dw.abs() / v.w.sqrt().min((1.0 - v.w).sqrt()))
            .fold(0.0, f64::max)
    }

    pub fn check_boundary_regularity(&self, grid: &[f64], h: f64) -> Result<f64> {
        let ratio = self.boundary_ratio(grid, h);
        if ratio > BOUNDARY_RATIO_LIMIT {
            return Err(QcrbError::Domain(format!(
                "weight derivative grows like {ratio:e} relative to sqrt(w(1-w)) near the boundary"
            )));
        }
        Ok(ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_weight_at_zero() {
        let v = WeightFunction::Sine { amplitude: 1.0 }
            .eval(0.0, 1e-5)
            .unwrap();
        assert_eq!(v, WeightValue { w: 0.5, dw: 0.5 });
    }

    #[test]
    fn boundary_values_are_rejected() {
        assert!(WeightFunction::Constant(1.0).eval(0.0, 1e-5).is_err());
        assert!(WeightFunction::Constant(0.0).eval(0.0, 1e-5).is_err());
        let sine = WeightFunction::Sine { amplitude: 1.0 };
        assert!(sine.eval(std::f64::consts::FRAC_PI_2, 1e-5).is_err());
    }

    #[test]
    fn logistic_derivative_matches_fd() {
        let wf = WeightFunction::Logistic {
            slope: 1.3,
            offset: -0.2,
        };
        let t = 0.37;
        let h = 1e-5;
        let fd = (wf.raw(t + h) - wf.raw(t - h)) / (2.0 * h);
        assert!((wf.eval(t, h).unwrap().dw - fd).abs() < 1e-9);
    }

    #[test]
    fn sine_weight_is_boundary_regular() {
        let edge = 0.999 * std::f64::consts::FRAC_PI_2;
        let grid: Vec<f64> = (0..=200)
            .map(|k| -edge + 2.0 * edge * k as f64 / 200.0)
            .collect();
        let ratio = WeightFunction::Sine { amplitude: 1.0 }
            .check_boundary_regularity(&grid, 1e-5)
            .unwrap();
        assert!(ratio < 2.0);
    }

    #[test]
    fn irregular_custom_weight_is_flagged() {
        // w = t^4 near 0 with a derivative that does not vanish
        let wf = WeightFunction::Custom {
            w: Arc::new(|t: f64| t.powi(4) + 1e-15),
            dw: Some(Arc::new(|_| 100.0)),
        };
        let grid = [2e-3, 5e-3];
        assert!(wf.check_boundary_regularity(&grid, 1e-5).is_err());
    }
}
