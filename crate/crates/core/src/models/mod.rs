//! Parametric state families `theta -> rho(theta)` with derivative access.
//!
//! Every family can be evaluated through [`StateModel`]; derivatives are
//! analytic when the family provides them and central differences
//! otherwise.

mod catalog;
mod frame;
mod pure;
mod qubit;
mod spectral;
mod weight;

use std::fmt;
use std::sync::Arc;

pub use catalog::{builtin, builtin_models, builtin_names};
pub use frame::{random_hermitian, random_psd, random_unitary, SmoothFrame};
pub use pure::{PureFamily, VectorFn};
pub use qubit::{
    canonical_psi2, pure_helstrom, QubitMixtureModel, SecondState, ORTHOGONALITY_TOL,
    STATIONARY_TOL,
};
pub use spectral::{SpectralMixtureModel, SpectralPoint, Spectrum, SpectrumFn};
pub use weight::{ScalarFn, WeightFunction, WeightValue, BOUNDARY_RATIO_LIMIT, WEIGHT_EPS};

use crate::error::{QcrbError, Result};
use crate::linalg::{DensityMatrix, HermitianMatrix, SUPPORT_TOL};

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Derivatives of unit-trace families must be traceless to this tolerance.
pub const DERIVATIVE_TRACE_TOL: f64 = 1e-8;

/// How derivatives of `rho` are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivOptions {
    pub step: f64,
    /// Ignore analytic derivatives and difference `rho` directly.
    pub force_finite_difference: bool,
}

impl Default for DerivOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_FD_STEP,
            force_finite_difference: false,
        }
    }
}

impl DerivOptions {
    pub fn finite_difference(step: f64) -> Self {
        Self {
            step,
            force_finite_difference: true,
        }
    }
}

pub type MatrixFn = Arc<dyn Fn(f64) -> Result<HermitianMatrix> + Send + Sync>;

/// User-supplied `rho(theta)` with an optional analytic derivative.
#[derive(Clone)]
pub struct CustomModel {
    pub dim: usize,
    pub rho: MatrixFn,
    pub drho: Option<MatrixFn>,
}

impl fmt::Debug for CustomModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomModel")
            .field("dim", &self.dim)
            .field("analytic_derivative", &self.drho.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Family {
    Pure(PureFamily),
    QubitMixture(QubitMixtureModel),
    Spectral(SpectralMixtureModel),
    Custom(CustomModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Pure,
    QubitMixture,
    Spectral,
    Custom,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pure => "pure",
            Self::QubitMixture => "qubit_mixture",
            Self::Spectral => "spectral",
            Self::Custom => "custom",
        }
    }
}

/// Which route produced a derivative of `sqrt(rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtRoute {
    /// Solve `sqrt(rho) X + X sqrt(rho) = rho'` in the eigenbasis of `rho`.
    EigenSolve,
    /// Central difference of the PSD square root.
    FiniteDifference,
}

#[derive(Debug, Clone)]
pub struct SqrtDerivative {
    pub matrix: HermitianMatrix,
    pub route: SqrtRoute,
    /// The eigenbasis solve was inconsistent and the finite-difference route
    /// was used instead.
    pub fell_back: bool,
}

/// A named parametric family on a closed `theta` interval.
#[derive(Debug, Clone)]
pub struct StateModel {
    name: String,
    family: Family,
    domain: (f64, f64),
}

impl StateModel {
    pub fn new(name: impl Into<String>, family: Family) -> Self {
        Self {
            name: name.into(),
            family,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo, hi);
        self
    }

    pub fn pure(family: PureFamily) -> Self {
        Self::new(family.name().to_string(), Family::Pure(family))
    }

    pub fn qubit_mixture(name: impl Into<String>, model: QubitMixtureModel) -> Self {
        Self::new(name, Family::QubitMixture(model))
    }

    pub fn spectral(name: impl Into<String>, model: SpectralMixtureModel) -> Self {
        Self::new(name, Family::Spectral(model))
    }

    pub fn custom(name: impl Into<String>, model: CustomModel) -> Self {
        Self::new(name, Family::Custom(model))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn kind(&self) -> ModelKind {
        match self.family {
            Family::Pure(_) => ModelKind::Pure,
            Family::QubitMixture(_) => ModelKind::QubitMixture,
            Family::Spectral(_) => ModelKind::Spectral,
            Family::Custom(_) => ModelKind::Custom,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.family {
            Family::Pure(f) => f.dim(),
            Family::QubitMixture(_) => 2,
            Family::Spectral(m) => m.dim(),
            Family::Custom(c) => c.dim,
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        match &self.family {
            Family::Pure(f) => f.has_analytic_derivative(),
            Family::QubitMixture(m) => m.has_analytic_derivative(),
            Family::Spectral(_) => true,
            Family::Custom(c) => c.drho.is_some(),
        }
    }

    /// Five evaluation points spread over the domain (or over `[-1.2, 1.2]`
    /// intersected with it), used by the verification suite.
    pub fn sample_grid(&self) -> Vec<f64> {
        let lo = self.domain.0.max(-1.2);
        let hi = self.domain.1.min(1.2);
        let pad = 0.05 * (hi - lo);
        let (lo, hi) = (lo + pad, hi - pad);
        (0..5)
            .map(|k| lo + (hi - lo) * (k as f64 + 0.37) / 5.0)
            .collect()
    }

    fn check_domain(&self, theta: f64) -> Result<()> {
        if !theta.is_finite() || theta < self.domain.0 || theta > self.domain.1 {
            return Err(QcrbError::Domain(format!(
                "theta = {theta} outside [{}, {}] for model {}",
                self.domain.0, self.domain.1, self.name
            )));
        }
        Ok(())
    }

    fn raw_rho(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        match &self.family {
            Family::Pure(f) => f.projector(theta),
            Family::QubitMixture(m) => m.rho(theta, h),
            Family::Spectral(m) => Ok(m.point(theta)?.rho()),
            Family::Custom(c) => (c.rho)(theta),
        }
    }

    fn analytic_drho(&self, theta: f64, h: f64) -> Option<Result<HermitianMatrix>> {
        match &self.family {
            Family::Pure(f) => f.analytic_dprojector(theta),
            Family::QubitMixture(m) if m.has_analytic_derivative() => Some(m.drho(theta, h)),
            Family::QubitMixture(_) => None,
            Family::Spectral(m) => Some(m.point(theta).map(|p| p.drho())),
            Family::Custom(c) => c.drho.as_ref().map(|d| d(theta)),
        }
    }

    /// `rho(theta)` as a validated density matrix.
    pub fn rho_at(&self, theta: f64) -> Result<DensityMatrix> {
        self.check_domain(theta)?;
        let raw = self.raw_rho(theta, DEFAULT_FD_STEP)?;
        if raw.dim() != self.dim() {
            return Err(QcrbError::Dimension {
                expected: self.dim(),
                found: raw.dim(),
            });
        }
        DensityMatrix::new(raw)
    }

    /// `d rho / d theta`, analytic when available unless the options force
    /// the central difference `(rho(theta+h) - rho(theta-h)) / 2h`.
    pub fn drho_at(&self, theta: f64, opts: &DerivOptions) -> Result<HermitianMatrix> {
        self.check_domain(theta)?;
        let d = match self.analytic_drho(theta, opts.step) {
            Some(d) if !opts.force_finite_difference => d?,
            _ => self.fd_drho(theta, opts.step)?,
        };
        let tr = d.trace();
        if tr.abs() > DERIVATIVE_TRACE_TOL {
            return Err(QcrbError::InvalidDensity(format!(
                "derivative of rho has trace {tr:e}"
            )));
        }
        Ok(d)
    }

    fn fd_drho(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        if !(h > 0.0) {
            return Err(QcrbError::Domain(format!(
                "finite-difference step {h} must be > 0"
            )));
        }
        let plus = self.rho_at(theta + h)?;
        let minus = self.rho_at(theta - h)?;
        Ok(plus.matrix().sub(minus.matrix()).scale(0.5 / h))
    }

    /// Derivative of `rho(theta)^{1/2}` by the requested route. An
    /// inconsistent eigenbasis solve falls back to finite differences.
    pub fn dsqrt_rho_at(
        &self,
        theta: f64,
        route: SqrtRoute,
        opts: &DerivOptions,
    ) -> Result<SqrtDerivative> {
        match route {
            SqrtRoute::FiniteDifference => Ok(SqrtDerivative {
                matrix: self.fd_dsqrt(theta, opts.step)?,
                route,
                fell_back: false,
            }),
            SqrtRoute::EigenSolve => {
                let rho = self.rho_at(theta)?;
                let drho = self.drho_at(theta, opts)?;
                match rho.solve_sqrt_sylvester(&drho, SUPPORT_TOL) {
                    Ok(sol) => Ok(SqrtDerivative {
                        matrix: sol.solution,
                        route,
                        fell_back: false,
                    }),
                    Err(QcrbError::RankDeficientInconsistent { max_dropped }) => {
                        log::warn!(
                            "model {}: sqrt-derivative solve inconsistent at theta = {theta} \
                             (dropped {max_dropped:e}); using finite differences",
                            self.name
                        );
                        Ok(SqrtDerivative {
                            matrix: self.fd_dsqrt(theta, opts.step)?,
                            route: SqrtRoute::FiniteDifference,
                            fell_back: true,
                        })
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }

    fn fd_dsqrt(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        if !(h > 0.0) {
            return Err(QcrbError::Domain(format!(
                "finite-difference step {h} must be > 0"
            )));
        }
        let plus = self.rho_at(theta + h)?.sqrt();
        let minus = self.rho_at(theta - h)?.sqrt();
        Ok(plus.sub(&minus).scale(0.5 / h))
    }
}
