use num_complex::Complex64;

use super::pure::PureFamily;
use super::weight::{WeightFunction, WeightValue};
use crate::error::{QcrbError, Result};
use crate::linalg::{inner, HermitianMatrix, UnitVector};

/// Orthogonality tolerance for `<psi1|psi2>`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// `I_H1` at or below this makes the canonical second state undefined.
pub const STATIONARY_TOL: f64 = 1e-12;

/// How the second pure state of a qubit mixture is chosen.
#[derive(Debug, Clone)]
pub enum SecondState {
    /// `|psi2> = I_H1^{-1/2} L1 |psi1>` with `L1 = 2 rho1'` the SLD of `rho1`.
    Canonical,
    Explicit(PureFamily),
}

/// `rho(theta) = w rho1 + (1 - w) rho2` with orthogonal pure `rho1`, `rho2`
/// on a two-dimensional space.
#[derive(Debug, Clone)]
pub struct QubitMixtureModel {
    pub psi1: PureFamily,
    pub weight: WeightFunction,
    pub psi2: SecondState,
}

/// `I_H1(theta) = 2 tr(rho1'^2)` for a pure family.
pub fn pure_helstrom(family: &PureFamily, theta: f64, h: f64) -> Result<f64> {
    let d = family.dprojector(theta, h)?;
    Ok(2.0 * d.trace_inner(&d))
}

/// Canonical orthogonal partner `I_H1^{-1/2} L1 |psi1>`, where `L1 = 2 rho1'`.
pub fn canonical_psi2(psi1: &PureFamily, theta: f64, h: f64) -> Result<UnitVector> {
    let psi = psi1.psi(theta)?;
    let d = psi1.dprojector(theta, h)?;
    let info = 2.0 * d.trace_inner(&d);
    if info <= STATIONARY_TOL {
        return Err(QcrbError::StationaryFamily { theta, info });
    }
    let raw: Vec<Complex64> = d
        .as_matrix()
        .mul_vec(psi.as_slice())
        .into_iter()
        .map(|z| z * (2.0 / info.sqrt()))
        .collect();
    let v = UnitVector::normalized(raw)?;
    let overlap = inner(psi.as_slice(), v.as_slice()).norm();
    if overlap > ORTHOGONALITY_TOL {
        return Err(QcrbError::Domain(format!(
            "canonical psi2 overlaps psi1 by {overlap:e}"
        )));
    }
    Ok(v)
}

impl QubitMixtureModel {
    pub fn new(psi1: PureFamily, weight: WeightFunction, psi2: SecondState) -> Result<Self> {
        if psi1.dim() != 2 {
            return Err(QcrbError::Dimension {
                expected: 2,
                found: psi1.dim(),
            });
        }
        if let SecondState::Explicit(f) = &psi2 {
            if f.dim() != 2 {
                return Err(QcrbError::Dimension {
                    expected: 2,
                    found: f.dim(),
                });
            }
        }
        Ok(Self { psi1, weight, psi2 })
    }

    pub fn canonical(psi1: PureFamily, weight: WeightFunction) -> Result<Self> {
        Self::new(psi1, weight, SecondState::Canonical)
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.psi2, SecondState::Canonical)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        let second = match &self.psi2 {
            SecondState::Canonical => true,
            SecondState::Explicit(f) => f.has_analytic_derivative(),
        };
        self.psi1.has_analytic_derivative() && self.weight.has_analytic_derivative() && second
    }

    pub fn weight_at(&self, theta: f64, h: f64) -> Result<WeightValue> {
        self.weight.eval(theta, h)
    }

    pub fn psi2_at(&self, theta: f64, h: f64) -> Result<UnitVector> {
        match &self.psi2 {
            SecondState::Canonical => canonical_psi2(&self.psi1, theta, h),
            SecondState::Explicit(f) => {
                let v = f.psi(theta)?;
                let overlap = inner(self.psi1.psi(theta)?.as_slice(), v.as_slice()).norm();
                if overlap > ORTHOGONALITY_TOL {
                    return Err(QcrbError::Domain(format!(
                        "<psi1|psi2> = {overlap:e} at theta = {theta}; states must be orthogonal"
                    )));
                }
                Ok(v)
            }
        }
    }

    /// `(rho1, rho2)`. With the canonical choice `rho2 = I - rho1`, which holds
    /// for any orthogonal partner in two dimensions.
    pub fn projectors(&self, theta: f64, h: f64) -> Result<(HermitianMatrix, HermitianMatrix)> {
        let rho1 = self.psi1.projector(theta)?;
        let rho2 = match &self.psi2 {
            SecondState::Canonical => HermitianMatrix::identity(2).sub(&rho1),
            SecondState::Explicit(_) => self.psi2_at(theta, h)?.projector(),
        };
        Ok((rho1, rho2))
    }

    pub fn projector_derivatives(
        &self,
        theta: f64,
        h: f64,
    ) -> Result<(HermitianMatrix, HermitianMatrix)> {
        let d1 = self.psi1.dprojector(theta, h)?;
        let d2 = match &self.psi2 {
            SecondState::Canonical => d1.scale(-1.0),
            SecondState::Explicit(f) => f.dprojector(theta, h)?,
        };
        Ok((d1, d2))
    }

    pub fn rho(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        let WeightValue { w, .. } = self.weight_at(theta, h)?;
        let (r1, r2) = self.projectors(theta, h)?;
        Ok(r1.scale(w).add_scaled(1.0 - w, &r2))
    }

    /// `w' (rho1 - rho2) + w rho1' + (1 - w) rho2'`.
    pub fn drho(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        let WeightValue { w, dw } = self.weight_at(theta, h)?;
        let (r1, r2) = self.projectors(theta, h)?;
        let (d1, d2) = self.projector_derivatives(theta, h)?;
        Ok(r1
            .sub(&r2)
            .scale(dw)
            .add_scaled(w, &d1)
            .add_scaled(1.0 - w, &d2))
    }

    /// Closed-form derivative of `sqrt(rho) = sqrt(w) rho1 + sqrt(1-w) rho2`.
    pub fn dsqrt_rho(&self, theta: f64, h: f64) -> Result<HermitianMatrix> {
        let WeightValue { w, dw } = self.weight_at(theta, h)?;
        let (r1, r2) = self.projectors(theta, h)?;
        let (d1, d2) = self.projector_derivatives(theta, h)?;
        let sw = w.sqrt();
        let sv = (1.0 - w).sqrt();
        Ok(r1
            .scale(dw / (2.0 * sw))
            .add_scaled(sw, &d1)
            .add_scaled(-dw / (2.0 * sv), &r2)
            .add_scaled(sv, &d2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_psi2_for_rotation_at_zero() {
        let v = canonical_psi2(&PureFamily::rotation(), 0.0, 1e-5).unwrap();
        assert!((v.as_slice()[0]).norm() < 1e-15);
        assert!((v.as_slice()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonical_psi2_is_orthogonal() {
        for fam in [PureFamily::rotation(), PureFamily::phase_rotation()] {
            for &t in &[-1.2, 0.1, 0.8, 2.5] {
                let v = canonical_psi2(&fam, t, 1e-5).unwrap();
                let psi = fam.psi(t).unwrap();
                assert!(inner(psi.as_slice(), v.as_slice()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_family_is_stationary() {
        let fam = PureFamily::constant(UnitVector::basis(2, 0));
        assert!(matches!(
            canonical_psi2(&fam, 0.3, 1e-5),
            Err(QcrbError::StationaryFamily { .. })
        ));
    }

    #[test]
    fn half_weight_is_maximally_mixed() {
        let m = QubitMixtureModel::canonical(PureFamily::rotation(), WeightFunction::Constant(0.5))
            .unwrap();
        for &t in &[0.0, 0.7, 1.9] {
            let rho = m.rho(t, 1e-5).unwrap();
            assert!(rho.frobenius_distance(&HermitianMatrix::identity(2).scale(0.5)) < 1e-15);
        }
    }

    #[test]
    fn weight_point_nine_at_zero() {
        let m = QubitMixtureModel::canonical(PureFamily::rotation(), WeightFunction::Constant(0.9))
            .unwrap();
        let rho = m.rho(0.0, 1e-5).unwrap();
        assert!(rho.frobenius_distance(&HermitianMatrix::from_real_diagonal(&[0.9, 0.1])) < 1e-15);
    }

    #[test]
    fn non_orthogonal_partner_is_rejected() {
        let m = QubitMixtureModel::new(
            PureFamily::rotation(),
            WeightFunction::Constant(0.7),
            SecondState::Explicit(PureFamily::phase_rotation()),
        )
        .unwrap();
        assert!(matches!(m.rho(0.4, 1e-5), Err(QcrbError::Domain(_))));
    }
}
