use crate::error::{QcrbError, Result};
use crate::linalg::trace3;
use crate::models::{
    canonical_psi2, DerivOptions, PureFamily, QubitMixtureModel, SpectralMixtureModel,
    SpectralPoint, SqrtRoute, StateModel,
};

use super::sld::{helstrom_from_sld, sld};

/// Eigenvalues at or below this are treated as outside the support.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
/// Largest `|lambda'|` tolerated on a vanishing eigenvalue.
pub const BOUNDARY_DERIVATIVE_TOL: f64 = 1e-8;

/// Helstrom information `tr(rho L^2)` from the SLD.
pub fn helstrom_info_sld(model: &StateModel, theta: f64, opts: &DerivOptions) -> Result<f64> {
    let l = sld(model, theta, opts)?;
    let rho = model.rho_at(theta)?;
    helstrom_from_sld(rho.matrix(), &l.matrix)
}

/// Pure-state Helstrom information `2 tr(rho'^2)`.
pub fn helstrom_info_pure(family: &PureFamily, theta: f64, opts: &DerivOptions) -> Result<f64> {
    let d = if opts.force_finite_difference {
        family.fd_dprojector(theta, opts.step)?
    } else {
        family.dprojector(theta, opts.step)?
    };
    Ok(2.0 * d.trace_inner(&d))
}

/// Pure-state Wigner-Yanase information `4 tr(rho'^2)`, using `sqrt(rho) = rho`.
pub fn wy_info_pure(family: &PureFamily, theta: f64, opts: &DerivOptions) -> Result<f64> {
    Ok(2.0 * helstrom_info_pure(family, theta, opts)?)
}

/// `w'^2 / (w (1-w)) + (2w - 1)^2 I_H1` for a qubit mixture built with the
/// canonical second state.
pub fn helstrom_info_qubit_closed(model: &QubitMixtureModel, theta: f64, h: f64) -> Result<f64> {
    if !model.is_canonical() {
        return Err(QcrbError::Domain(
            "closed-form Helstrom information needs the canonical second state".into(),
        ));
    }
    canonical_psi2(&model.psi1, theta, h)?;
    let v = model.weight_at(theta, h)?;
    let ih1 = crate::models::pure_helstrom(&model.psi1, theta, h)?;
    Ok(v.dw * v.dw / (v.w * (1.0 - v.w)) + (2.0 * v.w - 1.0).powi(2) * ih1)
}

/// `w'^2 / (w (1-w)) + (1 - 2 sqrt(w (1-w))) I_WY1`.
pub fn wy_info_qubit_closed(model: &QubitMixtureModel, theta: f64, h: f64) -> Result<f64> {
    let v = model.weight_at(theta, h)?;
    let d1 = model.psi1.dprojector(theta, h)?;
    let iwy1 = 4.0 * d1.trace_inner(&d1);
    let s = (v.w * (1.0 - v.w)).sqrt();
    Ok(v.dw * v.dw / (v.w * (1.0 - v.w)) + (1.0 - 2.0 * s) * iwy1)
}

/// The qubit mixture written as a two-term spectral mixture.
pub fn qubit_spectral_point(
    model: &QubitMixtureModel,
    theta: f64,
    h: f64,
) -> Result<SpectralPoint> {
    let v = model.weight_at(theta, h)?;
    let (r1, r2) = model.projectors(theta, h)?;
    let (d1, d2) = model.projector_derivatives(theta, h)?;
    Ok(SpectralPoint {
        lambdas: vec![v.w, 1.0 - v.w],
        dlambdas: vec![v.dw, -v.dw],
        projectors: vec![r1, r2],
        dprojectors: vec![d1, d2],
    })
}

/// `sum_l lambda_l'^2 / lambda_l`, skipping vanishing eigenvalues whose
/// derivative also vanishes.
fn classical_part(p: &SpectralPoint) -> Result<f64> {
    let mut acc = 0.0;
    for (index, (&lambda, &dlambda)) in p.lambdas.iter().zip(&p.dlambdas).enumerate() {
        if lambda <= EIGENVALUE_FLOOR {
            if dlambda.abs() > BOUNDARY_DERIVATIVE_TOL {
                return Err(QcrbError::BoundaryRegularity {
                    index,
                    lambda,
                    dlambda,
                });
            }
            continue;
        }
        acc += dlambda * dlambda / lambda;
    }
    Ok(acc)
}

/// `sum_l sum_{k != l} sum_z 4 lambda_l (lambda_k - lambda_l) lambda_z / (lambda_l + lambda_k)^2
///  * tr(rho_l rho_k' rho_z')`
fn helstrom_quantum_part(p: &SpectralPoint) -> f64 {
    let n = p.dim();
    let mut acc = 0.0;
    for l in 0..n {
        for k in 0..n {
            let denom = p.lambdas[l] + p.lambdas[k];
            if k == l || denom <= EIGENVALUE_FLOOR {
                continue;
            }
            let coef = p.lambdas[l] * (p.lambdas[k] - p.lambdas[l]) / (denom * denom);
            if coef == 0.0 {
                continue;
            }
            for z in 0..n {
                let t = trace3(&p.projectors[l], &p.dprojectors[k], &p.dprojectors[z]);
                acc += 4.0 * coef * p.lambdas[z] * t.re;
            }
        }
    }
    acc
}

/// Helstrom information of a spectral mixture from its eigenvalues and
/// eigenprojectors.
pub fn helstrom_from_point(p: &SpectralPoint) -> Result<f64> {
    Ok(classical_part(p)? + helstrom_quantum_part(p))
}

/// Wigner-Yanase information of a spectral mixture:
/// `sum_l lambda_l I_WY,l + sum_l lambda_l'^2/lambda_l
///  + 4 sum_l sum_{k != l} sqrt(lambda_l lambda_k) tr(rho_l' rho_k')`.
pub fn wy_from_point(p: &SpectralPoint) -> Result<f64> {
    let n = p.dim();
    let mut acc = classical_part(p)?;
    for l in 0..n {
        let dl = &p.dprojectors[l];
        acc += p.lambdas[l] * 4.0 * dl.trace_inner(dl);
        for k in 0..n {
            if k == l {
                continue;
            }
            if p.lambdas[l] <= EIGENVALUE_FLOOR || p.lambdas[k] <= EIGENVALUE_FLOOR {
                continue;
            }
            let s = (p.lambdas[l] * p.lambdas[k]).sqrt();
            acc += 4.0 * s * dl.trace_inner(&p.dprojectors[k]);
        }
    }
    Ok(acc)
}

/// `gamma = -4 sum_l sum_{k != l} [ (lambda_l - sqrt(lambda_l lambda_k)) tr(rho_l' rho_k')
///  + sum_z lambda_l (lambda_k - lambda_l) lambda_z / (lambda_l + lambda_k)^2 tr(rho_l rho_k' rho_z') ]`,
/// so that `I_WY = I_H + gamma`.
pub fn gamma_from_point(p: &SpectralPoint) -> Result<f64> {
    classical_part(p)?;
    let n = p.dim();
    let mut acc = 0.0;
    for l in 0..n {
        for k in 0..n {
            if k == l {
                continue;
            }
            let (ll, lk) = (p.lambdas[l], p.lambdas[k]);
            let s = if ll <= EIGENVALUE_FLOOR || lk <= EIGENVALUE_FLOOR {
                0.0
            } else {
                (ll * lk).sqrt()
            };
            acc += (ll - s) * p.dprojectors[l].trace_inner(&p.dprojectors[k]);
        }
    }
    Ok(-4.0 * acc - helstrom_quantum_part(p))
}

pub fn helstrom_info_spectral(model: &SpectralMixtureModel, theta: f64) -> Result<f64> {
    helstrom_from_point(&model.point(theta)?)
}

pub fn wy_info_spectral(model: &SpectralMixtureModel, theta: f64) -> Result<f64> {
    wy_from_point(&model.point(theta)?)
}

pub fn gamma_spectral(model: &SpectralMixtureModel, theta: f64) -> Result<f64> {
    gamma_from_point(&model.point(theta)?)
}

/// Wigner-Yanase information from the definition `4 tr((sqrt(rho)')^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WyGeneric {
    pub value: f64,
    pub route: SqrtRoute,
    pub fell_back: bool,
}

pub fn wy_info_generic(
    model: &StateModel,
    theta: f64,
    route: SqrtRoute,
    opts: &DerivOptions,
) -> Result<WyGeneric> {
    let d = model.dsqrt_rho_at(theta, route, opts)?;
    Ok(WyGeneric {
        value: 4.0 * d.matrix.trace_inner(&d.matrix),
        route: d.route,
        fell_back: d.fell_back,
    })
}

/// `alpha = 2 / (1 + 2 sqrt(w(1-w)))` and
/// `beta = -(1 - 2 sqrt(w(1-w))) / (1 + 2 sqrt(w(1-w))) * w'^2 / (w(1-w))`.
pub fn alpha_beta(w: f64, dw: f64) -> Result<(f64, f64)> {
    if !(w > 0.0 && w < 1.0) {
        return Err(QcrbError::Domain(format!(
            "alpha/beta need w in (0, 1), got {w}"
        )));
    }
    let v = w * (1.0 - w);
    let s = 2.0 * v.sqrt();
    let alpha = 2.0 / (1.0 + s);
    let beta = -(1.0 - s) / (1.0 + s) * dw * dw / v;
    Ok((alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::WeightFunction;

    fn mixture(w: f64) -> QubitMixtureModel {
        QubitMixtureModel::canonical(PureFamily::rotation(), WeightFunction::Constant(w)).unwrap()
    }

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(alpha_beta(0.5, 0.0).unwrap(), (1.0, 0.0));
        let (a, b) = alpha_beta(0.9, 0.0).unwrap();
        assert!((a - 1.25).abs() < 1e-15);
        assert_eq!(b, 0.0);
        let (a, _) = alpha_beta(1e-12, 0.0).unwrap();
        assert!((a - 2.0).abs() < 1e-5);
        assert!(alpha_beta(1.0, 0.0).is_err());
        assert!(alpha_beta(0.0, 0.0).is_err());
    }

    #[test]
    fn qubit_closed_forms_at_point_nine() {
        let m = mixture(0.9);
        let ih = helstrom_info_qubit_closed(&m, 0.3, 1e-5).unwrap();
        let iwy = wy_info_qubit_closed(&m, 0.3, 1e-5).unwrap();
        assert!((ih - 2.56).abs() < 1e-12);
        assert!((iwy - 3.2).abs() < 1e-12);
    }

    #[test]
    fn sine_weight_closed_form_at_zero() {
        let m = QubitMixtureModel::canonical(
            PureFamily::rotation(),
            WeightFunction::Sine { amplitude: 1.0 },
        )
        .unwrap();
        assert!((helstrom_info_qubit_closed(&m, 0.0, 1e-5).unwrap() - 1.0).abs() < 1e-15);
        assert!((wy_info_qubit_closed(&m, 0.0, 1e-5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_canonical_mixture_has_no_closed_helstrom() {
        let m = QubitMixtureModel::new(
            PureFamily::rotation(),
            WeightFunction::Constant(0.8),
            crate::models::SecondState::Explicit(PureFamily::rotation()),
        )
        .unwrap();
        assert!(helstrom_info_qubit_closed(&m, 0.1, 1e-5).is_err());
    }

    #[test]
    fn vanishing_eigenvalue_with_moving_weight_is_irregular() {
        let p = SpectralPoint {
            lambdas: vec![1.0, 0.0],
            dlambdas: vec![-1e-3, 1e-3],
            projectors: vec![
                crate::linalg::HermitianMatrix::from_real_diagonal(&[1.0, 0.0]),
                crate::linalg::HermitianMatrix::from_real_diagonal(&[0.0, 1.0]),
            ],
            dprojectors: vec![
                crate::linalg::HermitianMatrix::zeros(2),
                crate::linalg::HermitianMatrix::zeros(2),
            ],
        };
        assert!(matches!(
            helstrom_from_point(&p),
            Err(QcrbError::BoundaryRegularity { index: 1, .. })
        ));
    }
}
