use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::info::{
    alpha_beta, gamma_from_point, helstrom_from_point, helstrom_info_pure,
    helstrom_info_qubit_closed, qubit_spectral_point, wy_from_point, wy_info_generic, wy_info_pure,
    wy_info_qubit_closed,
};
use super::sld::{helstrom_from_sld, sld};
use crate::error::Result;
use crate::models::{DerivOptions, Family, SqrtRoute, StateModel};

/// Information values below this make ratio residuals meaningless.
pub const RATIO_FLOOR: f64 = 1e-8;

/// Tolerance hierarchy for gating residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Residuals computed from analytic derivatives only.
    pub analytic: f64,
    /// Residuals with a finite-difference ingredient.
    pub finite_difference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic: 1e-8,
            finite_difference: 1e-6,
        }
    }
}

/// Every information quantity and relation residual at one `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumInfoResult {
    pub theta: f64,
    pub model: String,
    pub kind: String,
    /// `tr(rho L^2)`.
    pub i_h_sld: f64,
    /// Closed form: pure `2 tr(rho'^2)`, qubit two-state formula, or the
    /// spectral sum.
    pub i_h_closed: Option<f64>,
    /// Spectral sum evaluated on the two-term decomposition of a qubit
    /// mixture.
    pub i_h_spectral: Option<f64>,
    /// `4 tr((sqrt(rho)')^2)` through the eigenbasis solve.
    pub i_wy_generic: f64,
    /// Same definition through a central difference of `sqrt(rho)`.
    pub i_wy_fd: Option<f64>,
    pub i_wy_closed: Option<f64>,
    pub i_wy_spectral: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    /// `tr(rho L)`.
    pub score_mean: f64,
    /// `1 / I_H`, the sharp quantum Cramer-Rao bound.
    pub sharp_bound: Option<f64>,
    /// `1 / I_WY`, the approximate bound.
    pub approx_bound: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
    /// Routes that failed or do not apply, with the reason.
    pub errors: BTreeMap<String, String>,
    pub analytic_derivative: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn recip(x: f64) -> Option<f64> {
    (x > 0.0).then(|| 1.0 / x)
}

impl QuantumInfoResult {
    pub fn i_h(&self) -> f64 {
        self.i_h_sld
    }

    pub fn i_wy(&self) -> f64 {
        self.i_wy_generic
    }

    pub fn gap(&self) -> f64 {
        self.i_wy_generic - self.i_h_sld
    }

    pub fn ratio(&self) -> Option<f64> {
        (self.i_h_sld > RATIO_FLOOR).then(|| self.i_wy_generic / self.i_h_sld)
    }

    /// Tolerance a residual is gated at, `None` when it is informational.
    pub fn residual_tolerance(&self, name: &str, tols: &Tolerances) -> Option<f64> {
        match name {
            "alpha_beta_noncanonical" => None,
            "wy_solve_vs_fd" => Some(tols.finite_difference),
            _ if self.analytic_derivative => Some(tols.analytic),
            _ => Some(tols.finite_difference),
        }
    }

    /// Residuals exceeding their tolerance, as `(name, value, tol)`.
    pub fn failures(&self, tols: &Tolerances) -> Vec<(String, f64, f64)> {
        self.residuals
            .iter()
            .filter_map(|(name, &value)| {
                let tol = self.residual_tolerance(name, tols)?;
                (!(value <= tol)).then(|| (name.clone(), value, tol))
            })
            .collect()
    }
}

/// Evaluates every applicable route for `model` at `theta` and records the
/// pairwise residuals. Failures of optional routes are recorded in `errors`.
pub fn relation_report(
    model: &StateModel,
    theta: f64,
    opts: &DerivOptions,
) -> Result<QuantumInfoResult> {
    let rho = model.rho_at(theta)?;
    let l = sld(model, theta, opts)?;
    let i_h = helstrom_from_sld(rho.matrix(), &l.matrix)?;
    let wy = wy_info_generic(model, theta, SqrtRoute::EigenSolve, opts)?;
    let analytic =
        model.has_analytic_derivative() && !opts.force_finite_difference && !wy.fell_back;

    let mut out = QuantumInfoResult {
        theta,
        model: model.name().to_string(),
        kind: model.kind().as_str().to_string(),
        i_h_sld: i_h,
        i_h_closed: None,
        i_h_spectral: None,
        i_wy_generic: wy.value,
        i_wy_fd: None,
        i_wy_closed: None,
        i_wy_spectral: None,
        alpha: None,
        beta: None,
        gamma: None,
        score_mean: l.score_mean,
        sharp_bound: recip(i_h),
        approx_bound: recip(wy.value),
        residuals: BTreeMap::new(),
        errors: BTreeMap::new(),
        analytic_derivative: analytic,
    };
    out.residuals
        .insert("score_mean".into(), l.score_mean.abs());

    match wy_info_generic(model, theta, SqrtRoute::FiniteDifference, opts) {
        Ok(fd) => {
            out.i_wy_fd = Some(fd.value);
            out.residuals
                .insert("wy_solve_vs_fd".into(), rel(fd.value, wy.value));
        }
        Err(e) => {
            out.errors.insert("i_wy_fd".into(), e.to_string());
        }
    }

    let h = opts.step;
    match model.family() {
        Family::Pure(f) => {
            record(
                &mut out,
                "i_h_closed",
                helstrom_info_pure(f, theta, opts),
                |o, v| {
                    o.i_h_closed = Some(v);
                    o.residuals.insert("h_closed_vs_sld".into(), rel(v, i_h));
                },
            );
            record(
                &mut out,
                "i_wy_closed",
                wy_info_pure(f, theta, opts),
                |o, v| {
                    o.i_wy_closed = Some(v);
                    o.residuals
                        .insert("wy_closed_vs_generic".into(), rel(v, wy.value));
                },
            );
            out.residuals
                .insert("pure_doubling".into(), (wy.value - 2.0 * i_h).abs());
            if i_h > RATIO_FLOOR {
                out.residuals
                    .insert("pure_ratio".into(), (wy.value / i_h - 2.0).abs());
            }
        }
        Family::QubitMixture(q) => {
            if q.is_canonical() {
                record(
                    &mut out,
                    "i_h_closed",
                    helstrom_info_qubit_closed(q, theta, h),
                    |o, v| {
                        o.i_h_closed = Some(v);
                        o.residuals.insert("h_closed_vs_sld".into(), rel(v, i_h));
                    },
                );
            } else {
                out.errors.insert(
                    "i_h_closed".into(),
                    "not applicable: second state is not the canonical choice".into(),
                );
            }
            record(
                &mut out,
                "i_wy_closed",
                wy_info_qubit_closed(q, theta, h),
                |o, v| {
                    o.i_wy_closed = Some(v);
                    o.residuals
                        .insert("wy_closed_vs_generic".into(), rel(v, wy.value));
                },
            );
            match qubit_spectral_point(q, theta, h) {
                Ok(p) => {
                    record(&mut out, "i_h_spectral", helstrom_from_point(&p), |o, v| {
                        o.i_h_spectral = Some(v);
                        o.residuals.insert("h_spectral_vs_sld".into(), rel(v, i_h));
                    });
                    record(&mut out, "i_wy_spectral", wy_from_point(&p), |o, v| {
                        o.i_wy_spectral = Some(v);
                        o.residuals
                            .insert("wy_spectral_vs_generic".into(), rel(v, wy.value));
                    });
                    record(&mut out, "gamma", gamma_from_point(&p), |o, v| {
                        o.gamma = Some(v);
                        o.residuals.insert(
                            "gamma_gap".into(),
                            (wy.value - i_h - v).abs() / i_h.max(1.0),
                        );
                    });
                }
                Err(e) => {
                    out.errors.insert("spectral_point".into(), e.to_string());
                }
            }
            match q.weight_at(theta, h).and_then(|v| alpha_beta(v.w, v.dw)) {
                Ok((a, b)) => {
                    out.alpha = Some(a);
                    out.beta = Some(b);
                    let r = (wy.value - a * i_h - b).abs() / i_h.max(1.0);
                    let key = if q.is_canonical() {
                        "alpha_beta_relation"
                    } else {
                        "alpha_beta_noncanonical"
                    };
                    out.residuals.insert(key.into(), r);
                }
                Err(e) => {
                    out.errors.insert("alpha_beta".into(), e.to_string());
                }
            }
        }
        Family::Spectral(s) => match s.point(theta) {
            Ok(p) => {
                record(&mut out, "i_h_closed", helstrom_from_point(&p), |o, v| {
                    o.i_h_closed = Some(v);
                    o.residuals.insert("h_closed_vs_sld".into(), rel(v, i_h));
                });
                record(&mut out, "i_wy_closed", wy_from_point(&p), |o, v| {
                    o.i_wy_closed = Some(v);
                    o.residuals
                        .insert("wy_closed_vs_generic".into(), rel(v, wy.value));
                });
                record(&mut out, "gamma", gamma_from_point(&p), |o, v| {
                    o.gamma = Some(v);
                    o.residuals.insert(
                        "gamma_gap".into(),
                        (wy.value - i_h - v).abs() / i_h.max(1.0),
                    );
                });
            }
            Err(e) => {
                out.errors.insert("spectral_point".into(), e.to_string());
            }
        },
        Family::Custom(_) => {}
    }
    Ok(out)
}

fn record(
    out: &mut QuantumInfoResult,
    key: &str,
    value: Result<f64>,
    apply: impl FnOnce(&mut QuantumInfoResult, f64),
) {
    match value {
        Ok(v) => apply(out, v),
        Err(e) => {
            out.errors.insert(key.to_string(), e.to_string());
        }
    }
}
