//! The invariant suite: every structural identity, route agreement and
//! inequality the library relies on, evaluated across a model catalog.
//!
//! Each invariant has an id, a tolerance class and the worst residual seen
//! over all models and sample points. Mutation hooks add an offset to the
//! measured residual of one invariant so tests can confirm that a broken
//! invariant is reported as a failure.

use serde::{Deserialize, Serialize};

use crate::classical::{outcome_scores, random_povm, Povm, BOUND_SLACK};
use crate::error::{QcrbError, Result};
use crate::linalg::{eigh, HermitianMatrix};
use crate::models::{
    builtin_models, CustomModel, DerivOptions, Family, PureFamily, QubitMixtureModel, SqrtRoute,
    StateModel, WeightFunction,
};
use crate::quantum::{relation_report, sld, sld_defining_residual, sld_from_spectrum, Tolerances};
use crate::sim::one_step_estimator;

/// Tolerance for exact algebraic identities evaluated in floating point.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tolerance for constructed-object invariants (trace, completeness).
pub const STRUCTURAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceClass {
    Structural,
    Identity,
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteTolerances {
    pub structural: f64,
    pub identity: f64,
    pub analytic: f64,
    pub finite_difference: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            structural: STRUCTURAL_TOL,
            identity: IDENTITY_TOL,
            analytic: t.analytic,
            finite_difference: t.finite_difference,
        }
    }
}

impl SuiteTolerances {
    /// Every class set to `tol`.
    pub fn uniform(tol: f64) -> Self {
        Self {
            structural: tol,
            identity: tol,
            analytic: tol,
            finite_difference: tol,
        }
    }

    pub fn get(&self, class: ToleranceClass) -> f64 {
        match class {
            ToleranceClass::Structural => self.structural,
            ToleranceClass::Identity => self.identity,
            ToleranceClass::Analytic => self.analytic,
            ToleranceClass::FiniteDifference => self.finite_difference,
        }
    }

    fn relation(&self) -> Tolerances {
        Tolerances {
            analytic: self.analytic,
            finite_difference: self.finite_difference,
        }
    }
}

/// Adds `offset` to every residual recorded under `invariant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mutation {
    pub invariant: String,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub tolerances: SuiteTolerances,
    pub deriv: DerivOptions,
    pub mutations: Vec<Mutation>,
    /// Adds a model whose `rho` has this trace; it must fail construction.
    pub corrupt_trace: Option<f64>,
    /// Models to check; the builtin catalog when `None`.
    pub models: Option<Vec<StateModel>>,
    /// Random POVMs tried per model for the measurement invariants.
    pub povms_per_model: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerances: SuiteTolerances::default(),
            deriv: DerivOptions::default(),
            mutations: Vec::new(),
            corrupt_trace: None,
            models: None,
            povms_per_model: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub id: String,
    pub class: ToleranceClass,
    pub tolerance: f64,
    /// Worst residual over all checks.
    pub residual: f64,
    pub checks: usize,
    pub pass: bool,
    pub worst_case: String,
    /// Up to five failing cases.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tolerances: SuiteTolerances,
    pub invariants: Vec<InvariantSummary>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.invariants.iter().all(|i| i.pass)
    }

    pub fn get(&self, id: &str) -> Option<&InvariantSummary> {
        self.invariants.iter().find(|i| i.id == id)
    }
}

const MAX_LISTED_FAILURES: usize = 5;

struct Recorder<'a> {
    opts: &'a VerifyOptions,
    rows: Vec<InvariantSummary>,
}

impl<'a> Recorder<'a> {
    fn record(&mut self, id: &str, class: ToleranceClass, residual: f64, case: &str) {
        let tol = self.opts.tolerances.get(class);
        let offset: f64 = self
            .opts
            .mutations
            .iter()
            .filter(|m| m.invariant == id)
            .map(|m| m.offset)
            .sum();
        let residual = residual + offset;
        let ok = residual <= tol;
        let row = match self.rows.iter_mut().find(|r| r.id == id) {
            Some(r) => r,
            None => {
                self.rows.push(InvariantSummary {
                    id: id.to_string(),
                    class,
                    tolerance: tol,
                    residual: 0.0,
                    checks: 0,
                    pass: true,
                    worst_case: String::new(),
                    failures: Vec::new(),
                });
                self.rows.last_mut().unwrap()
            }
        };
        row.checks += 1;
        // NaN residuals count as the worst case
        if !(residual <= row.residual) || row.worst_case.is_empty() {
            row.residual = if residual.is_nan() {
                f64::INFINITY
            } else {
                residual.max(row.residual)
            };
            row.worst_case = case.to_string();
        }
        if !ok {
            row.pass = false;
            if row.failures.len() < MAX_LISTED_FAILURES {
                row.failures.push(format!("{case}: {residual:e}"));
            }
        }
    }

    fn fail(&mut self, id: &str, case: &str, err: &QcrbError) {
        self.record(
            id,
            ToleranceClass::Structural,
            f64::INFINITY,
            &format!("{case}: {err}"),
        );
    }
}

/// Rank-one projectors of the model's natural decomposition and their
/// derivatives, when it has one.
fn decomposition(
    model: &StateModel,
    theta: f64,
    opts: &DerivOptions,
) -> Option<Result<(Vec<HermitianMatrix>, Vec<HermitianMatrix>)>> {
    let h = opts.step;
    match model.family() {
        Family::Pure(f) => Some((|| {
            let d = if opts.force_finite_difference {
                f.fd_dprojector(theta, h)?
            } else {
                f.dprojector(theta, h)?
            };
            Ok((vec![f.projector(theta)?], vec![d]))
        })()),
        Family::QubitMixture(q) => Some((|| {
            let (a, b) = q.projectors(theta, h)?;
            let (da, db) = q.projector_derivatives(theta, h)?;
            Ok((vec![a, b], vec![da, db]))
        })()),
        Family::Spectral(s) => Some(s.point(theta).map(|p| (p.projectors, p.dprojectors))),
        Family::Custom(_) => None,
    }
}

fn check_model(rec: &mut Recorder, model: &StateModel) {
    use ToleranceClass::*;
    let opts = rec.opts.deriv;
    let analytic_class = if model.has_analytic_derivative() && !opts.force_finite_difference {
        Analytic
    } else {
        FiniteDifference
    };
    let rel_tols = rec.opts.tolerances.relation();

    for theta in model.sample_grid() {
        let case = format!("{}@{theta:.4}", model.name());
        let rho = match model.rho_at(theta) {
            Ok(r) => r,
            Err(e) => {
                rec.fail("model_construction", &case, &e);
                continue;
            }
        };
        rec.record("model_construction", Structural, 0.0, &case);
        rec.record(
            "trace_one",
            Structural,
            (rho.matrix().trace() - 1.0).abs(),
            &case,
        );
        rec.record("psd", Structural, (-rho.eigenvalues()[0]).max(0.0), &case);
        match eigh(rho.matrix()) {
            Ok(eig) => {
                rec.record(
                    "eigh_orthonormal",
                    Structural,
                    eig.orthonormality_defect(),
                    &case,
                );
                rec.record(
                    "eigh_reconstruct",
                    Structural,
                    eig.reconstruct().frobenius_distance(rho.matrix()),
                    &case,
                );
            }
            Err(e) => rec.fail("eigh_orthonormal", &case, &e),
        }
        let s = rho.sqrt();
        let sq = HermitianMatrix::hermitian_part(&(s.as_matrix() * s.as_matrix()));
        rec.record(
            "sqrt_squares_to_rho",
            Identity,
            sq.frobenius_distance(rho.matrix()),
            &case,
        );

        let drho = match model.drho_at(theta, &opts) {
            Ok(d) => d,
            Err(e) => {
                rec.fail("drho_traceless", &case, &e);
                continue;
            }
        };
        rec.record("drho_traceless", Identity, drho.trace().abs(), &case);
        if model.has_analytic_derivative() {
            match model.drho_at(theta, &DerivOptions::finite_difference(opts.step)) {
                Ok(fd) => rec.record(
                    "drho_analytic_vs_fd",
                    FiniteDifference,
                    fd.frobenius_distance(&drho),
                    &case,
                ),
                Err(e) => rec.fail("drho_analytic_vs_fd", &case, &e),
            }
        }

        match (
            model.dsqrt_rho_at(theta, SqrtRoute::EigenSolve, &opts),
            model.dsqrt_rho_at(theta, SqrtRoute::FiniteDifference, &opts),
        ) {
            (Ok(a), Ok(b)) => rec.record(
                "dsqrt_solve_vs_fd",
                FiniteDifference,
                a.matrix.frobenius_distance(&b.matrix),
                &case,
            ),
            (Err(e), _) | (_, Err(e)) => rec.fail("dsqrt_solve_vs_fd", &case, &e),
        }

        let l = match sld(model, theta, &opts) {
            Ok(l) => l,
            Err(e) => {
                rec.fail("sld_defining_equation", &case, &e);
                continue;
            }
        };
        match sld_defining_residual(model, theta, &l.matrix, &opts) {
            Ok(r) => rec.record("sld_defining_equation", analytic_class, r, &case),
            Err(e) => rec.fail("sld_defining_equation", &case, &e),
        }
        rec.record("score_zero_mean", Identity, l.score_mean.abs(), &case);

        match relation_report(model, theta, &opts) {
            Ok(r) => {
                for (name, &value) in &r.residuals {
                    if name == "score_mean" || r.residual_tolerance(name, &rel_tols).is_none() {
                        continue;
                    }
                    let class = if name == "wy_solve_vs_fd" {
                        FiniteDifference
                    } else if r.analytic_derivative {
                        Analytic
                    } else {
                        FiniteDifference
                    };
                    rec.record(name, class, value, &case);
                }
                let i_h = r.i_h_sld;
                let i_wy = r.i_wy_generic;
                rec.record(
                    "helstrom_le_wy",
                    Identity,
                    (i_h - i_wy).max(0.0) / i_h.max(1.0),
                    &case,
                );
                if i_h > crate::quantum::RATIO_FLOOR {
                    rec.record(
                        "wy_le_twice_helstrom",
                        Identity,
                        (i_wy / i_h - 2.0).max(0.0),
                        &case,
                    );
                }
            }
            Err(e) => rec.fail("relation_report", &case, &e),
        }

        if let Some(dec) = decomposition(model, theta, &opts) {
            match dec {
                Ok((ps, dps)) => check_projector_identities(rec, &ps, &dps, &case),
                Err(e) => rec.fail("projector_trace_identity", &case, &e),
            }
        }
        if let Family::Spectral(sm) = model.family() {
            match sm.point(theta).map(|p| {
                sld_from_spectrum(&p.lambdas, &p.projectors, &p.drho())
                    .frobenius_distance(&l.matrix)
            }) {
                Ok(d) => rec.record("sld_vs_spectral_sum", Analytic, d, &case),
                Err(e) => rec.fail("sld_vs_spectral_sum", &case, &e),
            }
        }

        check_measurements(rec, model, theta, &case);
    }
}

fn check_projector_identities(
    rec: &mut Recorder,
    ps: &[HermitianMatrix],
    dps: &[HermitianMatrix],
    case: &str,
) {
    use ToleranceClass::Identity;
    let n = ps[0].dim();
    let mut worst_trace = 0.0f64;
    let mut worst_cross = 0.0f64;
    let mut worst_quartic = 0.0f64;
    for (k, p) in ps.iter().enumerate() {
        for dp in dps {
            worst_trace = worst_trace.max(p.trace_inner(dp).abs());
        }
        let a = p.as_matrix() * dps[k].as_matrix();
        worst_quartic = worst_quartic.max((&a * &a).trace().norm());
        for (m, q) in ps.iter().enumerate() {
            if m == k {
                continue;
            }
            let lhs = &(p.as_matrix() * dps[m].as_matrix()) + &(dps[k].as_matrix() * q.as_matrix());
            worst_cross = worst_cross.max(lhs.frobenius_norm());
        }
    }
    rec.record("projector_trace_identity", Identity, worst_trace, case);
    rec.record("projector_quartic_identity", Identity, worst_quartic, case);
    if ps.len() > 1 {
        rec.record("projector_cross_identity", Identity, worst_cross, case);
    }
    if ps.len() == n {
        let sum = dps
            .iter()
            .fold(HermitianMatrix::zeros(n), |acc, d| acc.add(d));
        rec.record(
            "projector_derivative_sum",
            Identity,
            sum.frobenius_norm(),
            case,
        );
        let psum = ps
            .iter()
            .fold(HermitianMatrix::zeros(n), |acc, p| acc.add(p));
        rec.record(
            "projector_completeness",
            Identity,
            psum.frobenius_distance(&HermitianMatrix::identity(n)),
            case,
        );
    }
}

fn check_measurements(rec: &mut Recorder, model: &StateModel, theta: f64, case: &str) {
    use ToleranceClass::*;
    let opts = rec.opts.deriv;
    let n = model.dim();
    let i_h = match crate::quantum::helstrom_info_sld(model, theta, &opts) {
        Ok(v) => v,
        Err(e) => return rec.fail("information_inequality", case, &e),
    };
    let seed_base = (theta.to_bits() ^ (model.name().len() as u64)).rotate_left(7);
    let mut povms = vec![Povm::basis(n)];
    for k in 0..rec.opts.povms_per_model {
        match random_povm(n, 2 + k % 3, seed_base.wrapping_add(k as u64)) {
            Ok(p) => povms.push(p),
            Err(e) => rec.fail("povm_completeness", case, &e),
        }
    }
    for (j, povm) in povms.iter().enumerate() {
        let case = format!("{case}/povm{j}");
        rec.record(
            "povm_completeness",
            Structural,
            povm.completeness_defect(),
            &case,
        );
        let sc = match outcome_scores(model, theta, povm, &opts) {
            Ok(s) => s,
            Err(QcrbError::SupportRegularity { .. }) => continue,
            Err(e) => {
                rec.fail("information_inequality", &case, &e);
                continue;
            }
        };
        let score_sum: f64 = sc.scores.iter().sum();
        rec.record("score_sum_zero", Identity, score_sum.abs(), &case);
        let i = sc.fisher();
        rec.record(
            "information_inequality",
            Identity,
            (i - i_h - BOUND_SLACK).max(0.0),
            &case,
        );
        if povm.len() > 1 {
            if let Ok(coarse) = povm.merge(0, povm.len() - 1) {
                if let Ok(sc2) = outcome_scores(model, theta, &coarse, &opts) {
                    rec.record(
                        "coarse_graining_monotone",
                        Identity,
                        (sc2.fisher() - i - BOUND_SLACK).max(0.0),
                        &case,
                    );
                }
            }
        }
        if i > crate::sim::MIN_INFORMATION {
            match one_step_estimator(model, theta, povm, &opts) {
                Ok(est) => {
                    rec.record(
                        "estimator_unbiased",
                        Identity,
                        (est.exact_mean() - theta).abs(),
                        &case,
                    );
                    rec.record(
                        "estimator_variance_is_crb",
                        Identity,
                        (est.exact_variance() - 1.0 / est.info).abs() * est.info.min(1.0),
                        &case,
                    );
                }
                Err(e) => rec.fail("estimator_unbiased", &case, &e),
            }
        }
    }
}

/// Sweep over constant weights on the rotation family: gap monotone in
/// `|w - 1/2|` and information lost relative to the pure state.
fn check_weight_sweep(rec: &mut Recorder) {
    use ToleranceClass::*;
    let opts = rec.opts.deriv;
    let theta = 0.3;
    let mut prev_gap: Option<f64> = None;
    for k in 0..=24 {
        let w = 0.5 + 0.02 * k as f64;
        let case = format!("constant w={w:.2}");
        let q =
            match QubitMixtureModel::canonical(PureFamily::rotation(), WeightFunction::Constant(w))
            {
                Ok(q) => q,
                Err(e) => return rec.fail("gap_monotone_in_w", &case, &e),
            };
        let model = StateModel::qubit_mixture(case.clone(), q);
        let r = match relation_report(&model, theta, &opts) {
            Ok(r) => r,
            Err(e) => return rec.fail("gap_monotone_in_w", &case, &e),
        };
        let gap = r.gap();
        let expected = 4.0 * (1.0 - 2.0 * (w * (1.0 - w)).sqrt()).powi(2);
        rec.record("gap_closed_form", Analytic, (gap - expected).abs(), &case);
        if let Some(p) = prev_gap {
            rec.record("gap_monotone_in_w", Identity, (p - gap).max(0.0), &case);
        }
        prev_gap = Some(gap);
        rec.record(
            "mixing_loses_helstrom",
            Identity,
            (r.i_h_sld - 4.0 - BOUND_SLACK).max(0.0),
            &case,
        );
        rec.record(
            "mixing_loses_wy",
            Identity,
            (r.i_wy_generic - 8.0 - BOUND_SLACK).max(0.0),
            &case,
        );
        if let Some(ratio) = r.ratio() {
            let below = (1.0 - ratio).max(0.0);
            let above = (ratio - 2.0 - 1e-6).max(0.0);
            rec.record(
                "ratio_between_one_and_two",
                Identity,
                below.max(above),
                &case,
            );
        }
    }
}

fn corrupted_model(trace: f64) -> StateModel {
    let rho = std::sync::Arc::new(move |t: f64| {
        let c = t.cos().powi(2);
        Ok(HermitianMatrix::from_real_diagonal(&[
            c * trace,
            (1.0 - c) * trace,
        ]))
    });
    StateModel::custom(
        format!("corrupted(trace {trace})"),
        CustomModel {
            dim: 2,
            rho,
            drho: None,
        },
    )
}

/// Runs the suite. Failures are results, not errors.
pub fn run_suite(opts: &VerifyOptions) -> VerifyReport {
    let mut rec = Recorder {
        opts,
        rows: Vec::new(),
    };
    let mut models = opts.models.clone().unwrap_or_else(builtin_models);
    if let Some(t) = opts.corrupt_trace {
        models.push(corrupted_model(t));
    }
    for model in &models {
        log::debug!("verifying {}", model.name());
        check_model(&mut rec, model);
    }
    if opts.models.is_none() {
        check_weight_sweep(&mut rec);
    }
    VerifyReport {
        tolerances: opts.tolerances,
        invariants: rec.rows,
    }
}

/// Ids of every invariant the default suite records.
pub fn invariant_ids() -> Vec<String> {
    run_suite(&VerifyOptions::default())
        .invariants
        .into_iter()
        .map(|i| i.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let r = run_suite(&VerifyOptions::default());
        let failing: Vec<_> = r.invariants.iter().filter(|i| !i.pass).collect();
        assert!(failing.is_empty(), "{failing:#?}");
        assert!(r.get("alpha_beta_relation").is_some());
        assert!(r.get("gamma_gap").is_some());
        assert!(r.get("information_inequality").unwrap().checks > 50);
    }

    #[test]
    fn corrupted_trace_fails_construction() {
        let r = run_suite(&VerifyOptions {
            corrupt_trace: Some(1.01),
            ..Default::default()
        });
        let c = r.get("model_construction").unwrap();
        assert!(!c.pass);
        assert!(c.failures[0].contains("corrupted"));
    }
}
