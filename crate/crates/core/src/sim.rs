//! Monte Carlo check of the Cramer-Rao bound with a locally unbiased
//! one-step estimator.
//!
//! Sampling uses ChaCha8 seeded through `seed_from_u64`, so a given
//! `(config, seed)` pair produces the same outcome sequence on every
//! platform.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{outcome_probs, outcome_scores, OutcomeDistribution, Povm, SUPPORT_PROB};
use crate::error::{QcrbError, Result};
use crate::models::{DerivOptions, SqrtRoute, StateModel};
use crate::quantum::{helstrom_info_sld, wy_info_generic};

/// Classical information below this leaves the estimator undefined.
pub const MIN_INFORMATION: f64 = 1e-8;
pub const MIN_SAMPLES: usize = 100;

/// Draws `n` outcome indices from `dist`.
pub fn sample_outcomes(dist: &OutcomeDistribution, n: usize, seed: u64) -> Result<Vec<usize>> {
    let index = WeightedIndex::new(&dist.probs)
        .map_err(|e| QcrbError::InvalidPovm(format!("cannot sample outcomes: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| index.sample(&mut rng)).collect())
}

/// `t(x) = theta0 + (tr(rho' m_x) / p_x) / i` for each outcome, with the
/// outcome distribution and `i` it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct OneStepEstimator {
    pub theta0: f64,
    pub values: Vec<f64>,
    pub dist: OutcomeDistribution,
    pub info: f64,
}

impl OneStepEstimator {
    /// `sum_x p_x t(x)`.
    pub fn exact_mean(&self) -> f64 {
        self.dist
            .probs
            .iter()
            .zip(&self.values)
            .map(|(p, t)| p * t)
            .sum()
    }

    /// `sum_x p_x (t(x) - theta0)^2`.
    pub fn exact_variance(&self) -> f64 {
        self.dist
            .probs
            .iter()
            .zip(&self.values)
            .map(|(p, t)| p * (t - self.theta0).powi(2))
            .sum()
    }
}

pub fn one_step_estimator(
    model: &StateModel,
    theta0: f64,
    povm: &Povm,
    opts: &DerivOptions,
) -> Result<OneStepEstimator> {
    let sc = outcome_scores(model, theta0, povm, opts)?;
    let info = sc.fisher();
    if info <= MIN_INFORMATION {
        return Err(QcrbError::ZeroInformation { info });
    }
    let values = sc
        .dist
        .probs
        .iter()
        .zip(&sc.scores)
        .map(|(&p, &s)| {
            if p > SUPPORT_PROB {
                theta0 + s / p / info
            } else {
                theta0
            }
        })
        .collect();
    Ok(OneStepEstimator {
        theta0,
        values,
        dist: sc.dist,
        info,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    OneStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub theta0: f64,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub estimator: EstimatorKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub theta0: f64,
    pub seed: u64,
    pub n_samples: usize,
    pub empirical_mean: f64,
    pub empirical_var: f64,
    pub standard_error_of_var: f64,
    /// `1 / i`.
    pub crb: f64,
    /// `1 / I_H`.
    pub qcrb: f64,
    /// `1 / I_WY`.
    pub approx_qcrb: f64,
    /// `(approx_qcrb - qcrb) / qcrb`.
    pub approx_deviation: f64,
    /// `sum_x p_x (t(x) - theta0)^2 - 1/i`, computed without sampling.
    pub exact_variance_residual: f64,
    /// `qcrb <= crb <= empirical_var + 3 SE`.
    pub bound_chain_ok: bool,
}

impl SimResult {
    pub const CSV_COLUMNS: [&'static str; 12] = [
        "theta0",
        "seed",
        "n_samples",
        "empirical_mean",
        "empirical_var",
        "standard_error_of_var",
        "crb",
        "qcrb",
        "approx_qcrb",
        "approx_deviation",
        "exact_variance_residual",
        "bound_chain_ok",
    ];

    pub fn csv_header() -> String {
        Self::CSV_COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        [
            self.theta0.to_string(),
            self.seed.to_string(),
            self.n_samples.to_string(),
            self.empirical_mean.to_string(),
            self.empirical_var.to_string(),
            self.standard_error_of_var.to_string(),
            self.crb.to_string(),
            self.qcrb.to_string(),
            self.approx_qcrb.to_string(),
            self.approx_deviation.to_string(),
            self.exact_variance_residual.to_string(),
            self.bound_chain_ok.to_string(),
        ]
        .join(",")
    }
}

/// Sample mean, unbiased sample variance and the standard error of the
/// variance from the fourth central moment.
pub fn variance_with_error(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    (mean, var, se)
}

pub fn run_sim(
    model: &StateModel,
    povm: &Povm,
    cfg: &SimConfig,
    opts: &DerivOptions,
) -> Result<SimResult> {
    if cfg.n_samples < MIN_SAMPLES {
        return Err(QcrbError::Config(format!(
            "n_samples must be at least {MIN_SAMPLES}, got {}",
            cfg.n_samples
        )));
    }
    let est = one_step_estimator(model, cfg.theta0, povm, opts)?;
    let outcomes = sample_outcomes(&est.dist, cfg.n_samples, cfg.seed)?;
    let ts: Vec<f64> = outcomes.iter().map(|&x| est.values[x]).collect();
    let (mean, var, se) = variance_with_error(&ts);

    let i_h = helstrom_info_sld(model, cfg.theta0, opts)?;
    let i_wy = wy_info_generic(model, cfg.theta0, SqrtRoute::EigenSolve, opts)?.value;
    let crb = 1.0 / est.info;
    let qcrb = 1.0 / i_h;
    let approx_qcrb = 1.0 / i_wy;
    Ok(SimResult {
        theta0: cfg.theta0,
        seed: cfg.seed,
        n_samples: cfg.n_samples,
        empirical_mean: mean,
        empirical_var: var,
        standard_error_of_var: se,
        crb,
        qcrb,
        approx_qcrb,
        approx_deviation: (approx_qcrb - qcrb) / qcrb,
        exact_variance_residual: est.exact_variance() - crb,
        bound_chain_ok: crb >= qcrb - 1e-12 && var >= crb - 3.0 * se,
    })
}

/// Outcome distribution at `theta` for sampling outside a full simulation.
pub fn distribution_at(model: &StateModel, theta: f64, povm: &Povm) -> Result<OutcomeDistribution> {
    outcome_probs(model, theta, povm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    fn dist(p: &[f64]) -> OutcomeDistribution {
        OutcomeDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn certain_outcome_gives_constant_sequence() {
        let xs = sample_outcomes(&dist(&[0.0, 1.0, 0.0]), 500, 4).unwrap();
        assert!(xs.iter().all(|&x| x == 1));
    }

    #[test]
    fn fair_coin_frequencies() {
        let xs = sample_outcomes(&dist(&[0.5, 0.5]), 100_000, 17).unwrap();
        let f = xs.iter().filter(|&&x| x == 0).count() as f64 / 1e5;
        assert!((f - 0.5).abs() < 0.01);
    }

    #[test]
    fn same_seed_same_sequence() {
        let d = dist(&[0.2, 0.3, 0.5]);
        assert_eq!(
            sample_outcomes(&d, 1000, 8).unwrap(),
            sample_outcomes(&d, 1000, 8).unwrap()
        );
        assert_ne!(
            sample_outcomes(&d, 1000, 8).unwrap(),
            sample_outcomes(&d, 1000, 9).unwrap()
        );
    }

    #[test]
    fn estimator_variance_on_rotation_basis() {
        let m = builtin("qubit-rotation").unwrap();
        let est = one_step_estimator(&m, 0.3, &Povm::basis(2), &DerivOptions::default()).unwrap();
        assert!((est.exact_mean() - 0.3).abs() < 1e-12);
        assert!((est.exact_variance() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn trivial_povm_has_no_estimator() {
        let m = builtin("qubit-rotation").unwrap();
        assert!(matches!(
            one_step_estimator(&m, 0.3, &Povm::trivial(2), &DerivOptions::default()),
            Err(QcrbError::ZeroInformation { .. })
        ));
    }

    #[test]
    fn too_few_samples_rejected() {
        let m = builtin("qubit-rotation").unwrap();
        let cfg = SimConfig {
            theta0: 0.3,
            n_samples: 99,
            seed: 1,
            estimator: EstimatorKind::OneStep,
        };
        assert!(run_sim(&m, &Povm::basis(2), &cfg, &DerivOptions::default()).is_err());
    }

    #[test]
    fn variance_helper_on_known_data() {
        let (mean, var, _) = variance_with_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean, 2.5);
        assert!((var - 5.0 / 3.0).abs() < 1e-15);
    }
}
