//! Finite-outcome measurements: POVMs, outcome distributions through the
//! trace rule, classical Fisher information and the information inequality
//! check against the Helstrom information.
//!
//! Only discrete outcome spaces are modelled; the Fisher integral is a sum
//! over outcomes with nonzero probability.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QcrbError, Result};
use crate::linalg::{eigh, HermitianMatrix};
use crate::models::{random_psd, DerivOptions, SqrtRoute, StateModel};
use crate::quantum::{helstrom_info_sld, wy_info_generic};

/// Effects may have eigenvalues down to `-EFFECT_PSD_TOL`.
pub const EFFECT_PSD_TOL: f64 = 1e-10;
/// Frobenius tolerance on `sum_x m_x - I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Outcomes with probability at or below this are outside the support.
pub const SUPPORT_PROB: f64 = 1e-12;
/// Score numerators above this on a null outcome make the Fisher sum diverge.
pub const SUPPORT_SCORE_TOL: f64 = 1e-8;
/// Slack in `i <= I_H`.
pub const BOUND_SLACK: f64 = 1e-9;
const MAX_POVM_RETRIES: usize = 10;

/// A finite POVM `{m_x}`: PSD effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(QcrbError::InvalidPovm("no effects".into()));
        };
        let n = first.dim();
        let mut sum = HermitianMatrix::zeros(n);
        for (x, m) in effects.iter().enumerate() {
            if m.dim() != n {
                return Err(QcrbError::Dimension {
                    expected: n,
                    found: m.dim(),
                });
            }
            let min = eigh(m)?.values[0];
            if min < -EFFECT_PSD_TOL {
                return Err(QcrbError::InvalidPovm(format!(
                    "effect {x} has eigenvalue {min:e}"
                )));
            }
            sum = sum.add(m);
        }
        let defect = sum.frobenius_distance(&HermitianMatrix::identity(n));
        if defect > COMPLETENESS_TOL {
            return Err(QcrbError::InvalidPovm(format!(
                "effects sum to identity only within {defect:e}"
            )));
        }
        Ok(Self { effects })
    }

    /// Projective measurement in the computational basis.
    pub fn basis(dim: usize) -> Self {
        let effects = (0..dim)
            .map(|i| {
                let mut d = vec![0.0; dim];
                d[i] = 1.0;
                HermitianMatrix::from_real_diagonal(&d)
            })
            .collect();
        Self { effects }
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            effects: vec![HermitianMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    /// `||sum_x m_x - I||_F`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.dim();
        let sum = self
            .effects
            .iter()
            .fold(HermitianMatrix::zeros(n), |acc, m| acc.add(m));
        sum.frobenius_distance(&HermitianMatrix::identity(n))
    }

    /// Coarse-graining that replaces effects `a` and `b` by `m_a + m_b`.
    pub fn merge(&self, a: usize, b: usize) -> Result<Self> {
        let k = self.len();
        if a >= k || b >= k || a == b {
            return Err(QcrbError::InvalidPovm(format!(
                "cannot merge outcomes {a} and {b} of {k}"
            )));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let mut effects = self.effects.clone();
        let merged = effects.remove(hi);
        effects[lo] = effects[lo].add(&merged);
        Ok(Self { effects })
    }
}

/// Seeded random POVM: `A_x = B_x B_x*` normalised by `S^{-1/2} A_x S^{-1/2}`
/// with `S = sum_x A_x`.
pub fn random_povm(dim: usize, n_effects: usize, seed: u64) -> Result<Povm> {
    if n_effects == 0 || dim == 0 {
        return Err(QcrbError::InvalidPovm(
            "need at least one effect and dimension one".into(),
        ));
    }
    if n_effects == 1 {
        return Ok(Povm::trivial(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_POVM_RETRIES {
        let raw: Vec<HermitianMatrix> = (0..n_effects).map(|_| random_psd(dim, &mut rng)).collect();
        let s = raw
            .iter()
            .fold(HermitianMatrix::zeros(dim), |acc, a| acc.add(a));
        let eig = eigh(&s)?;
        if eig.values[0] <= 1e-10 * eig.values[dim - 1].max(1.0) {
            log::debug!("random POVM draw with singular normaliser, retrying");
            continue;
        }
        let inv_sqrt = eig.map_eigenvalues(|l| 1.0 / l.sqrt());
        let effects: Vec<HermitianMatrix> = raw
            .iter()
            .map(|a| {
                let m = &(inv_sqrt.as_matrix() * a.as_matrix()) * inv_sqrt.as_matrix();
                HermitianMatrix::hermitian_part(&m)
            })
            .collect();
        return Povm::new(effects);
    }
    Err(QcrbError::InvalidPovm(format!(
        "normaliser singular in {MAX_POVM_RETRIES} draws"
    )))
}

/// Outcome probabilities `p_x = tr(rho m_x)`, clamped at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -SUPPORT_PROB) {
            return Err(QcrbError::InvalidPovm(format!(
                "negative probability {p:e}"
            )));
        }
        let probs: Vec<f64> = probs.into_iter().map(|p| p.max(0.0)).collect();
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(QcrbError::InvalidPovm(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn in_support(&self, x: usize) -> bool {
        self.probs[x] > SUPPORT_PROB
    }

    pub fn support(&self) -> Vec<bool> {
        (0..self.probs.len()).map(|x| self.in_support(x)).collect()
    }
}

fn check_dims(model: &StateModel, povm: &Povm) -> Result<()> {
    if model.dim() != povm.dim() {
        return Err(QcrbError::Dimension {
            expected: model.dim(),
            found: povm.dim(),
        });
    }
    Ok(())
}

pub fn outcome_probs(model: &StateModel, theta: f64, povm: &Povm) -> Result<OutcomeDistribution> {
    check_dims(model, povm)?;
    let rho = model.rho_at(theta)?;
    OutcomeDistribution::new(
        povm.effects
            .iter()
            .map(|m| rho.matrix().trace_inner(m))
            .collect(),
    )
}

/// Score numerators `tr(rho' m_x)`.
pub fn score_numerators(
    model: &StateModel,
    theta: f64,
    povm: &Povm,
    opts: &DerivOptions,
) -> Result<Vec<f64>> {
    check_dims(model, povm)?;
    let d = model.drho_at(theta, opts)?;
    Ok(povm.effects.iter().map(|m| d.trace_inner(m)).collect())
}

/// Per-outcome probabilities and score numerators with the support guard
/// applied.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeScores {
    pub dist: OutcomeDistribution,
    pub scores: Vec<f64>,
}

impl OutcomeScores {
    pub fn fisher(&self) -> f64 {
        self.dist
            .probs
            .iter()
            .zip(&self.scores)
            .filter(|(p, _)| **p > SUPPORT_PROB)
            .map(|(p, s)| s * s / p)
            .sum()
    }
}

pub fn outcome_scores(
    model: &StateModel,
    theta: f64,
    povm: &Povm,
    opts: &DerivOptions,
) -> Result<OutcomeScores> {
    let dist = outcome_probs(model, theta, povm)?;
    let scores = score_numerators(model, theta, povm, opts)?;
    for (x, (&p, &s)) in dist.probs.iter().zip(&scores).enumerate() {
        if p <= SUPPORT_PROB && s.abs() > SUPPORT_SCORE_TOL {
            return Err(QcrbError::SupportRegularity {
                outcome: x,
                prob: p,
                score: s,
            });
        }
    }
    Ok(OutcomeScores { dist, scores })
}

/// Classical Fisher information `sum_x tr(rho' m_x)^2 / p_x` over the support.
pub fn classical_fisher(
    model: &StateModel,
    theta: f64,
    povm: &Povm,
    opts: &DerivOptions,
) -> Result<f64> {
    Ok(outcome_scores(model, theta, povm, opts)?.fisher())
}

/// Classical Fisher information against the Helstrom information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub i: f64,
    pub i_h: f64,
    pub i_wy: f64,
    /// `i_h - i`.
    pub gap: f64,
    pub ok: bool,
    pub inv_i: Option<f64>,
    pub inv_i_h: Option<f64>,
    pub inv_i_wy: Option<f64>,
}

pub fn bound_check(
    model: &StateModel,
    theta: f64,
    povm: &Povm,
    opts: &DerivOptions,
) -> Result<BoundCheck> {
    let i = classical_fisher(model, theta, povm, opts)?;
    let i_h = helstrom_info_sld(model, theta, opts)?;
    let i_wy = wy_info_generic(model, theta, SqrtRoute::EigenSolve, opts)?.value;
    let recip = |v: f64| (v > 0.0).then(|| 1.0 / v);
    Ok(BoundCheck {
        i,
        i_h,
        i_wy,
        gap: i_h - i,
        ok: i <= i_h + BOUND_SLACK,
        inv_i: recip(i),
        inv_i_h: recip(i_h),
        inv_i_wy: recip(i_wy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    #[test]
    fn rotation_basis_probabilities() {
        let m = builtin("qubit-rotation").unwrap();
        let d = outcome_probs(&m, 0.3, &Povm::basis(2)).unwrap();
        assert!((d.probs[0] - 0.3f64.cos().powi(2)).abs() < 1e-15);
        assert!((d.probs[1] - 0.3f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn trivial_povm_has_one_certain_outcome() {
        let m = builtin("sine-weight-mixture").unwrap();
        let d = outcome_probs(&m, 0.4, &Povm::trivial(2)).unwrap();
        assert_eq!(d.probs.len(), 1);
        assert!((d.probs[0] - 1.0).abs() < 1e-15);
        let i = classical_fisher(&m, 0.4, &Povm::trivial(2), &DerivOptions::default()).unwrap();
        assert!(i.abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_gives_uniform_outcomes() {
        let m = builtin("sine-weight-mixture").unwrap();
        let d = outcome_probs(&m, 0.0, &random_povm(2, 2, 1).unwrap()).unwrap();
        let d_basis = outcome_probs(&m, 0.0, &Povm::basis(2)).unwrap();
        assert!((d_basis.probs[0] - 0.5).abs() < 1e-15);
        assert!((d.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_basis_attains_helstrom() {
        let m = builtin("qubit-rotation").unwrap();
        let c = bound_check(&m, 0.3, &Povm::basis(2), &DerivOptions::default()).unwrap();
        assert!((c.i - 4.0).abs() < 1e-12);
        assert!(c.gap.abs() < 1e-12);
        assert!(c.ok);
    }

    #[test]
    fn trivial_povm_gap_is_helstrom() {
        let m = builtin("constant-weight-mixture").unwrap();
        let c = bound_check(&m, 0.2, &Povm::trivial(2), &DerivOptions::default()).unwrap();
        assert!((c.gap - 2.56).abs() < 1e-12);
        assert_eq!(c.inv_i, None);
    }

    #[test]
    fn null_outcome_with_score_is_rejected() {
        let m = builtin("qubit-rotation").unwrap();
        // at theta = 0 outcome 1 has p = 0 and score tr(rho' m_1) = sin(0) = 0
        assert!(classical_fisher(&m, 0.0, &Povm::basis(2), &DerivOptions::default()).is_ok());
        let plus_minus = Povm::new(vec![
            HermitianMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
            HermitianMatrix::from_real_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]).unwrap(),
        ])
        .unwrap();
        // just past pi/4 the minus outcome has p ~ 1e-13 but score ~ 6e-7
        let err = classical_fisher(
            &m,
            std::f64::consts::FRAC_PI_4 + 3e-7,
            &plus_minus,
            &DerivOptions::default(),
        );
        assert!(matches!(
            err,
            Err(QcrbError::SupportRegularity { outcome: 1, .. })
        ));
    }

    #[test]
    fn random_povm_single_effect_is_identity() {
        let p = random_povm(2, 1, 9).unwrap();
        assert_eq!(p.effects(), &[HermitianMatrix::identity(2)]);
    }

    #[test]
    fn random_povm_is_complete_and_psd() {
        let p = random_povm(2, 2, 5).unwrap();
        assert!(p.completeness_defect() <= 1e-10);
        let p = random_povm(3, 5, 6).unwrap();
        for m in p.effects() {
            assert!(eigh(m).unwrap().values[0] >= -1e-10);
        }
        assert_eq!(random_povm(3, 5, 6).unwrap(), p);
    }

    #[test]
    fn invalid_povms_are_rejected() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        assert!(Povm::new(vec![half.clone()]).is_err());
        assert!(Povm::new(vec![]).is_err());
        let neg = HermitianMatrix::from_real_diagonal(&[1.5, 1.0]);
        let comp = HermitianMatrix::from_real_diagonal(&[-0.5, 0.0]);
        assert!(matches!(
            Povm::new(vec![neg, comp]),
            Err(QcrbError::InvalidPovm(_))
        ));
    }

    #[test]
    fn merging_keeps_completeness() {
        let p = random_povm(3, 4, 2).unwrap();
        let q = p.merge(3, 1).unwrap();
        assert_eq!(q.len(), 3);
        assert!(q.completeness_defect() <= 1e-10);
        assert!(p.merge(1, 1).is_err());
    }
}
