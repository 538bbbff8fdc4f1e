//! JSON configuration for models and POVMs.
//!
//! Model files:
//!
//! ```json
//! { "kind": "qubit_mixture", "dim": 2,
//!   "psi1": { "name": "rotation", "params": [] },
//!   "weight": { "form": "constant", "params": [0.9] },
//!   "seed": 0, "theta_domain": [-1.2, 1.2] }
//! ```
//!
//! `kind` is one of `pure`, `qubit_mixture`, `spectral` or `builtin` (the
//! last takes a catalog `name`). Spectral models accept an optional constant
//! `lambdas` vector; without it both spectrum and frame are drawn from
//! `seed`.
//!
//! POVM files:
//!
//! ```json
//! { "kind": "explicit", "dim": 2,
//!   "effects": [ [[1, 0], [0, 0]], [[0, 0], [0, 1]] ] }
//! ```
//!
//! Matrix entries are either a real number or a `[re, im]` pair.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{random_povm, Povm};
use crate::error::{QcrbError, Result};
use crate::linalg::{CMatrix, HermitianMatrix};
use crate::models::{
    builtin, PureFamily, QubitMixtureModel, SmoothFrame, SpectralMixtureModel, Spectrum,
    StateModel, WeightFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKindConfig {
    Pure,
    QubitMixture,
    Spectral,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiConfig {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightForm {
    Constant,
    Sine,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub form: WeightForm,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKindConfig,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub psi1: Option<PsiConfig>,
    #[serde(default)]
    pub weight: Option<WeightConfig>,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub theta_domain: Option<[f64; 2]>,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> QcrbError {
    QcrbError::Config(format!("field `{field}`: {msg}"))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| QcrbError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn build(&self) -> Result<StateModel> {
        let model = match self.kind {
            ModelKindConfig::Builtin => {
                let name = self
                    .name
                    .as_deref()
                    .ok_or_else(|| field_err("name", "required for builtin models"))?;
                builtin(name).ok_or_else(|| field_err("name", format!("unknown model `{name}`")))?
            }
            ModelKindConfig::Pure => {
                let dim = self.dim.unwrap_or(2);
                let family = self.pure_family(dim)?;
                let name = self
                    .name
                    .clone()
                    .unwrap_or_else(|| family.name().to_string());
                StateModel::new(name, crate::models::Family::Pure(family))
            }
            ModelKindConfig::QubitMixture => {
                if let Some(d) = self.dim.filter(|&d| d != 2) {
                    return Err(field_err(
                        "dim",
                        format!("qubit mixtures have dim 2, got {d}"),
                    ));
                }
                let psi1 = self.pure_family(2)?;
                let weight = self.weight_function()?;
                let q =
                    QubitMixtureModel::canonical(psi1, weight).map_err(|e| field_err("psi1", e))?;
                StateModel::qubit_mixture(
                    self.name.clone().unwrap_or_else(|| "qubit-mixture".into()),
                    q,
                )
            }
            ModelKindConfig::Spectral => {
                let dim = self
                    .dim
                    .ok_or_else(|| field_err("dim", "required for spectral models"))?;
                if dim < 2 {
                    return Err(field_err("dim", "must be at least 2"));
                }
                let seed = self.seed.unwrap_or(0);
                let model = match &self.lambdas {
                    None => SpectralMixtureModel::random(dim, seed),
                    Some(l) => {
                        if l.len() != dim {
                            return Err(field_err(
                                "lambdas",
                                format!("expected {dim} entries, got {}", l.len()),
                            ));
                        }
                        let spectrum =
                            Spectrum::constant(l.clone()).map_err(|e| field_err("lambdas", e))?;
                        let frame = match self.psi1.as_ref().map(|p| p.name.as_str()) {
                            Some("rotation") => SmoothFrame::plane_rotation(dim),
                            None | Some("random") => {
                                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                                SmoothFrame::random(dim, 0.5, &mut rng)
                            }
                            Some(other) => {
                                return Err(field_err(
                                    "psi1.name",
                                    format!(
                                        "spectral frames are `rotation` or `random`, got `{other}`"
                                    ),
                                ))
                            }
                        };
                        SpectralMixtureModel::new(spectrum, frame)?
                    }
                };
                let name = self
                    .name
                    .clone()
                    .unwrap_or_else(|| format!("spectral({seed}, {dim})"));
                StateModel::spectral(name, model)
            }
        };
        match self.theta_domain {
            Some([lo, hi]) if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => Err(field_err(
                "theta_domain",
                format!("need finite lo < hi, got [{lo}, {hi}]"),
            )),
            Some([lo, hi]) => Ok(model.with_domain(lo, hi)),
            None => Ok(model),
        }
    }

    /// The `psi1` family of this config in dimension `dim`.
    pub fn pure_family(&self, dim: usize) -> Result<PureFamily> {
        let psi = self
            .psi1
            .as_ref()
            .ok_or_else(|| field_err("psi1", "required"))?;
        let fixed = |f: PureFamily| {
            if dim != 2 {
                return Err(field_err(
                    "dim",
                    format!("`{}` is a qubit family", psi.name),
                ));
            }
            if !psi.params.is_empty() {
                return Err(field_err("psi1.params", "takes no parameters"));
            }
            Ok(f)
        };
        match psi.name.as_str() {
            "rotation" => fixed(PureFamily::rotation()),
            "phase_rotation" | "phase-rotation" => fixed(PureFamily::phase_rotation()),
            "random" => {
                if dim < 2 {
                    return Err(field_err("dim", "must be at least 2"));
                }
                Ok(PureFamily::random_smooth(dim, self.seed.unwrap_or(0)))
            }
            other => Err(field_err(
                "psi1.name",
                format!("unknown family `{other}` (rotation, phase_rotation, random)"),
            )),
        }
    }

    fn weight_function(&self) -> Result<WeightFunction> {
        let w = self
            .weight
            .as_ref()
            .ok_or_else(|| field_err("weight", "required for qubit mixtures"))?;
        let p = &w.params;
        let arity = |n: usize| {
            if p.len() != n {
                Err(field_err(
                    "weight.params",
                    format!("expected {n} values, got {}", p.len()),
                ))
            } else if p.iter().any(|v| !v.is_finite()) {
                Err(field_err("weight.params", "non-finite value"))
            } else {
                Ok(())
            }
        };
        match w.form {
            WeightForm::Constant => {
                arity(1)?;
                if !(p[0] > 0.0 && p[0] < 1.0) {
                    return Err(field_err(
                        "weight.params",
                        format!("w = {} not in (0, 1)", p[0]),
                    ));
                }
                Ok(WeightFunction::Constant(p[0]))
            }
            WeightForm::Sine => {
                if p.is_empty() {
                    return Ok(WeightFunction::Sine { amplitude: 1.0 });
                }
                arity(1)?;
                Ok(WeightFunction::Sine { amplitude: p[0] })
            }
            WeightForm::Logistic => {
                arity(2)?;
                Ok(WeightFunction::Logistic {
                    slope: p[0],
                    offset: p[1],
                })
            }
        }
    }
}

/// Loads and builds a model from JSON text.
pub fn model_from_json(text: &str) -> Result<StateModel> {
    ModelConfig::from_json(text)?.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PovmKind {
    Basis,
    Random,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryConfig {
    Real(f64),
    Complex([f64; 2]),
}

impl From<EntryConfig> for Complex64 {
    fn from(e: EntryConfig) -> Self {
        match e {
            EntryConfig::Real(r) => Complex64::new(r, 0.0),
            EntryConfig::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmConfig {
    pub kind: PovmKind,
    pub dim: usize,
    #[serde(default)]
    pub n_effects: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub effects: Option<Vec<Vec<Vec<EntryConfig>>>>,
}

impl PovmConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn build(&self) -> Result<Povm> {
        if self.dim == 0 {
            return Err(field_err("dim", "must be positive"));
        }
        match self.kind {
            PovmKind::Basis => Ok(Povm::basis(self.dim)),
            PovmKind::Random => {
                let k = self
                    .n_effects
                    .ok_or_else(|| field_err("n_effects", "required for random POVMs"))?;
                random_povm(self.dim, k, self.seed.unwrap_or(0))
                    .map_err(|e| field_err("n_effects", e))
            }
            PovmKind::Explicit => {
                let raw = self
                    .effects
                    .as_ref()
                    .ok_or_else(|| field_err("effects", "required for explicit POVMs"))?;
                let mut effects = Vec::with_capacity(raw.len());
                for (x, rows) in raw.iter().enumerate() {
                    let field = format!("effects[{x}]");
                    if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                        return Err(field_err(
                            &field,
                            format!("expected {0}x{0} matrix", self.dim),
                        ));
                    }
                    let rows: Vec<Vec<Complex64>> = rows
                        .iter()
                        .map(|r| r.iter().map(|&e| e.into()).collect())
                        .collect();
                    let m = CMatrix::from_rows(&rows).map_err(|e| field_err(&field, e))?;
                    effects.push(HermitianMatrix::new(m).map_err(|e| field_err(&field, e))?);
                }
                Povm::new(effects).map_err(|e| field_err("effects", e))
            }
        }
    }
}

pub fn povm_from_json(text: &str) -> Result<Povm> {
    PovmConfig::from_json(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_mixture_config() {
        let m = model_from_json(
            r#"{"kind":"qubit_mixture","dim":2,
                "psi1":{"name":"rotation","params":[]},
                "weight":{"form":"constant","params":[0.9]},
                "seed":0,"theta_domain":[-1,1]}"#,
        )
        .unwrap();
        assert_eq!(m.domain(), (-1.0, 1.0));
        let rho = m.rho_at(0.0).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.9).abs() < 1e-15);
    }

    #[test]
    fn builtin_and_spectral_configs() {
        let m = model_from_json(r#"{"kind":"builtin","name":"spectral-random(4, 3)"}"#).unwrap();
        assert_eq!(m.dim(), 3);
        let s = model_from_json(r#"{"kind":"spectral","dim":3,"lambdas":[0.7,0.2,0.1],"seed":2}"#)
            .unwrap();
        let ev = s.rho_at(0.4).unwrap().eigenvalues().to_vec();
        assert!((ev[2] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = model_from_json("{\n  \"kind\": \"pure\",,\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn bad_fields_are_named() {
        let err = model_from_json(
            r#"{"kind":"qubit_mixture","psi1":{"name":"rotation"},
                "weight":{"form":"constant","params":[1.5]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("weight.params"), "{err}");
        let err = model_from_json(r#"{"kind":"pure","psi1":{"name":"helix"}}"#).unwrap_err();
        assert!(err.to_string().contains("psi1.name"), "{err}");
        assert!(model_from_json(r#"{"kind":"pure","bogus":1}"#).is_err());
    }

    #[test]
    fn povm_configs() {
        let p = povm_from_json(r#"{"kind":"basis","dim":3}"#).unwrap();
        assert_eq!(p.len(), 3);
        let p = povm_from_json(r#"{"kind":"random","dim":2,"n_effects":4,"seed":3}"#).unwrap();
        assert_eq!(p.len(), 4);
        let p = povm_from_json(
            r#"{"kind":"explicit","dim":2,
                "effects":[[[0.5,[0,-0.5]],[[0,0.5],0.5]],[[0.5,[0,0.5]],[[0,-0.5],0.5]]]}"#,
        )
        .unwrap();
        assert_eq!(p.len(), 2);
        let err =
            povm_from_json(r#"{"kind":"explicit","dim":2,"effects":[[[1,0],[0,0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("effects"), "{err}");
    }
}
