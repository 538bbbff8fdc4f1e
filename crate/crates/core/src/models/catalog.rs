use super::frame::SmoothFrame;
use super::pure::PureFamily;
use super::qubit::QubitMixtureModel;
use super::spectral::{SpectralMixtureModel, Spectrum};
use super::weight::WeightFunction;
use super::{Family, StateModel};

const FIXED_NAMES: &[&str] = &[
    "qubit-rotation",
    "qubit-phase-rotation",
    "constant-weight-mixture",
    "sine-weight-mixture",
    "logistic-mixture",
    "spectral-rotation-2",
];

/// Names of the models in [`builtin_models`].
pub fn builtin_names() -> Vec<String> {
    builtin_models()
        .iter()
        .map(|m| m.name().to_string())
        .collect()
}

/// The shipped catalog: pure, qubit-mixture and spectral fixtures.
pub fn builtin_models() -> Vec<StateModel> {
    let mut out: Vec<StateModel> = FIXED_NAMES
        .iter()
        .map(|n| builtin(n).expect("fixed catalog names resolve"))
        .collect();
    for (seed, n) in [(11, 3), (12, 5)] {
        out.push(builtin(&format!("pure-random({seed}, {n})")).unwrap());
    }
    for (seed, n) in [(1, 3), (2, 4), (3, 6)] {
        out.push(builtin(&format!("spectral-random({seed}, {n})")).unwrap());
    }
    out
}

/// Looks up a catalog entry. Parametrised entries are written
/// `spectral-random(seed, n)` and `pure-random(seed, n)`.
pub fn builtin(name: &str) -> Option<StateModel> {
    let name = name.trim();
    let model = match name {
        "qubit-rotation" => StateModel::new(name, Family::Pure(PureFamily::rotation())),
        "qubit-phase-rotation" => StateModel::new(name, Family::Pure(PureFamily::phase_rotation())),
        "constant-weight-mixture" => StateModel::qubit_mixture(
            name,
            QubitMixtureModel::canonical(PureFamily::rotation(), WeightFunction::Constant(0.9))
                .ok()?,
        ),
        "sine-weight-mixture" => StateModel::qubit_mixture(
            name,
            QubitMixtureModel::canonical(
                PureFamily::rotation(),
                WeightFunction::Sine { amplitude: 1.0 },
            )
            .ok()?,
        )
        .with_domain(-1.5, 1.5),
        "logistic-mixture" => StateModel::qubit_mixture(
            name,
            QubitMixtureModel::canonical(
                PureFamily::phase_rotation(),
                WeightFunction::Logistic {
                    slope: 0.8,
                    offset: 0.3,
                },
            )
            .ok()?,
        ),
        "spectral-rotation-2" => StateModel::spectral(
            name,
            SpectralMixtureModel::new(
                Spectrum::constant(vec![0.9, 0.1]).ok()?,
                SmoothFrame::plane_rotation(2),
            )
            .ok()?,
        ),
        _ => {
            let (head, seed, n) = parse_parametrised(name)?;
            match head {
                "spectral-random" => StateModel::spectral(
                    format!("spectral-random({seed}, {n})"),
                    SpectralMixtureModel::random(n, seed),
                ),
                "pure-random" => StateModel::new(
                    format!("pure-random({seed}, {n})"),
                    Family::Pure(PureFamily::random_smooth(n, seed)),
                ),
                _ => return None,
            }
        }
    };
    Some(model)
}

fn parse_parametrised(name: &str) -> Option<(&str, u64, usize)> {
    let open = name.find('(')?;
    let inner = name[open + 1..].strip_suffix(')')?;
    let mut parts = inner.split(',').map(str::trim);
    let seed = parts.next()?.parse().ok()?;
    let n: usize = parts.next()?.parse().ok()?;
    if parts.next().is_some() || n < 2 {
        return None;
    }
    Some((&name[..open], seed, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_entries_resolve_by_name() {
        for m in builtin_models() {
            let again = builtin(m.name()).unwrap();
            assert_eq!(again.name(), m.name());
        }
    }

    #[test]
    fn sine_weight_mixture_at_zero_is_maximally_mixed() {
        let m = builtin("sine-weight-mixture").unwrap();
        let rho = m.rho_at(0.0).unwrap();
        assert!((rho.eigenvalues()[0] - 0.5).abs() < 1e-15);
        assert!((rho.eigenvalues()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_names() {
        assert!(builtin("nope").is_none());
        assert!(builtin("spectral-random(1)").is_none());
        assert!(builtin("spectral-random(1, 1)").is_none());
        assert!(builtin("spectral-random(x, 3)").is_none());
    }
}
