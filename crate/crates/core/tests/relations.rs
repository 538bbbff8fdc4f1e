use qcrb_core::models::{builtin_models, DerivOptions};
use qcrb_core::quantum::{relation_report, Tolerances};

#[test]
fn catalog_residuals_within_tolerance() {
    let tols = Tolerances::default();
    let opts = DerivOptions::default();
    for model in builtin_models() {
        for theta in model.sample_grid() {
            let r = relation_report(&model, theta, &opts).unwrap();
            let failures = r.failures(&tols);
            assert!(
                failures.is_empty(),
                "{} at {theta}: {failures:?} errors {:?}",
                model.name(),
                r.errors
            );
            assert!(r.i_h_sld <= r.i_wy_generic + 1e-10, "{}", model.name());
        }
    }
}
