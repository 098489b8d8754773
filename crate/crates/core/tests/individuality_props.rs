mod common;

use chist::individuality::{
    default_lambda_grid, individuality_violation_search, mirror_component_decomposition, mixture,
    PropertyPredicate,
};
use chist::matcore::{max_norm, validate_density};
use chist::mirror::{verify_mirror, SearchOptions};
use chist::sampling;
use chist::scenarios::{build_example1, random_commuting_family, random_pointer_instance};
use chist::Error;
use common::{random_state, tol};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mixture_is_affine(seed in any::<u64>(), dim in 1usize..=6, lambda in 0.001f64..0.999) {
        let mut rng = sampling::seeded(seed);
        let (r1, r2) = (random_state(&mut rng, dim), random_state(&mut rng, dim));
        let m = mixture(&r1, &r2, lambda).unwrap();
        prop_assert!(validate_density(m.matrix(), &tol()).is_ok());
        let expected = r1.matrix().as_matrix().map(|z| z * lambda) + r2.matrix().as_matrix().map(|z| z * (1.0 - lambda));
        prop_assert!(max_norm(&(m.matrix().as_matrix() - expected)) <= 1e-14);
        let a = sampling::random_hermitian(&mut rng, dim);
        let tr = |r: &chist::DensityOperator| (a.as_matrix() * r.matrix().as_matrix()).trace().re;
        prop_assert!((tr(&m) - lambda * tr(&r1) - (1.0 - lambda) * tr(&r2)).abs() <= 1e-12);
    }

    #[test]
    fn mirror_of_mixture_splits_over_components(seed in any::<u64>(), dim in 4usize..=8, lambda in 0.05f64..0.95) {
        let mut rng = sampling::seeded(seed);
        let inst = random_pointer_instance(&mut rng, dim).unwrap();
        let rho2 = inst.random_compatible_state(&mut rng).unwrap();
        let rho = mixture(&inst.rho, &rho2, lambda).unwrap();
        prop_assert!(verify_mirror(&inst.t, &inst.h1, &rho, &tol()).unwrap().verified);
        let d = mirror_component_decomposition(&inst.t, &inst.e1, &inst.rho, &rho2, lambda, &tol()).unwrap();
        prop_assert!(d.passed, "{d:?}");
        for r in [&inst.rho, &rho2] {
            prop_assert!(verify_mirror(&inst.t, &inst.h1, r, &tol()).unwrap().verified);
        }
    }

    #[test]
    fn self_decoherence_has_no_individuality_witness(seed in any::<u64>(), dim in 2usize..=3) {
        let mut rng = sampling::seeded(seed);
        let family = random_commuting_family(&mut rng, dim).unwrap();
        let (r1, r2) = (random_state(&mut rng, dim), random_state(&mut rng, dim));
        let pred = PropertyPredicate::self_decoherence(None, SearchOptions::default(), tol());
        let found = individuality_violation_search(&pred, &family, &r1, &r2, &default_lambda_grid(), &tol()).unwrap();
        prop_assert!(found.is_empty());
    }
}

#[test]
fn mixture_rejects_endpoints() {
    let mut rng = sampling::seeded(1);
    let (r1, r2) = (random_state(&mut rng, 2), random_state(&mut rng, 2));
    for lambda in [0.0, 1.0, -0.5, f64::NAN] {
        assert!(matches!(
            mixture(&r1, &r2, lambda),
            Err(Error::LambdaOutOfRange(_))
        ));
    }
    let r3 = random_state(&mut rng, 3);
    assert!(matches!(
        mixture(&r1, &r3, 0.5),
        Err(Error::DimensionMismatch(2, 3))
    ));
}

#[test]
fn example1_self_decoherence_has_no_witness() {
    let pred = PropertyPredicate::self_decoherence(None, SearchOptions::default(), tol());
    for k in 1..10 {
        let theta = k as f64 * PI / 10.0;
        let ex = build_example1(3, theta, None).unwrap();
        let found = individuality_violation_search(
            &pred,
            &ex.family,
            &ex.rho1,
            &ex.rho2,
            &default_lambda_grid(),
            &tol(),
        )
        .unwrap();
        assert!(found.is_empty(), "theta {theta}: {found:?}");
    }
}

#[test]
fn weak_and_linear_positivity_have_witnesses() {
    let ex = build_example1(3, PI / 3.0, None).unwrap();
    let weak = PropertyPredicate::weak(tol());
    let found = individuality_violation_search(
        &weak,
        &ex.family,
        &ex.rho1,
        &ex.rho2,
        &default_lambda_grid(),
        &tol(),
    )
    .unwrap();
    assert_eq!(found.len(), 1);
    assert!((found[0].lambda - 0.5).abs() < 1e-12);

    let ex = build_example1(3, 2.0, Some(PI)).unwrap();
    let lp = PropertyPredicate::linear_positive(tol());
    let found = individuality_violation_search(&lp, &ex.family, &ex.rho1, &ex.rho2, &[0.5], &tol())
        .unwrap();
    assert_eq!(found.len(), 1);
}
