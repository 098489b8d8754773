mod common;

use chist::consistency::{
    check_medium_decoherence, check_sum_rule, check_weak_decoherence, decoherence_functional,
    probability,
};
use chist::histories::{alternative, coarse_members, history_sum, summable};
use chist::sampling;
use chist::scenarios::build_example1;
use common::{random_commuting_family, random_family, random_state, tol};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn functional_is_hermitian_with_real_diagonal(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = sampling::seeded(seed);
        let family = random_family(&mut rng, dim, 2, 3);
        let rho = random_state(&mut rng, dim);
        let members = coarse_members(&family, 64).unwrap();
        for a in &members {
            let daa = decoherence_functional(&a.history, &a.history, &rho).unwrap();
            prop_assert!(daa.im.abs() <= tol().eps_prob);
            prop_assert!(daa.re >= -tol().eps_prob);
            for b in &members {
                let ab = decoherence_functional(&a.history, &b.history, &rho).unwrap();
                let ba = decoherence_functional(&b.history, &a.history, &rho).unwrap();
                prop_assert!((ab - ba.conj()).norm() <= tol().eps_prob);
            }
        }
    }

    #[test]
    fn weak_matches_sum_rule(seed in any::<u64>(), dim in 2usize..=4, slots in 1usize..=3, commuting in any::<bool>()) {
        let mut rng = sampling::seeded(seed);
        let family = if commuting {
            random_commuting_family(&mut rng, dim, slots, 2)
        } else {
            random_family(&mut rng, dim, slots, 2)
        };
        let rho = random_state(&mut rng, dim);
        let weak = check_weak_decoherence(&family, &rho, &tol()).unwrap();
        let rule = check_sum_rule(&family, &rho, &tol()).unwrap();
        prop_assert_eq!(weak.verdict, rule.verdict, "weak {} vs rule {}", weak.worst_residual, rule.worst_residual);
        if commuting {
            prop_assert!(weak.verdict);
        }
    }

    #[test]
    fn commuting_families_are_medium_decoherent(seed in any::<u64>(), dim in 2usize..=5, slots in 1usize..=3) {
        let mut rng = sampling::seeded(seed);
        let family = random_commuting_family(&mut rng, dim, slots, 3);
        let rho = random_state(&mut rng, dim);
        prop_assert!(check_medium_decoherence(&family, &rho, &tol()).unwrap().verdict);
    }

    #[test]
    fn medium_implies_weak(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = sampling::seeded(seed);
        let family = if seed % 2 == 0 {
            random_commuting_family(&mut rng, dim, 2, 3)
        } else {
            random_family(&mut rng, dim, 2, 3)
        };
        let rho = random_state(&mut rng, dim);
        if check_medium_decoherence(&family, &rho, &tol()).unwrap().verdict {
            prop_assert!(check_weak_decoherence(&family, &rho, &tol()).unwrap().verdict);
        }
    }

    /// Medium decoherence of the elementary histories carries over to every
    /// alternative pair of coarse-grained members, and probabilities add.
    #[test]
    fn medium_propagates_to_members(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = sampling::seeded(seed);
        let family = random_commuting_family(&mut rng, dim, 2, 3);
        let rho = random_state(&mut rng, dim);
        let members = coarse_members(&family, 64).unwrap();
        for a in &members {
            for b in &members {
                if !alternative(&a.history, &b.history, &tol()) {
                    continue;
                }
                let d = decoherence_functional(&a.history, &b.history, &rho).unwrap();
                prop_assert!(d.norm() <= tol().eps_prob);
                if summable(&a.history, &b.history, &tol()).is_some() {
                    let sum = history_sum(&a.history, &b.history, &tol()).unwrap();
                    let lhs = probability(&sum, &rho).unwrap();
                    let rhs = probability(&a.history, &rho).unwrap() + probability(&b.history, &rho).unwrap();
                    prop_assert!((lhs - rhs).abs() <= tol().eps_prob);
                }
            }
        }
    }
}

#[test]
fn weak_without_medium() {
    let ex = build_example1(3, FRAC_PI_2, Some(FRAC_PI_2)).unwrap();
    let weak = check_weak_decoherence(&ex.family, &ex.rho1, &tol()).unwrap();
    let medium = check_medium_decoherence(&ex.family, &ex.rho1, &tol()).unwrap();
    assert!(weak.verdict, "weak residual {}", weak.worst_residual);
    assert!(!medium.verdict, "medium residual {}", medium.worst_residual);
}
