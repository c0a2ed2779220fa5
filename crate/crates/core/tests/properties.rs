mod common;

use filtration_core::construction::generators::{
    cox_scenario, independent_scenario, predictable_scenario, random_martingale, random_measure, random_scenario, rng,
};
use filtration_core::decomposition::{
    canonical_decomposition, compensator_f, compensator_g_jeulin_yor, compensator_separable, GDecomposition, GVariant,
};
use filtration_core::finance::{cox_market, immersion_measure, information_drift, project_measure};
use filtration_core::hypotheses::{check_complete_separability, verify_ed};
use filtration_core::random_time::{conditional_distribution, TimeModel};
use filtration_core::rational::int;
use filtration_core::{Error, Measure, Process, ProcessKind, RandomVariable};
use proptest::prelude::*;

use common::toy;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_martingale_part_is_a_g_martingale(seed in 0u64..100_000) {
        let (space, tau) = random_scenario(seed);
        let u = random_martingale(&mut rng(seed ^ 1), &space);
        let dec = canonical_decomposition(&space, &tau, &u).unwrap();
        prop_assert!(dec.verdict.is_pass());
        // brute force on the enlarged partitions
        let toy = toy(&space, &tau);
        let m = dec.martingale_part.values();
        for t in 1..=space.horizon() {
            let prior = toy.g_cond(t - 1, m[t].values());
            prop_assert_eq!(prior.as_slice(), m[t - 1].values());
        }
    }

    #[test]
    fn perturbed_drift_is_rejected(seed in 0u64..100_000, c in 1i64..5) {
        let (space, tau) = random_scenario(seed);
        let u = random_martingale(&mut rng(seed ^ 2), &space);
        let dec = canonical_decomposition(&space, &tau, &u).unwrap();
        let bump = Process::from_fn(space.slots(), ProcessKind::Predictable, |t| {
            RandomVariable::constant(space.n(), if t == 0 { int(0) } else { int(c) })
        });
        let model = TimeModel::new(&space, &tau);
        let other = GDecomposition::from_drift(&model, u, &dec.drift + &bump, GVariant::ViaInitial);
        prop_assert!(!other.verdict.is_pass());
    }

    #[test]
    fn drift_is_linear_in_u(seed in 0u64..100_000, a in -3i64..=3, b in -3i64..=3) {
        let (space, tau) = random_scenario(seed);
        let u = random_martingale(&mut rng(seed ^ 3), &space);
        let v = random_martingale(&mut rng(seed ^ 4), &space);
        let w = &u.scale(&int(a)) + &v.scale(&int(b));
        let du = canonical_decomposition(&space, &tau, &u).unwrap().drift;
        let dv = canonical_decomposition(&space, &tau, &v).unwrap().drift;
        let dw = canonical_decomposition(&space, &tau, &w).unwrap().drift;
        let expected = &du.scale(&int(a)) + &dv.scale(&int(b));
        prop_assert_eq!(dw.values(), expected.values());
    }

    #[test]
    fn separable_compensators_agree(seed in 0u64..100_000) {
        let c = predictable_scenario(seed, true);
        let (space, tau) = (c.space(), c.tau());
        let rep = check_complete_separability(space, &conditional_distribution(space, tau));
        prop_assume!(rep.factorization.is_some());
        match compensator_separable(space, tau, rep.factorization.as_ref().unwrap()) {
            Ok((hp, hpg)) => {
                prop_assert_eq!(hp, compensator_f(space, tau));
                prop_assert_eq!(hpg, compensator_g_jeulin_yor(space, tau).unwrap());
            }
            Err(e) => prop_assert!(matches!(e, Error::SeparabilityPreconditionFails(_))),
        }
    }

    #[test]
    fn cox_ed_data_verifies(seed in 0u64..100_000) {
        let cox = cox_scenario(seed);
        let ext = &cox.extension;
        prop_assert!(verify_ed(ext.space(), &cox.field_lifted, &cox.ed_lifted).is_pass());
    }

    #[test]
    fn kw_residuals_are_orthogonal(seed in 0u64..100_000) {
        let (market, ed) = cox_market(seed);
        let info = information_drift(&market, &ed).unwrap();
        prop_assert!(info.orthogonality.is_pass());
        prop_assert!(info.decomposition.verdict.is_pass());
    }

    #[test]
    fn immersion_measure_turns_f_martingales_into_g_martingales(seed in 0u64..100_000) {
        let c = predictable_scenario(seed, true);
        match immersion_measure(c.space(), c.tau()) {
            Ok(m) => prop_assert!(m.verdict().is_pass()),
            Err(e) => {
                let refused = matches!(e, Error::SeparabilityPreconditionFails(_) | Error::DegenerateDenominator { .. });
                prop_assert!(refused, "unexpected refusal {:?}", e);
            }
        }
    }

    #[test]
    fn projected_measure_matches_target_on_f(seed in 0u64..100_000) {
        let (space, tau) = independent_scenario(seed);
        let mut r = rng(seed ^ 5);
        let target = random_measure(&mut r, &space);
        let reference = Measure::identity(&space);
        let proj = project_measure(&space, &tau, &reference, &target).unwrap();
        prop_assert!(proj.verdict().is_pass());
    }

    #[test]
    fn projection_of_p_onto_itself_is_p(seed in 0u64..100_000) {
        let (space, tau) = random_scenario(seed);
        let id = Measure::identity(&space);
        let proj = project_measure(&space, &tau, &id, &id).unwrap();
        prop_assert_eq!(proj.measure.density(), id.density());
        prop_assert!(proj.agrees_on_f.is_pass());
    }
}
