use confcalc::hardy::{ExpWeightConfig, PowerWeightConfig};
use confcalc::optimize::{estimate_best_constant, quotient, OptimizerConfig, QuotientProblem};
use confcalc::{AlphaOrder, BoxDomain, Error, ExponentVec, QuadratureSpec};
use proptest::prelude::*;

fn power_problem(d: usize) -> QuotientProblem {
    let cfg = PowerWeightConfig::new(2.0, 1.0, AlphaOrder::new(0.5).unwrap(), ExponentVec::uniform(2.0, 1).unwrap()).unwrap();
    QuotientProblem::power(&cfg, &BoxDomain::cube(1, 0.5, 2.0).unwrap(), d, (-1.0, 1.0), &QuadratureSpec::default()).unwrap()
}

fn exp_problem(d: usize) -> QuotientProblem {
    let cfg = ExpWeightConfig::new(-0.5, AlphaOrder::new(0.5).unwrap(), ExponentVec::uniform(2.0, 2).unwrap()).unwrap();
    QuotientProblem::exponential(&cfg, &BoxDomain::cube(2, 0.1, 0.5).unwrap(), d, (-1.0, 1.0), &QuadratureSpec::new(4, 8, true).unwrap()).unwrap()
}

fn config(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        restarts: 3,
        max_evals: 600,
        seed,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Same seed and configuration, same estimate bit for bit.
    #[test]
    fn deterministic_under_fixed_seed(seed in any::<u64>()) {
        let pr = power_problem(3);
        let a = estimate_best_constant(&pr, &config(seed), None).unwrap();
        let b = estimate_best_constant(&pr, &config(seed), None).unwrap();
        prop_assert_eq!(a, b);
    }

    /// Growing a nested family from its previous optimum never raises `Q*`.
    #[test]
    fn nested_family_is_monotone(seed in any::<u64>(), d in 1usize..4) {
        let small = estimate_best_constant(&exp_problem(d), &config(seed), None).unwrap();
        let large = estimate_best_constant(&exp_problem(d + 1), &config(seed), Some(&small.theta)).unwrap();
        prop_assert!(large.q_star <= small.q_star, "{} > {}", large.q_star, small.q_star);
    }

    /// Every feasible parameter gives a quotient above the closed-form constant.
    #[test]
    fn quotient_never_below_constant(theta in prop::collection::vec(-1.0f64..1.0, 3)) {
        let pr = power_problem(3);
        let q = quotient(&pr, &theta);
        prop_assert!(q.is_infinite() || q >= pr.constant() - 1e-6, "{q}");
    }
}

#[test]
fn estimates_are_valid_and_zero_dimensional_family_is_exact() {
    let pr = power_problem(0);
    let est = estimate_best_constant(&pr, &config(1), None).unwrap();
    assert_eq!(est.q_star, quotient(&pr, &[]));
    assert!(est.valid(1e-6));
    let est = estimate_best_constant(&exp_problem(2), &config(1), None).unwrap();
    assert!(est.valid(1e-6));
    assert_eq!(est.restart_values.len(), 3);
}

#[test]
fn bad_bounds_and_configs_are_rejected() {
    let cfg = PowerWeightConfig::new(2.0, 1.0, AlphaOrder::new(0.5).unwrap(), ExponentVec::uniform(2.0, 1).unwrap()).unwrap();
    let omega = BoxDomain::cube(1, 0.5, 2.0).unwrap();
    let spec = QuadratureSpec::default();
    assert!(matches!(
        QuotientProblem::power(&cfg, &omega, 2, (0.5, 1.0), &spec),
        Err(Error::InvalidParameter(_))
    ));
    let bad = OptimizerConfig {
        restarts: 1,
        ..Default::default()
    };
    assert!(estimate_best_constant(&power_problem(1), &bad, None).is_err());
}
