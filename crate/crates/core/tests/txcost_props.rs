use nalgebra::DVector;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cryptodiv::frontier::{Constraint, Objective};
use cryptodiv::simulate::random_moments;
use cryptodiv::txcost::{
    cost_intersection, default_initial_weights, linear_cost, optimize_with_costs, quadratic_cost, total_cost, CostModel, BASIS_POINT,
};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(9),
        failure_persistence: None,
        ..Config::default()
    }
}

fn permuted(w: &DVector<f64>, order: &[usize]) -> DVector<f64> {
    DVector::from_iterator(w.len(), order.iter().map(|&i| w[i]))
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn total_cost_ignores_order_within_groups(seed in any::<u64>(), k in 1usize..6, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = k + n;
        let old = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let new = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let mut bench: Vec<usize> = (0..k).collect();
        let mut test: Vec<usize> = (k..dim).collect();
        bench.shuffle(&mut rng);
        test.shuffle(&mut rng);
        let order: Vec<usize> = bench.into_iter().chain(test).collect();
        let model = CostModel::default();
        let a = total_cost(&old, &new, &model, k).unwrap();
        let b = total_cost(&permuted(&old, &order), &permuted(&new, &order), &model, k).unwrap();
        prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
    }

    #[test]
    fn quadratic_undercuts_linear_below_the_intersection(c in 1e-4f64..0.05, psi in 0.5f64..10.0, frac in 0.001f64..0.999) {
        let x = cost_intersection(c, psi).unwrap();
        prop_assert!((x - 2.0 / psi).abs() <= 1e-12);
        let dw = frac * x;
        prop_assert!(quadratic_cost(dw, psi * c, 1.0) < linear_cost(dw, c, 1.0));
        prop_assert!(quadratic_cost(x / frac, psi * c, 1.0) > linear_cost(x / frac, c, 1.0));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn solutions_respect_the_budget(seed in any::<u64>(), bp in 1.0f64..500.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_moments(&mut rng, 3, 1);
        let w0 = default_initial_weights(3, 1);
        let model = CostModel::default().with_budget(bp * BASIS_POINT);
        for c in [Constraint::Unconstrained, Constraint::LongOnly] {
            for o in [Objective::Gmvp, Objective::Tp] {
                let s = match optimize_with_costs(&m, &w0, &model, o, c) {
                    Ok(s) => s,
                    Err(cryptodiv::Error::NoPositiveReturn(_)) if o == Objective::Tp => continue,
                    Err(e) => return Err(TestCaseError::fail(format!("{c} {o} {bp} BP: {e}"))),
                };
                prop_assert!(s.cost_spent <= model.budget * model.v0 + 1e-10, "{} > {}", s.cost_spent, model.budget);
                prop_assert!((s.weights.sum() - 1.0).abs() <= 1e-8);
                if c == Constraint::LongOnly {
                    prop_assert!(s.weights.weights.min() >= -1e-10);
                }
                prop_assert!(s.diagnostics.kkt_residual <= 1e-8 || s.diagnostics.iterations == 0);
            }
        }
    }
}
