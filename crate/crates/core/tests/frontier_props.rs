use nalgebra::DVector;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cryptodiv::frontier::{self, efficient_frontier, min_variance_for_target, Constraint, MarketMoments, Objective};
use cryptodiv::simulate::random_moments;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(7),
        failure_persistence: None,
        ..Config::default()
    }
}

fn moments(seed: u64, k: usize, n: usize) -> MarketMoments {
    random_moments(&mut ChaCha8Rng::seed_from_u64(seed), k, n)
}

/// Uniform draw from the simplex, or a random affine combination.
fn sample_portfolio(rng: &mut ChaCha8Rng, n: usize, constraint: Constraint) -> DVector<f64> {
    let raw = match constraint {
        Constraint::LongOnly => DVector::from_fn(n, |_, _| -rng.random::<f64>().max(1e-300).ln()),
        Constraint::Unconstrained => DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0)),
    };
    let s = raw.sum();
    if s.abs() < 1e-3 {
        return DVector::from_element(n, 1.0 / n as f64);
    }
    raw / s
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn gmvp_has_the_lowest_frontier_variance(seed in any::<u64>(), k in 2usize..6, n in 1usize..3) {
        let m = moments(seed, k, n);
        for c in [Constraint::Unconstrained, Constraint::LongOnly] {
            let g = frontier::optimal(&m, Objective::Gmvp, c).unwrap();
            let floor = m.portfolio_variance(&g.weights);
            for p in efficient_frontier(&m, c, 12).unwrap() {
                prop_assert!(floor <= p.risk * p.risk * (1.0 + 1e-9) + 1e-15);
            }
        }
    }

    #[test]
    fn tangency_beats_sampled_portfolios(seed in any::<u64>(), k in 2usize..5) {
        let m = moments(seed, k, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for c in [Constraint::Unconstrained, Constraint::LongOnly] {
            let Ok(tp) = frontier::optimal(&m, Objective::Tp, c) else { continue };
            if !(m.portfolio_return(&tp.weights) > 0.0) {
                continue;
            }
            let best = m.sharpe(&tp.weights);
            for _ in 0..200 {
                let w = sample_portfolio(&mut rng, m.len(), c);
                prop_assert!(m.sharpe(&w) <= best + 1e-6, "{c}: {} > {best}", m.sharpe(&w));
            }
        }
    }

    #[test]
    fn tangency_direction_is_scale_free(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let m = moments(seed, 3, 1);
        let Ok(base) = frontier::tangency(&m) else { return Ok(()) };
        let scaled = MarketMoments::new(m.assets.clone(), &m.mu * scale, m.v.clone(), m.k, m.t).unwrap();
        let w = frontier::tangency(&scaled).unwrap();
        let gap = (&w.weights - &base.weights).amax() / base.weights.amax().max(1.0);
        prop_assert!(gap <= 1e-10, "gap {gap:e}");
    }

    #[test]
    fn test_assets_extend_the_frontier(seed in any::<u64>(), k in 2usize..5) {
        let m = moments(seed, k, 1);
        let bench = m.benchmarks_only().unwrap();
        for c in [Constraint::Unconstrained, Constraint::LongOnly] {
            for p in efficient_frontier(&bench, c, 10).unwrap() {
                let w = min_variance_for_target(&m, p.ret, c).unwrap();
                let var = m.portfolio_variance(&w.weights);
                prop_assert!(var <= p.risk * p.risk * (1.0 + 1e-7) + 1e-14, "{c}: {var} > {}", p.risk * p.risk);
            }
        }
    }
}

#[test]
fn closed_forms_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let k = rng.random_range(1..8);
        let n = rng.random_range(1..3);
        let m = random_moments(&mut rng, k, n);
        assert!((frontier::gmvp(&m).unwrap().sum() - 1.0).abs() <= 1e-8);
        if let Ok(tp) = frontier::tangency(&m) {
            assert!((tp.sum() - 1.0).abs() <= 1e-8);
        }
    }
}

#[test]
fn long_only_weights_stay_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let m = random_moments(&mut rng, 4, 1);
        for obj in [Objective::Gmvp, Objective::Tp] {
            let w = frontier::optimal(&m, obj, Constraint::LongOnly).unwrap();
            assert!(w.weights.min() >= -1e-10);
            assert!((w.sum() - 1.0).abs() <= 1e-8);
        }
    }
}
