use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use cryptodiv::analytics::{jarque_bera, kendall, max_drawdown, pearson, rolling_correlation, sharpe_ratio, sortino_ratio, spearman};

fn config() -> Config {
    Config {
        cases: 128,
        rng_seed: RngSeed::Fixed(3),
        failure_persistence: None,
        ..Config::default()
    }
}

fn series(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.2f64..0.2, len)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (5usize..60).prop_flat_map(|n| (prop::collection::vec(-0.2f64..0.2, n), prop::collection::vec(-0.2f64..0.2, n)))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn correlations_ignore_increasing_affine_maps((x, y) in pair(), a in 0.1f64..10.0, b in -1.0f64..1.0) {
        let z: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        for f in [pearson, spearman, kendall] {
            match (f(&x, &y), f(&x, &z)) {
                (Some(r0), Some(r1)) => prop_assert!((r0 - r1).abs() < 1e-10, "{r0} vs {r1}"),
                (None, None) => {}
                other => prop_assert!(false, "{other:?}"),
            }
        }
    }

    #[test]
    fn ratios_share_the_sign_of_the_mean(x in series(4..80)) {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        if let Some(s) = sharpe_ratio(&x) {
            prop_assert!(s * mean >= 0.0);
        }
        if let Some(s) = sortino_ratio(&x) {
            prop_assert!(s * mean >= 0.0);
        }
    }

    #[test]
    fn rising_wealth_has_no_drawdown(steps in prop::collection::vec(0.0f64..0.1, 1..50)) {
        let mut w = vec![100.0];
        for s in steps {
            let last = *w.last().unwrap();
            w.push(last * (1.0 + s));
        }
        prop_assert_eq!(max_drawdown(&w), 0.0);
    }

    #[test]
    fn drawdown_is_a_fraction(w in prop::collection::vec(0.01f64..1000.0, 1..50)) {
        let d = max_drawdown(&w);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn jarque_bera_is_a_valid_test(x in series(4..200)) {
        if let Ok((stat, p)) = jarque_bera(&x) {
            prop_assert!(stat >= 0.0);
            prop_assert!(p > 0.0 && p <= 1.0);
        }
    }

    #[test]
    fn full_window_rolling_equals_static((x, y) in pair()) {
        let r = rolling_correlation(&x, &y, x.len()).unwrap();
        prop_assert_eq!(r.rho.len(), 1);
        match (r.rho[0], pearson(&x, &y)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12),
            (a, b) => prop_assert_eq!(a, b),
        }
    }
}
