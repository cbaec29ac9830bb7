//! Tail probabilities of the reference distributions used by the tests.
//!
//! Backed by statrs, whose distributions evaluate the regularized incomplete
//! gamma and beta functions.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// `P(X > x)` for `X ~ chi^2(dof)`.
pub fn chi2_sf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(dof).map(|d| d.sf(x)).unwrap_or(f64::NAN).clamp(0.0, 1.0)
}

/// `P(X > x)` for `X ~ F(d1, d2)`.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    FisherSnedecor::new(d1, d2).map(|d| d.sf(x)).unwrap_or(f64::NAN).clamp(0.0, 1.0)
}

/// Two-sided Student-t p-value `P(|X| > |t|)`.
pub fn t_two_sided(t: f64, dof: f64) -> f64 {
    let d = match StudentsT::new(0.0, 1.0, dof) {
        Ok(d) => d,
        Err(_) => return f64::NAN,
    };
    (2.0 * d.sf(t.abs())).clamp(0.0, 1.0)
}

/// Two-sided standard normal p-value.
pub fn normal_two_sided(z: f64) -> f64 {
    let d = Normal::standard();
    (2.0 * d.sf(z.abs())).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi2_two_dof_is_exponential() {
        for &x in &[0.1_f64, 1.0, 5.991464547107979, 20.0] {
            let exact = (-x / 2.0).exp();
            assert!((chi2_sf(x, 2.0) - exact).abs() <= 1e-10 * exact, "{x}");
        }
        assert!((chi2_sf(5.991464547107979, 2.0) - 0.05).abs() < 1e-12);
        assert_eq!(chi2_sf(0.0, 2.0), 1.0);
    }

    #[test]
    fn f_with_two_numerator_dof_has_closed_form() {
        // P(F(2, m) > f) = (1 + 2f/m)^(-m/2)
        for &(f, m) in &[(0.5_f64, 10.0_f64), (3.0, 290.0), (10.0, 54.0)] {
            let exact = (1.0 + 2.0 * f / m).powf(-m / 2.0);
            assert!((f_sf(f, 2.0, m) - exact).abs() <= 1e-10 * exact);
        }
    }

    #[test]
    fn t_and_normal_reference_points() {
        assert!((t_two_sided(0.0, 5.0) - 1.0).abs() < 1e-15);
        // t(10) 97.5% quantile
        assert!((t_two_sided(2.228138851986273, 10.0) - 0.05).abs() < 1e-10);
        assert!((normal_two_sided(1.959963984540054) - 0.05).abs() < 1e-10);
    }
}
