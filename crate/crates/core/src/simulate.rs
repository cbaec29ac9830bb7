//! Seeded generators of synthetic return data for self-tests and examples.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::frontier::MarketMoments;

pub fn normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Random covariance `s^2 (A A' / n + 0.1 I)` with `A` standard normal.
pub fn random_covariance<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let a = normal_matrix(rng, n, n);
    let v = (&a * a.transpose()) / n as f64 + DMatrix::identity(n, n) * 0.1;
    let v = (&v + v.transpose()) * 0.5;
    v * (scale * scale)
}

/// Random moments with weekly-scale means and volatilities.
pub fn random_moments<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize) -> MarketMoments {
    loop {
        let total = k + n;
        let v = random_covariance(rng, total, 0.03);
        let mu = DVector::from_fn(total, |_, _| rng.random_range(-0.002..0.006));
        let assets = (0..total).map(|i| format!("A{i}")).collect();
        if let Ok(m) = MarketMoments::new(assets, mu, v, k, 260) {
            return m;
        }
    }
}

/// `T x cols` draws from `N(mu, V)`.
pub fn multivariate_normal<R: Rng + ?Sized>(rng: &mut R, t: usize, mu: &DVector<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let l = v.clone().cholesky().expect("positive definite covariance").l();
    let z = normal_matrix(rng, t, mu.len());
    let mut x = z * l.transpose();
    for j in 0..mu.len() {
        x.column_mut(j).add_scalar_mut(mu[j]);
    }
    x
}

/// Parameters of a linear factor model `R2 = alpha + R1 beta' + e`.
#[derive(Debug, Clone)]
pub struct SpanningDesign {
    pub alpha: DVector<f64>,
    /// N x K.
    pub beta: DMatrix<f64>,
    pub mu1: DVector<f64>,
    pub v11: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
}

impl SpanningDesign {
    /// Random design satisfying spanning: `alpha = 0` and rows of `beta` summing to one.
    pub fn spanned<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize) -> Self {
        let mut beta = DMatrix::from_fn(n, k, |_, _| rng.random_range(-0.5..1.0));
        for i in 0..n {
            let s: f64 = beta.row(i).sum();
            let adj = (1.0 - s) / k as f64;
            for j in 0..k {
                beta[(i, j)] += adj;
            }
        }
        Self {
            alpha: DVector::zeros(n),
            beta,
            mu1: DVector::from_fn(k, |_, _| rng.random_range(0.0..0.004)),
            v11: random_covariance(rng, k, 0.02),
            sigma: random_covariance(rng, n, 0.02),
        }
    }

    /// `(R1, R2)` with normal benchmark returns and normal errors.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, t: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        let r1 = multivariate_normal(rng, t, &self.mu1, &self.v11);
        let e = multivariate_normal(rng, t, &DVector::zeros(self.alpha.len()), &self.sigma);
        let mut r2 = &r1 * self.beta.transpose() + e;
        for i in 0..self.alpha.len() {
            r2.column_mut(i).add_scalar_mut(self.alpha[i]);
        }
        (r1, r2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spanned_design_has_unit_beta_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = SpanningDesign::spanned(&mut rng, 4, 2);
        for i in 0..2 {
            assert!((d.beta.row(i).sum() - 1.0).abs() < 1e-12);
        }
        let (r1, r2) = d.sample(&mut rng, 50);
        assert_eq!((r1.nrows(), r1.ncols(), r2.ncols()), (50, 4, 2));
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_moments(&mut ChaCha8Rng::seed_from_u64(9), 2, 1);
        let b = random_moments(&mut ChaCha8Rng::seed_from_u64(9), 2, 1);
        assert_eq!(a, b);
    }
}
