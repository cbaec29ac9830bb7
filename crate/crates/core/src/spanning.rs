//! Mean-variance spanning tests.
//!
//! The test assets `R2` are regressed on the benchmarks `R1`,
//! `R2 = alpha + R1 beta' + e`, and spanning means `alpha = 0` together with
//! `delta = 1 - beta 1 = 0`. The likelihood-based Wald, likelihood ratio and
//! Lagrange multiplier statistics, the two-step stepdown F-tests and a
//! heteroscedasticity and autocorrelation robust GMM Wald test are provided.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::dist::{chi2_sf, f_sf};
use crate::error::{Error, Result};
use crate::io::{fmt_num, Table};
use crate::linalg::{ln_det_psd, ones, sym_eigenvalues, SpdFactor};

pub const DEFAULT_XI1: f64 = 0.10;
pub const DEFAULT_XI2: f64 = 0.05;
pub const DEFAULT_LEVEL: f64 = 0.05;

/// Residual covariances this small relative to the test-asset variance count as exact replication.
const DEGENERATE_RATIO: f64 = 1e-24;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningRegression {
    pub t: usize,
    pub k: usize,
    pub n: usize,
    pub alpha_hat: DVector<f64>,
    /// N x K.
    pub beta_hat: DMatrix<f64>,
    pub delta_hat: DVector<f64>,
    /// Unrestricted residual covariance (1/T).
    pub sigma_hat: DMatrix<f64>,
    /// Residual covariance with `alpha = 0` imposed.
    pub sigma_bar: DMatrix<f64>,
    /// Residual covariance with `alpha = 0` and `delta = 0` imposed.
    pub sigma_tilde: DMatrix<f64>,
    /// `(X'X)^-1` for the design rows `[1, R1t']`.
    pub xtx_inv: DMatrix<f64>,
    pub design: DMatrix<f64>,
    pub residuals: DMatrix<f64>,
    /// `sigma_hat` is singular: the test assets are replicated exactly.
    pub degenerate: bool,
}

impl SpanningRegression {
    /// `Theta = [alpha'; delta']`, 2 x N.
    pub fn theta(&self) -> DMatrix<f64> {
        let mut th = DMatrix::zeros(2, self.n);
        th.row_mut(0).copy_from(&self.alpha_hat.transpose());
        th.row_mut(1).copy_from(&self.delta_hat.transpose());
        th
    }

    /// `G = T A (X'X)^-1 A'` with `A = [[1, 0'], [0, -1']]`.
    pub fn g_matrix(&self) -> DMatrix<f64> {
        let a = a_matrix(self.k);
        &a * &self.xtx_inv * a.transpose() * self.t as f64
    }
}

fn a_matrix(k: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(2, k + 1);
    a[(0, 0)] = 1.0;
    for j in 0..k {
        a[(1, j + 1)] = -1.0;
    }
    a
}

/// `G` from benchmark moments: `[[1 + mu'V^-1 mu, mu'V^-1 1], [., 1'V^-1 1]]`.
pub fn g_from_moments(mu1: &DVector<f64>, v11: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let f = SpdFactor::new(v11, "benchmark covariance")?;
    let vm = f.solve(mu1);
    let v1 = f.solve(&ones(mu1.len()));
    let off = mu1.dot(&v1);
    Ok(DMatrix::from_row_slice(2, 2, &[1.0 + mu1.dot(&vm), off, off, v1.sum()]))
}

fn residual_covariance(y: &DMatrix<f64>, fitted: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let e = y - fitted;
    let s = e.transpose() * &e / y.nrows() as f64;
    ((&s + s.transpose()) * 0.5, e)
}

pub fn fit_spanning_regression(r1: &DMatrix<f64>, r2: &DMatrix<f64>) -> Result<SpanningRegression> {
    let (t, k) = (r1.nrows(), r1.ncols());
    let n = r2.ncols();
    if r2.nrows() != t {
        return Err(Error::Dimension("benchmark and test returns differ in length".into()));
    }
    if k == 0 || n == 0 {
        return Err(Error::Dimension("spanning needs at least one benchmark and one test asset".into()));
    }
    if t < k + n + 1 {
        return Err(Error::InsufficientData(format!(
            "spanning regression needs T >= K + N + 1 = {}, got {t}",
            k + n + 1
        )));
    }
    let mut x = DMatrix::from_element(t, k + 1, 1.0);
    x.view_mut((0, 1), (t, k)).copy_from(r1);
    let xtx = SpdFactor::new(&(x.transpose() * &x), "X'X").map_err(|_| {
        Error::Singular("benchmark returns are collinear (X'X is singular)".into())
    })?;
    let b = xtx.solve_mat(&(x.transpose() * r2));
    let (sigma_hat, residuals) = residual_covariance(r2, &(&x * &b));
    let alpha_hat = b.row(0).transpose();
    let beta_hat = b.rows(1, k).transpose();
    let delta_hat = DVector::from_element(n, 1.0) - &beta_hat * ones(k);

    // alpha = 0: least squares through the benchmarks only.
    let r1tr1 = SpdFactor::new(&(r1.transpose() * r1), "R1'R1")
        .map_err(|_| Error::Singular("benchmark returns are collinear (R1'R1 is singular)".into()))?;
    let b_bar = r1tr1.solve_mat(&(r1.transpose() * r2));
    let (sigma_bar, _) = residual_covariance(r2, &(r1 * &b_bar));

    // alpha = 0 and beta 1 = 1: each response's coefficients restricted to sum to one.
    let h = r1tr1.solve(&ones(k));
    let scale = h.sum();
    let mut b_tilde = b_bar.clone();
    for i in 0..n {
        let excess = b_bar.column(i).sum() - 1.0;
        b_tilde.column_mut(i).axpy(-excess / scale, &h, 1.0);
    }
    let (sigma_tilde, _) = residual_covariance(r2, &(r1 * &b_tilde));

    let y_var = {
        let mut c = r2.clone();
        for j in 0..n {
            let m = c.column(j).mean();
            c.column_mut(j).add_scalar_mut(-m);
        }
        (c.transpose() * c).trace() / t as f64
    };
    let degenerate = sigma_hat.trace() <= DEGENERATE_RATIO * y_var.max(f64::MIN_POSITIVE)
        || SpdFactor::new(&sigma_hat, "residual covariance").is_err();

    Ok(SpanningRegression {
        t,
        k,
        n,
        alpha_hat,
        beta_hat,
        delta_hat,
        sigma_hat,
        sigma_bar,
        sigma_tilde,
        xtx_inv: xtx.inverse(),
        design: x,
        residuals,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Wald,
    Lr,
    Lm,
    GmmWald,
    F1,
    F2,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Wald => "W",
            Self::Lr => "LR",
            Self::Lm => "LM",
            Self::GmmWald => "GMM",
            Self::F1 => "F1",
            Self::F2 => "F2",
        }
    }

    pub fn all() -> [TestKind; 6] {
        [Self::Wald, Self::Lr, Self::Lm, Self::GmmWald, Self::F1, Self::F2]
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dof {
    ChiSquare(f64),
    F(f64, f64),
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ChiSquare(d) => write!(f, "{d}"),
            Self::F(a, b) => write!(f, "{a};{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningResult {
    pub test: TestKind,
    pub statistic: f64,
    pub dof: Dof,
    pub p_value: f64,
    pub eigenvalues: Option<(f64, f64)>,
}

impl SpanningResult {
    fn new(test: TestKind, statistic: f64, dof: Dof, eigenvalues: Option<(f64, f64)>) -> Self {
        let p_value = if statistic.is_infinite() {
            0.0
        } else {
            match dof {
                Dof::ChiSquare(d) => chi2_sf(statistic, d),
                Dof::F(a, b) => f_sf(statistic, a, b),
            }
        };
        Self {
            test,
            statistic,
            dof,
            p_value,
            eigenvalues,
        }
    }
}

/// `(W, LR, LM)` from the eigenvalues of `H G^-1`.
pub fn statistics_from_eigenvalues(lambda: (f64, f64), t: usize) -> (f64, f64, f64) {
    let t = t as f64;
    let (l1, l2) = lambda;
    let w = t * (l1 + l2);
    let lr = t * (l1.ln_1p() + l2.ln_1p());
    let lm = t * (l1 / (1.0 + l1) + l2 / (1.0 + l2));
    (w, lr, lm)
}

fn theta_is_zero(reg: &SpanningRegression) -> bool {
    reg.theta().amax() <= 1e-10
}

/// Eigenvalues of `H G^-1` in descending order, clipped at zero.
pub fn spanning_eigenvalues(reg: &SpanningRegression, g: &DMatrix<f64>) -> Result<(f64, f64)> {
    if reg.degenerate {
        return Ok(if theta_is_zero(reg) {
            (0.0, 0.0)
        } else {
            (f64::INFINITY, f64::INFINITY)
        });
    }
    let s = SpdFactor::new(&reg.sigma_hat, "residual covariance")?;
    let th = reg.theta();
    let h = &th * s.solve_mat(&th.transpose());
    // Eigenvalues of H G^-1 equal those of L^-1 H L^-T with G = L L'.
    let gl = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("G matrix is not positive definite".into()))?;
    let l = gl.l();
    let linv = l
        .try_inverse()
        .ok_or_else(|| Error::Singular("G matrix is singular".into()))?;
    let m = &linv * h * linv.transpose();
    let ev = sym_eigenvalues(&m);
    Ok((ev[0].max(0.0), ev[1].max(0.0)))
}

/// Wald, likelihood ratio and Lagrange multiplier tests, each chi-square with 2N dof.
///
/// `mu1` and `v11` are the benchmark mean and 1/T covariance over the same sample;
/// `G` is formed from them. Exact replication (singular residual covariance) yields
/// zero statistics when `alpha` and `delta` vanish and infinite ones otherwise.
pub fn mv_spanning_tests(reg: &SpanningRegression, mu1: &DVector<f64>, v11: &DMatrix<f64>) -> Result<[SpanningResult; 3]> {
    let g = g_from_moments(mu1, v11)?;
    let lambda = spanning_eigenvalues(reg, &g)?;
    let (w, lr, lm) = if lambda.0.is_infinite() {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    } else {
        statistics_from_eigenvalues(lambda, reg.t)
    };
    let dof = Dof::ChiSquare(2.0 * reg.n as f64);
    Ok([
        SpanningResult::new(TestKind::Wald, w, dof, Some(lambda)),
        SpanningResult::new(TestKind::Lr, lr, dof, Some(lambda)),
        SpanningResult::new(TestKind::Lm, lm, dof, Some(lambda)),
    ])
}

/// As [`mv_spanning_tests`] with `G` taken from the regression design.
pub fn mv_spanning_tests_from_design(reg: &SpanningRegression) -> Result<[SpanningResult; 3]> {
    let g = reg.g_matrix();
    let lambda = spanning_eigenvalues(reg, &g)?;
    let (w, lr, lm) = if lambda.0.is_infinite() {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    } else {
        statistics_from_eigenvalues(lambda, reg.t)
    };
    let dof = Dof::ChiSquare(2.0 * reg.n as f64);
    Ok([
        SpanningResult::new(TestKind::Wald, w, dof, Some(lambda)),
        SpanningResult::new(TestKind::Lr, lr, dof, Some(lambda)),
        SpanningResult::new(TestKind::Lm, lm, dof, Some(lambda)),
    ])
}

/// `xi1 + xi2 - xi1 xi2`, rounded to 12 decimals.
///
/// Levels are decimal quantities; without rounding (0.10, 0.05) would give
/// the double one ulp above 0.145.
pub fn joint_significance(xi1: f64, xi2: f64) -> f64 {
    ((xi1 + xi2 - xi1 * xi2) * 1e12).round() / 1e12
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stepdown {
    pub f1: SpanningResult,
    pub f2: SpanningResult,
    pub xi1: f64,
    pub xi2: f64,
    pub xi_joint: f64,
}

impl Stepdown {
    /// Spanning is rejected when either step rejects at its own level.
    pub fn reject(&self) -> bool {
        self.f1.p_value < self.xi1 || self.f2.p_value < self.xi2
    }
}

fn det_ratio_minus_one(ln_num: f64, ln_den: f64) -> f64 {
    if ln_num == f64::NEG_INFINITY && ln_den == f64::NEG_INFINITY {
        return 0.0;
    }
    (ln_num - ln_den).exp_m1().max(0.0)
}

pub fn stepdown_tests(reg: &SpanningRegression) -> Result<Stepdown> {
    stepdown_tests_with(reg, DEFAULT_XI1, DEFAULT_XI2)
}

pub fn stepdown_tests_with(reg: &SpanningRegression, xi1: f64, xi2: f64) -> Result<Stepdown> {
    let (t, k, n) = (reg.t as f64, reg.k as f64, reg.n as f64);
    if t - k - n < 1.0 {
        return Err(Error::InsufficientData("stepdown tests need T - K - N >= 1".into()));
    }
    for xi in [xi1, xi2] {
        if !(0.0..1.0).contains(&xi) {
            return Err(Error::Parameter(format!("significance level {xi} not in [0, 1)")));
        }
    }
    let (f1, f2) = if reg.degenerate {
        if theta_is_zero(reg) {
            (0.0, 0.0)
        } else {
            (f64::INFINITY, f64::INFINITY)
        }
    } else {
        let ld_hat = ln_det_psd(&reg.sigma_hat);
        let ld_bar = ln_det_psd(&reg.sigma_bar);
        let ld_tilde = ln_det_psd(&reg.sigma_tilde);
        (
            (t - k - n) / n * det_ratio_minus_one(ld_bar, ld_hat),
            (t - k - n + 1.0) / n * det_ratio_minus_one(ld_tilde, ld_bar),
        )
    };
    Ok(Stepdown {
        f1: SpanningResult::new(TestKind::F1, f1, Dof::F(n, t - k - n), None),
        f2: SpanningResult::new(TestKind::F2, f2, Dof::F(n, t - k - n + 1.0), None),
        xi1,
        xi2,
        xi_joint: joint_significance(xi1, xi2),
    })
}

/// Default lag truncation `floor(T^(1/4))`.
pub fn default_hac_lags(t: usize) -> usize {
    (t as f64).powf(0.25).floor() as usize
}

/// Newey-West long-run covariance of the moment series `g_t` (rows), Bartlett weights.
pub fn newey_west(g: &DMatrix<f64>, lags: usize) -> DMatrix<f64> {
    let t = g.nrows();
    let gamma = |l: usize| {
        let a = g.rows(l, t - l);
        let b = g.rows(0, t - l);
        a.transpose() * b / t as f64
    };
    let mut s = gamma(0);
    for l in 1..=lags.min(t.saturating_sub(1)) {
        let w = 1.0 - l as f64 / (lags as f64 + 1.0);
        let gl = gamma(l);
        s += (&gl + gl.transpose()) * w;
    }
    s
}

/// Stacked moment conditions `e_t (x) x_t`, response index outermost.
fn moment_series(reg: &SpanningRegression) -> DMatrix<f64> {
    let (t, p, n) = (reg.t, reg.k + 1, reg.n);
    let mut g = DMatrix::zeros(t, n * p);
    for row in 0..t {
        for i in 0..n {
            let e = reg.residuals[(row, i)];
            for j in 0..p {
                g[(row, i * p + j)] = e * reg.design[(row, j)];
            }
        }
    }
    g
}

/// Wald statistic on `vec(Theta) = 0` for a given long-run covariance `s` of the moments.
pub fn wald_with_long_run_covariance(reg: &SpanningRegression, s: &DMatrix<f64>) -> Result<SpanningResult> {
    let (p, n) = (reg.k + 1, reg.n);
    // Cov(vec B) = (I (x) D^-1) S (I (x) D^-1) / T with D = X'X / T, i.e. blocks of (X'X)^-1 S (X'X)^-1 T.
    let d_inv = &reg.xtx_inv * reg.t as f64;
    let a = a_matrix(reg.k);
    let mut r = DMatrix::zeros(2 * n, n * p);
    let ad = &a * &d_inv;
    for i in 0..n {
        r.view_mut((2 * i, i * p), (2, p)).copy_from(&ad);
    }
    let cov = &r * s * r.transpose() / reg.t as f64;
    let th = reg.theta();
    let v = DVector::from_iterator(2 * n, (0..n).flat_map(|i| [th[(0, i)], th[(1, i)]]));
    let f = SpdFactor::new(&cov, "GMM covariance of the restrictions")
        .map_err(|_| Error::Singular("HAC covariance of the moment conditions is singular".into()))?;
    let stat = v.dot(&f.solve(&v)).max(0.0);
    Ok(SpanningResult::new(TestKind::GmmWald, stat, Dof::ChiSquare(2.0 * n as f64), None))
}

/// Regression-based GMM Wald test with a Newey-West covariance of the moment conditions.
pub fn gmm_wald(r1: &DMatrix<f64>, r2: &DMatrix<f64>, hac_lags: usize) -> Result<SpanningResult> {
    let reg = fit_spanning_regression(r1, r2)?;
    gmm_wald_for(&reg, hac_lags)
}

pub fn gmm_wald_for(reg: &SpanningRegression, hac_lags: usize) -> Result<SpanningResult> {
    if reg.degenerate {
        let stat = if theta_is_zero(reg) { 0.0 } else { f64::INFINITY };
        return Ok(SpanningResult::new(TestKind::GmmWald, stat, Dof::ChiSquare(2.0 * reg.n as f64), None));
    }
    let s = newey_west(&moment_series(reg), hac_lags);
    wald_with_long_run_covariance(reg, &s)
}

/// True iff `W >= LR >= LM` up to a relative slack of 1e-10.
pub fn ordering_check(results: &[SpanningResult]) -> bool {
    let get = |k: TestKind| results.iter().find(|r| r.test == k).map(|r| r.statistic);
    match (get(TestKind::Wald), get(TestKind::Lr), get(TestKind::Lm)) {
        (Some(w), Some(lr), Some(lm)) => {
            if w.is_infinite() {
                return true;
            }
            let slack = 1e-10 * w.abs().max(1.0);
            w + slack >= lr && lr + slack >= lm
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanningConfig {
    pub xi1: f64,
    pub xi2: f64,
    pub level: f64,
    /// `None` uses `floor(T^(1/4))`.
    pub hac_lags: Option<usize>,
}

impl Default for SpanningConfig {
    fn default() -> Self {
        Self {
            xi1: DEFAULT_XI1,
            xi2: DEFAULT_XI2,
            level: DEFAULT_LEVEL,
            hac_lags: None,
        }
    }
}

/// Every test on one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningBattery {
    pub wald: SpanningResult,
    pub lr: SpanningResult,
    pub lm: SpanningResult,
    pub gmm: SpanningResult,
    pub stepdown: Stepdown,
    pub level: f64,
    pub degenerate: bool,
}

impl SpanningBattery {
    pub fn get(&self, test: TestKind) -> &SpanningResult {
        match test {
            TestKind::Wald => &self.wald,
            TestKind::Lr => &self.lr,
            TestKind::Lm => &self.lm,
            TestKind::GmmWald => &self.gmm,
            TestKind::F1 => &self.stepdown.f1,
            TestKind::F2 => &self.stepdown.f2,
        }
    }

    /// Level each individual test is judged at: `xi1` and `xi2` for the stepdown steps.
    pub fn level_for(&self, test: TestKind) -> f64 {
        match test {
            TestKind::F1 => self.stepdown.xi1,
            TestKind::F2 => self.stepdown.xi2,
            _ => self.level,
        }
    }

    /// `spanning_<window>.csv`: one row per test plus the joint stepdown decision.
    pub fn table(&self) -> Table {
        let mut t = Table::new(["test", "statistic", "dof", "p_value", "level", "reject"]);
        for k in TestKind::all() {
            let r = self.get(k);
            let lvl = self.level_for(k);
            t.push(vec![
                k.name().into(),
                fmt_num(r.statistic),
                r.dof.to_string(),
                fmt_num(r.p_value),
                fmt_num(lvl),
                (r.p_value < lvl).to_string(),
            ]);
        }
        t.push(vec![
            "joint".into(),
            String::new(),
            String::new(),
            String::new(),
            fmt_num(self.stepdown.xi_joint),
            self.stepdown.reject().to_string(),
        ]);
        t
    }
}

pub fn run_battery(r1: &DMatrix<f64>, r2: &DMatrix<f64>, config: &SpanningConfig) -> Result<SpanningBattery> {
    let reg = fit_spanning_regression(r1, r2)?;
    let t = r1.nrows();
    let mu1 = DVector::from_iterator(r1.ncols(), (0..r1.ncols()).map(|c| r1.column(c).mean()));
    let mut centered = r1.clone();
    for c in 0..r1.ncols() {
        centered.column_mut(c).add_scalar_mut(-mu1[c]);
    }
    let v11 = centered.transpose() * &centered / t as f64;
    let [wald, lr, lm] = mv_spanning_tests(&reg, &mu1, &v11)?;
    let gmm = gmm_wald_for(&reg, config.hac_lags.unwrap_or_else(|| default_hac_lags(t)))?;
    let stepdown = stepdown_tests_with(&reg, config.xi1, config.xi2)?;
    Ok(SpanningBattery {
        wald,
        lr,
        lm,
        gmm,
        stepdown,
        level: config.level,
        degenerate: reg.degenerate,
    })
}
