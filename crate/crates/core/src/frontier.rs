//! Market moments, global minimum variance and tangency portfolios, and
//! mean-variance frontiers with or without short sales.
//!
//! Covariances use the 1/T estimator throughout so that the moments agree
//! with the residual covariances of the spanning regression. The risk-free
//! rate is zero.

use std::fmt;
use std::str::FromStr;

use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::io::{fmt_num, Table};
use crate::linalg::{condition_number, ones, SpdFactor, MAX_CONDITION};
use crate::panel::ReturnPanel;
use crate::solver::{self, Diagnostics, Options, Program, Quadratic};

pub const DEFAULT_FRONTIER_POINTS: usize = 50;
const DEGENERATE_TANGENCY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Gmvp,
    Tp,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gmvp => "gmvp",
            Self::Tp => "tp",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    #[default]
    Unconstrained,
    LongOnly,
}

impl Constraint {
    pub fn name(self) -> &'static str {
        match self {
            Self::Unconstrained => "unconstrained",
            Self::LongOnly => "long_only",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unconstrained" => Ok(Self::Unconstrained),
            "long-only" | "long_only" => Ok(Self::LongOnly),
            other => Err(Error::Parameter(format!(
                "unknown constraint `{other}` (expected unconstrained or long-only)"
            ))),
        }
    }
}

/// Mean vector and covariance of `k` benchmarks followed by `n` test assets.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketMoments {
    pub assets: Vec<String>,
    pub mu: DVector<f64>,
    pub v: DMatrix<f64>,
    pub k: usize,
    pub n: usize,
    pub t: usize,
    pub condition: f64,
}

impl MarketMoments {
    /// Validates positive definiteness and conditioning of `v`.
    pub fn new(assets: Vec<String>, mu: DVector<f64>, v: DMatrix<f64>, k: usize, t: usize) -> Result<Self> {
        let total = mu.len();
        if v.nrows() != total || v.ncols() != total || assets.len() != total {
            return Err(Error::Dimension("mean, covariance and asset list disagree in size".into()));
        }
        if k > total || k == 0 {
            return Err(Error::Dimension(format!("benchmark count {k} out of range 1..={total}")));
        }
        if (&v - v.transpose()).amax() > 1e-10 * v.amax().max(1.0) {
            return Err(Error::Contract("covariance matrix is not symmetric".into()));
        }
        SpdFactor::new(&v, "covariance matrix").map_err(|_| {
            Error::Singular(
                "covariance matrix is singular or not positive definite; \
                 consider a shrinkage or factor-model estimator"
                    .into(),
            )
        })?;
        let condition = condition_number(&v);
        if condition.is_infinite() {
            return Err(Error::Singular("covariance matrix is singular; consider a shrinkage or factor-model estimator".into()));
        }
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned {
                condition,
                limit: MAX_CONDITION,
            });
        }
        Ok(Self {
            assets,
            mu,
            v,
            k,
            n: total - k,
            t,
            condition,
        })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Moments of the benchmarks alone.
    pub fn benchmarks_only(&self) -> Result<Self> {
        let k = self.k;
        Self::new(
            self.assets[..k].to_vec(),
            self.mu.rows(0, k).into_owned(),
            self.v.view((0, 0), (k, k)).into_owned(),
            k,
            self.t,
        )
    }

    pub fn v11(&self) -> DMatrix<f64> {
        self.v.view((0, 0), (self.k, self.k)).into_owned()
    }

    pub fn mu1(&self) -> DVector<f64> {
        self.mu.rows(0, self.k).into_owned()
    }

    pub fn portfolio_return(&self, w: &DVector<f64>) -> f64 {
        self.mu.dot(w)
    }

    pub fn portfolio_variance(&self, w: &DVector<f64>) -> f64 {
        w.dot(&(&self.v * w)).max(0.0)
    }

    pub fn sharpe(&self, w: &DVector<f64>) -> f64 {
        self.portfolio_return(w) / self.portfolio_variance(w).sqrt()
    }

    /// Covariance divided by its mean diagonal, with means scaled to leave Sharpe ratios unchanged.
    fn scaled(&self) -> (DVector<f64>, DMatrix<f64>) {
        let s = self.v.trace() / self.len() as f64;
        (&self.mu / s.sqrt(), &self.v / s)
    }
}

/// Sample mean and 1/T covariance; the first `k` columns are benchmarks.
pub fn estimate_moments(panel: &ReturnPanel, k: usize) -> Result<MarketMoments> {
    let x = panel.values();
    let (t, cols) = (x.nrows(), x.ncols());
    if t < cols + 1 {
        return Err(Error::InsufficientData(format!(
            "{t} observations for {cols} assets; need at least {}",
            cols + 1
        )));
    }
    let mu = DVector::from_iterator(cols, (0..cols).map(|c| x.column(c).mean()));
    let mut centered = x.clone();
    for c in 0..cols {
        centered.column_mut(c).add_scalar_mut(-mu[c]);
    }
    let v = centered.transpose() * &centered / t as f64;
    let v = (&v + v.transpose()) * 0.5;
    MarketMoments::new(panel.assets().to_vec(), mu, v, k, t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioWeights {
    pub assets: Vec<String>,
    pub weights: DVector<f64>,
    pub label: Objective,
    pub constraint: Constraint,
    pub diagnostics: Option<Diagnostics>,
}

impl PortfolioWeights {
    pub fn sum(&self) -> f64 {
        self.weights.sum()
    }

    /// Total weight of the assets after the first `k`.
    pub fn test_weight(&self, k: usize) -> f64 {
        self.weights.iter().skip(k).sum()
    }

    /// `weights_<label>_<constraint>.csv` layout.
    pub fn table(&self) -> Table {
        let mut t = Table::new(["asset", "weight"]);
        for (a, w) in self.assets.iter().zip(self.weights.iter()) {
            t.push(vec![a.clone(), fmt_num(*w)]);
        }
        t
    }

    pub fn file_name(&self) -> String {
        format!("weights_{}_{}.csv", self.label, self.constraint)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub risk: f64,
    pub ret: f64,
    pub weights: PortfolioWeights,
}

fn weights(m: &MarketMoments, w: DVector<f64>, label: Objective, constraint: Constraint, d: Option<Diagnostics>) -> PortfolioWeights {
    PortfolioWeights {
        assets: m.assets.clone(),
        weights: w,
        label,
        constraint,
        diagnostics: d,
    }
}

pub fn gmvp(m: &MarketMoments) -> Result<PortfolioWeights> {
    let f = SpdFactor::new(&m.v, "covariance matrix")?;
    let x = f.solve(&ones(m.len()));
    let w = &x / x.sum();
    Ok(weights(m, w, Objective::Gmvp, Constraint::Unconstrained, None))
}

pub fn tangency(m: &MarketMoments) -> Result<PortfolioWeights> {
    tangency_with_rate(m, 0.0)
}

pub fn tangency_with_rate(m: &MarketMoments, r_f: f64) -> Result<PortfolioWeights> {
    let f = SpdFactor::new(&m.v, "covariance matrix")?;
    let excess = m.mu.add_scalar(-r_f);
    let x = f.solve(&excess);
    let denom = x.sum();
    if denom.abs() < DEGENERATE_TANGENCY {
        return Err(Error::DegenerateTangency(denom));
    }
    Ok(weights(m, x / denom, Objective::Tp, Constraint::Unconstrained, None))
}

fn budget_row(n: usize) -> DMatrix<f64> {
    DMatrix::from_element(1, n, 1.0)
}

fn long_only_min_variance(v: &DMatrix<f64>, eq_a: DMatrix<f64>, eq_b: DVector<f64>) -> Result<solver::Solution> {
    let n = v.nrows();
    let obj = Quadratic::new(v.clone(), DVector::zeros(n), 0.0);
    let p = Program {
        objective: &obj,
        eq_a,
        eq_b,
        nonneg: (0..n).collect(),
        quad_ineq: vec![],
    };
    solver::solve(&p, &DVector::from_element(n, 1.0 / n as f64), &Options::default())
}

pub fn long_only(m: &MarketMoments, objective: Objective) -> Result<PortfolioWeights> {
    let (mu, v) = m.scaled();
    let n = m.len();
    match objective {
        Objective::Gmvp => {
            let s = long_only_min_variance(&v, budget_row(n), DVector::from_element(1, 1.0))?;
            let w = clean_simplex(s.x);
            Ok(weights(m, w, objective, Constraint::LongOnly, Some(s.diagnostics)))
        }
        Objective::Tp if mu.max() > 0.0 => {
            // max mu'w / sd(w) on the simplex <=> min y'Vy with mu'y = 1, y >= 0, w = y / 1'y
            let s = long_only_min_variance(&v, DMatrix::from_row_slice(1, n, mu.as_slice()), DVector::from_element(1, 1.0))?;
            let w = clean_simplex(s.x);
            Ok(weights(m, w, objective, Constraint::LongOnly, Some(s.diagnostics)))
        }
        Objective::Tp => {
            let s = solver::max_sharpe_simplex(&mu, &v, &Options::default())?;
            let w = clean_simplex(s.x);
            Ok(weights(m, w, objective, Constraint::LongOnly, Some(s.diagnostics)))
        }
    }
}

/// Clips interior-point residue below zero and renormalizes to the budget.
fn clean_simplex(x: DVector<f64>) -> DVector<f64> {
    let x = x.map(|v| v.max(0.0));
    let s = x.sum();
    x / s
}

pub fn optimal(m: &MarketMoments, objective: Objective, constraint: Constraint) -> Result<PortfolioWeights> {
    match (objective, constraint) {
        (Objective::Gmvp, Constraint::Unconstrained) => gmvp(m),
        (Objective::Tp, Constraint::Unconstrained) => tangency(m),
        (o, Constraint::LongOnly) => long_only(m, o),
    }
}

/// Minimum-variance portfolio with expected return `target`.
pub fn min_variance_for_target(m: &MarketMoments, target: f64, constraint: Constraint) -> Result<PortfolioWeights> {
    let n = m.len();
    match constraint {
        Constraint::Unconstrained => {
            let f = SpdFactor::new(&m.v, "covariance matrix")?;
            let vi1 = f.solve(&ones(n));
            let vim = f.solve(&m.mu);
            let (a, b, c) = (vi1.sum(), vim.sum(), m.mu.dot(&vim));
            let det = a * c - b * b;
            if det <= 1e-14 * a * c.abs().max(f64::MIN_POSITIVE) {
                // Equal means: every portfolio has the same return.
                return gmvp(m);
            }
            let l1 = (c - b * target) / det;
            let l2 = (a * target - b) / det;
            let w = vi1 * l1 + vim * l2;
            Ok(weights(m, w, Objective::Gmvp, constraint, None))
        }
        Constraint::LongOnly => {
            let (_, v) = m.scaled();
            let top = m.mu.max();
            let scale = m.mu.amax().max(f64::MIN_POSITIVE);
            if target > top + 1e-12 * scale || target < m.mu.min() - 1e-12 * scale {
                return Err(Error::Parameter(format!("target return {target} outside the long-only range")));
            }
            let near = |x: f64| (x - target).abs() <= 1e-10 * scale;
            if near(top) || near(m.mu.min()) {
                // Only the assets at the extreme mean can carry weight.
                let idx: Vec<usize> = (0..n).filter(|&i| near(m.mu[i])).collect();
                let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| v[(idx[r], idx[c])]);
                let s = long_only_min_variance(&sub, budget_row(idx.len()), DVector::from_element(1, 1.0))?;
                let ws = clean_simplex(s.x);
                let mut w = DVector::zeros(n);
                for (j, &i) in idx.iter().enumerate() {
                    w[i] = ws[j];
                }
                return Ok(weights(m, w, Objective::Gmvp, constraint, Some(s.diagnostics)));
            }
            let mut a = DMatrix::zeros(2, n);
            for i in 0..n {
                a[(0, i)] = 1.0;
                a[(1, i)] = m.mu[i] / scale;
            }
            let s = long_only_min_variance(&v, a, DVector::from_vec(vec![1.0, target / scale]))?;
            let w = clean_simplex(s.x);
            Ok(weights(m, w, Objective::Gmvp, constraint, Some(s.diagnostics)))
        }
    }
}

/// Upper end of the target-return grid.
pub fn frontier_upper_return(m: &MarketMoments, constraint: Constraint) -> f64 {
    let top = m.mu.max();
    match constraint {
        Constraint::LongOnly => top,
        Constraint::Unconstrained => match (tangency(m), gmvp(m)) {
            (Ok(tp), Ok(g)) if m.portfolio_return(&tp.weights) > m.portfolio_return(&g.weights) => {
                top.max(m.portfolio_return(&tp.weights))
            }
            _ => top,
        },
    }
}

/// Minimum-variance portfolios for `n_points` linearly spaced targets from the
/// GMVP return to the upper end of the grid, sorted by risk.
pub fn efficient_frontier(m: &MarketMoments, constraint: Constraint, n_points: usize) -> Result<Vec<FrontierPoint>> {
    efficient_frontier_between(m, constraint, n_points, None)
}

/// As [`efficient_frontier`] with an explicit upper target.
pub fn efficient_frontier_between(
    m: &MarketMoments,
    constraint: Constraint,
    n_points: usize,
    upper: Option<f64>,
) -> Result<Vec<FrontierPoint>> {
    if n_points == 0 {
        return Err(Error::Parameter("frontier needs at least one point".into()));
    }
    let g = optimal(m, Objective::Gmvp, constraint)?;
    let lo = m.portfolio_return(&g.weights);
    let hi = upper.unwrap_or_else(|| frontier_upper_return(m, constraint)).max(lo);
    let mut points = Vec::with_capacity(n_points);
    points.push(point(m, g));
    for i in 1..n_points {
        let target = lo + (hi - lo) * i as f64 / (n_points - 1) as f64;
        match min_variance_for_target(m, target, constraint) {
            Ok(w) => points.push(point(m, w)),
            Err(e) => warn!("frontier target {target} skipped: {e}"),
        }
    }
    points.sort_by(|a, b| a.risk.total_cmp(&b.risk));
    Ok(points)
}

fn point(m: &MarketMoments, w: PortfolioWeights) -> FrontierPoint {
    FrontierPoint {
        risk: m.portfolio_variance(&w.weights).sqrt(),
        ret: m.portfolio_return(&w.weights),
        weights: w,
    }
}

/// `frontier_<tag>.csv` layout: risk, ret, then one weight column per asset.
pub fn frontier_table(points: &[FrontierPoint]) -> Table {
    let assets = points.first().map(|p| p.weights.assets.clone()).unwrap_or_default();
    let mut t = Table::new(["risk".to_string(), "ret".to_string()].into_iter().chain(assets.iter().map(|a| format!("w_{a}"))));
    for p in points {
        let mut row = vec![fmt_num(p.risk), fmt_num(p.ret)];
        row.extend(p.weights.weights.iter().map(|w| fmt_num(*w)));
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn moments(mu: &[f64], v: &[f64], k: usize) -> MarketMoments {
        let n = mu.len();
        MarketMoments::new(
            (0..n).map(|i| format!("A{i}")).collect(),
            DVector::from_column_slice(mu),
            DMatrix::from_row_slice(n, n, v),
            k,
            100,
        )
        .unwrap()
    }

    #[test]
    fn moments_use_t_denominator() {
        let d = NaiveDate::from_ymd_opt(2020, 1, 3).unwrap();
        let dates = vec![d, d + chrono::Days::new(7)];
        let p = ReturnPanel::new(dates.clone(), vec!["A".into()], DMatrix::from_column_slice(2, 1, &[0.01, 0.03])).unwrap();
        let m = estimate_moments(&p, 1).unwrap();
        assert!((m.mu[0] - 0.02).abs() < 1e-15);
        assert!((m.v[(0, 0)] - 0.0001).abs() < 1e-15);
        let d3: Vec<NaiveDate> = (0..4).map(|i| d + chrono::Days::new(7 * i)).collect();
        let same = ReturnPanel::new(d3, vec!["A".into(), "B".into()], DMatrix::from_row_slice(4, 2, &[0.01, 0.01, 0.03, 0.03, -0.02, -0.02, 0.0, 0.0])).unwrap();
        let r = estimate_moments(&same, 1);
        assert!(matches!(r, Err(Error::Singular(_))), "{r:?}");
    }

    #[test]
    fn gmvp_examples() {
        let w = gmvp(&moments(&[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0], 1)).unwrap();
        assert!((w.weights[0] - 0.5).abs() < 1e-15);
        let w = gmvp(&moments(&[0.0, 0.0], &[1.0, 0.0, 0.0, 4.0], 1)).unwrap();
        assert!((w.weights[0] - 0.8).abs() < 1e-15 && (w.weights[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn tangency_examples() {
        let id = [1.0, 0.0, 0.0, 1.0];
        let w = tangency(&moments(&[0.1, 0.1], &id, 1)).unwrap();
        assert!((w.weights[0] - 0.5).abs() < 1e-15);
        let w = tangency(&moments(&[0.2, 0.1], &id, 1)).unwrap();
        assert!((w.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(tangency(&moments(&[0.1, -0.1], &id, 1)), Err(Error::DegenerateTangency(_))));
    }

    #[test]
    fn long_only_examples() {
        let m = moments(&[0.0, 0.1], &[1.0, 0.0, 0.0, 4.0], 1);
        let tp = long_only(&m, Objective::Tp).unwrap();
        assert!(tp.weights[0].abs() < 1e-9 && (tp.weights[1] - 1.0).abs() < 1e-9);
        let g = long_only(&m, Objective::Gmvp).unwrap();
        assert!((g.weights[0] - 0.8).abs() < 1e-6);
        assert!(g.diagnostics.unwrap().kkt_residual <= 1e-8);
        let eq = moments(&[0.05; 3], DMatrix::<f64>::identity(3, 3).as_slice(), 1);
        for o in [Objective::Gmvp, Objective::Tp] {
            let w = long_only(&eq, o).unwrap();
            assert!(w.weights.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-8));
        }
    }

    #[test]
    fn frontier_identity_two_assets() {
        let m = moments(&[0.01, 0.02], &[1.0, 0.0, 0.0, 1.0], 1);
        for c in [Constraint::Unconstrained, Constraint::LongOnly] {
            let pts = efficient_frontier(&m, c, 11).unwrap();
            assert_eq!(pts.len(), 11);
            for p in &pts {
                let w = p.weights.weights[0];
                assert!((p.risk.powi(2) - (w * w + (1.0 - w).powi(2))).abs() < 1e-9);
            }
            assert!((pts[0].weights.weights[0] - 0.5).abs() < 1e-8);
            assert!(pts.windows(2).all(|p| p[0].ret <= p[1].ret + 1e-12));
        }
        let one = efficient_frontier(&m, Constraint::Unconstrained, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].weights.weights, gmvp(&m).unwrap().weights);
    }

    #[test]
    fn constraint_parsing() {
        assert_eq!("long-only".parse::<Constraint>().unwrap(), Constraint::LongOnly);
        assert!("sideways".parse::<Constraint>().is_err());
    }
}
