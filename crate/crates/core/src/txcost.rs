//! Transaction costs and cost-budget constrained portfolios.
//!
//! Benchmarks trade at a linear cost `c |dw| v0`; test assets at a quadratic
//! cost `0.5 Psi c |dw|^2 v0`, where the scalability factor `Psi` makes the
//! two cost curves cost the same on average over a turnover interval. A
//! portfolio shift away from the initial weights may spend at most the budget
//! `K0 v0`.
//!
//! The benchmark turnover is split into buy and sell parts, `w_i - w0_i =
//! u_i - v_i` with `u, v >= 0`, which turns the cost limit into one smooth
//! convex quadratic constraint. The split can only overstate the true cost,
//! so returned portfolios always respect the budget in exact arithmetic. The
//! tangency portfolio is the peak of the Sharpe ratio along the cost-constrained
//! minimum-variance frontier.

use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frontier::{self, Constraint, FrontierPoint, MarketMoments, Objective, PortfolioWeights};
use crate::io::{fmt_num, Table};
use crate::solver::{self, Diagnostics, Options, Program, Quadratic, Smooth};

pub const BASIS_POINT: f64 = 1e-4;
pub const DEFAULT_C_BENCHMARK: f64 = 35.0 * BASIS_POINT;
pub const DEFAULT_C_TEST: f64 = 50.0 * BASIS_POINT;
pub const DEFAULT_BUDGET: f64 = 10.0 * BASIS_POINT;
pub const SWEEP_BUDGETS_BP: [f64; 10] = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostModel {
    pub c_benchmark: f64,
    pub c_test: f64,
    pub psi: f64,
    pub v0: f64,
    /// Cost budget as a fraction of wealth.
    pub budget: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            c_benchmark: DEFAULT_C_BENCHMARK,
            c_test: DEFAULT_C_TEST,
            psi: 3.0,
            v0: 1.0,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.c_benchmark, self.c_test, self.psi, self.v0, self.budget]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.c_benchmark < 0.0 || self.c_test < 0.0 || self.budget < 0.0 {
            return Err(Error::Parameter("cost factors and budget must be finite and nonnegative".into()));
        }
        if !(self.psi > 0.0) || !(self.v0 > 0.0) {
            return Err(Error::Parameter("psi and initial wealth must be positive".into()));
        }
        Ok(())
    }

    /// Marginal quadratic factor `Psi c_test`.
    pub fn c_tilde(&self) -> f64 {
        self.psi * self.c_test
    }

    pub fn with_budget(&self, budget: f64) -> Self {
        Self { budget, ..*self }
    }
}

pub fn linear_cost(dw: f64, c: f64, v0: f64) -> f64 {
    c * dw * v0
}

pub fn quadratic_cost(dw: f64, c_tilde: f64, v0: f64) -> f64 {
    0.5 * c_tilde * dw * dw * v0
}

/// `Psi = 3 (hi^2 - lo^2) / (hi^3 - lo^3)`: the quadratic and linear cost
/// curves enclose zero net area over `[lo, hi]` under a uniform turnover density.
pub fn calibrate_psi(lo: f64, hi: f64) -> Result<f64> {
    check_interval(lo, hi)?;
    Ok(3.0 * (hi * hi - lo * lo) / (hi.powi(3) - lo.powi(3)))
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if hi.is_infinite() {
        return Err(Error::Parameter("the turnover interval must be bounded".into()));
    }
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Parameter(format!("turnover interval [{lo}, {hi}] must satisfy 0 <= lo < hi")));
    }
    Ok(())
}

/// Gauss-Legendre nodes and weights on [-1, 1], 20 points.
const GL20: [(f64, f64); 10] = [
    (0.076_526_521_133_497_33, 0.152_753_387_130_725_85),
    (0.227_785_851_141_645_08, 0.149_172_986_472_603_75),
    (0.373_706_088_715_419_56, 0.142_096_109_318_382_05),
    (0.510_867_001_950_827_1, 0.131_688_638_449_176_63),
    (0.636_053_680_726_515_0, 0.118_194_531_961_518_42),
    (0.746_331_906_460_150_8, 0.101_930_119_817_240_44),
    (0.839_116_971_822_218_8, 0.083_276_741_576_704_75),
    (0.912_234_428_251_326_0, 0.062_672_048_334_109_06),
    (0.963_971_927_277_913_8, 0.040_601_429_800_386_94),
    (0.993_128_599_185_094_9, 0.017_614_007_139_152_12),
];

/// Composite 20-point Gauss-Legendre quadrature over `[a, b]` with `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        let half = h / 2.0;
        for &(x, w) in &GL20 {
            total += w * (f(mid - half * x) + f(mid + half * x));
        }
    }
    total * h / 2.0
}

/// `Psi` for a general turnover density `f` on `[lo, hi]`: `2 E[x] / E[x^2]`.
pub fn calibrate_psi_weighted(lo: f64, hi: f64, density: impl Fn(f64) -> f64) -> Result<f64> {
    check_interval(lo, hi)?;
    let m1 = integrate(|x| x * density(x), lo, hi, 64);
    let m2 = integrate(|x| x * x * density(x), lo, hi, 64);
    if !(m2 > 0.0) {
        return Err(Error::Parameter("turnover density has no mass on the interval".into()));
    }
    Ok(2.0 * m1 / m2)
}

/// Turnover `2 / Psi` at which the quadratic and linear costs coincide; `c_test` cancels.
pub fn cost_intersection(_c_test: f64, psi: f64) -> Result<f64> {
    if !(psi > 0.0) {
        return Err(Error::Parameter("psi must be positive".into()));
    }
    Ok(2.0 / psi)
}

/// Linear cost on the first `k` assets plus quadratic cost on the rest.
pub fn total_cost(w_old: &DVector<f64>, w_new: &DVector<f64>, model: &CostModel, k: usize) -> Result<f64> {
    if w_old.len() != w_new.len() || k > w_old.len() {
        return Err(Error::Dimension("weight vectors differ in length".into()));
    }
    let mut c = 0.0;
    for i in 0..w_old.len() {
        let dw = (w_new[i] - w_old[i]).abs();
        c += if i < k {
            linear_cost(dw, model.c_benchmark, model.v0)
        } else {
            quadratic_cost(dw, model.c_tilde(), model.v0)
        };
    }
    Ok(c)
}

/// Equally weighted benchmarks, no test assets.
pub fn default_initial_weights(k: usize, n: usize) -> DVector<f64> {
    DVector::from_fn(k + n, |i, _| if i < k { 1.0 / k as f64 } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSolution {
    pub weights: PortfolioWeights,
    /// Exact cost of the move from the initial weights, in currency units.
    pub cost_spent: f64,
    pub binding: bool,
    /// Variance for the GMVP, Sharpe ratio for the TP.
    pub objective: f64,
    pub diagnostics: Diagnostics,
}

/// The split formulation over `x = [w; u; v]`.
struct CostProgram {
    n: usize,
    k_split: usize,
    eq_a: DMatrix<f64>,
    eq_b: DVector<f64>,
    nonneg: Vec<usize>,
    cost: Quadratic,
    start: DVector<f64>,
}

impl CostProgram {
    fn new(k: usize, w0: &DVector<f64>, model: &CostModel, constraint: Constraint) -> Result<Self> {
        let n = w0.len();
        let k_split = if model.c_benchmark > 0.0 { k } else { 0 };
        let dim = n + 2 * k_split;
        let b = model.budget;
        let mut eq_a = DMatrix::zeros(1 + k_split, dim);
        let mut eq_b = DVector::zeros(1 + k_split);
        for i in 0..n {
            eq_a[(0, i)] = 1.0;
        }
        eq_b[0] = 1.0;
        for i in 0..k_split {
            eq_a[(1 + i, i)] = 1.0;
            eq_a[(1 + i, n + i)] = -1.0;
            eq_a[(1 + i, n + k_split + i)] = 1.0;
            eq_b[1 + i] = w0[i];
        }
        let mut nonneg: Vec<usize> = (n..dim).collect();
        if constraint == Constraint::LongOnly {
            if w0.iter().any(|&w| w < 0.0) {
                return Err(Error::Parameter("initial weights violate the long-only constraint".into()));
            }
            nonneg.extend(0..n);
        }
        // (cost - budget) / budget <= 0 with v0 cancelled.
        let ct = model.c_tilde() / b;
        let mut q = DMatrix::zeros(dim, dim);
        let mut c = DVector::zeros(dim);
        let mut r = -1.0;
        for j in k..n {
            q[(j, j)] = ct;
            c[j] = -ct * w0[j];
            r += 0.5 * ct * w0[j] * w0[j];
        }
        for i in n..dim {
            c[i] = model.c_benchmark / b;
        }
        let cost = Quadratic::new(q, c, r);

        // Strictly feasible start near the initial weights.
        let bary = DVector::from_element(n, 1.0 / n as f64);
        let mut theta: f64 = if constraint == Constraint::LongOnly { 0.5 } else { 0.0 };
        let mut eps: f64 = 0.25;
        let mut start = DVector::zeros(dim);
        for _ in 0..200 {
            let w = w0 * (1.0 - theta) + &bary * theta;
            start.rows_mut(0, n).copy_from(&w);
            for i in 0..k_split {
                let d = w[i] - w0[i];
                start[n + i] = d.max(0.0) + eps;
                start[n + k_split + i] = (-d).max(0.0) + eps;
            }
            let strict = cost.value(&start) < -0.25 && nonneg.iter().all(|&i| start[i] > 0.0);
            if strict {
                break;
            }
            theta *= 0.5;
            eps *= 0.5;
        }
        if !(cost.value(&start) < 0.0) {
            return Err(Error::Parameter("no strictly feasible starting portfolio for the cost budget".into()));
        }
        Ok(Self {
            n,
            k_split,
            eq_a,
            eq_b,
            nonneg,
            cost,
            start,
        })
    }

    fn dim(&self) -> usize {
        self.n + 2 * self.k_split
    }

    fn solve(&self, objective: &dyn Smooth, x0: &DVector<f64>, extra_eq: Option<(&DVector<f64>, f64)>) -> Result<solver::Solution> {
        let (eq_a, eq_b) = match extra_eq {
            None => (self.eq_a.clone(), self.eq_b.clone()),
            Some((row, rhs)) => {
                let r = self.eq_a.nrows();
                let mut a = self.eq_a.clone().insert_row(r, 0.0);
                for i in 0..self.n {
                    a[(r, i)] = row[i];
                }
                (a, self.eq_b.clone().insert_row(r, rhs))
            }
        };
        let p = Program {
            objective,
            eq_a,
            eq_b,
            nonneg: self.nonneg.clone(),
            quad_ineq: vec![self.cost.clone()],
        };
        solver::solve(&p, x0, &Options::default())
    }

    fn weights(&self, x: &DVector<f64>, long_only: bool) -> DVector<f64> {
        let w = x.rows(0, self.n).into_owned();
        if long_only {
            w.map(|v| v.max(0.0))
        } else {
            w
        }
    }
}

fn pad(v: &DVector<f64>, dim: usize) -> DVector<f64> {
    let mut out = DVector::zeros(dim);
    out.rows_mut(0, v.len()).copy_from(v);
    out
}

fn scaled(m: &MarketMoments) -> (DVector<f64>, DMatrix<f64>) {
    let s = m.v.trace() / m.len() as f64;
    (&m.mu / s.sqrt(), &m.v / s)
}

fn variance_objective(v: &DMatrix<f64>, dim: usize) -> Quadratic {
    let n = v.nrows();
    let mut q = DMatrix::zeros(dim, dim);
    q.view_mut((0, 0), (n, n)).copy_from(v);
    Quadratic::new(q, DVector::zeros(dim), 0.0)
}

fn check_initial(m: &MarketMoments, w_initial: &DVector<f64>, model: &CostModel) -> Result<()> {
    model.validate()?;
    if w_initial.len() != m.len() {
        return Err(Error::Dimension("initial weights do not match the asset count".into()));
    }
    if (w_initial.sum() - 1.0).abs() > 1e-8 {
        return Err(Error::Parameter("initial weights must sum to one".into()));
    }
    Ok(())
}

fn stay_put(m: &MarketMoments, w_initial: &DVector<f64>, objective: Objective, constraint: Constraint) -> ConstrainedSolution {
    ConstrainedSolution {
        weights: PortfolioWeights {
            assets: m.assets.clone(),
            weights: w_initial.clone(),
            label: objective,
            constraint,
            diagnostics: None,
        },
        cost_spent: 0.0,
        binding: true,
        objective: match objective {
            Objective::Gmvp => m.portfolio_variance(w_initial),
            Objective::Tp => m.sharpe(w_initial),
        },
        diagnostics: Diagnostics {
            iterations: 0,
            kkt_residual: 0.0,
            converged: true,
        },
    }
}

fn finish(
    m: &MarketMoments,
    w_initial: &DVector<f64>,
    model: &CostModel,
    objective: Objective,
    constraint: Constraint,
    w: DVector<f64>,
    diagnostics: Diagnostics,
) -> Result<ConstrainedSolution> {
    let cost_spent = total_cost(w_initial, &w, model, m.k)?;
    let limit = model.budget * model.v0;
    Ok(ConstrainedSolution {
        objective: match objective {
            Objective::Gmvp => m.portfolio_variance(&w),
            Objective::Tp => m.sharpe(&w),
        },
        weights: PortfolioWeights {
            assets: m.assets.clone(),
            weights: w,
            label: objective,
            constraint,
            diagnostics: Some(diagnostics.clone()),
        },
        cost_spent,
        binding: cost_spent >= limit * (1.0 - 1e-6),
        diagnostics,
    })
}

/// Minimum variance or maximum Sharpe portfolio whose move from `w_initial`
/// costs at most the budget.
pub fn optimize_with_costs(
    m: &MarketMoments,
    w_initial: &DVector<f64>,
    model: &CostModel,
    objective: Objective,
    constraint: Constraint,
) -> Result<ConstrainedSolution> {
    check_initial(m, w_initial, model)?;
    if model.budget == 0.0 {
        return Ok(stay_put(m, w_initial, objective, constraint));
    }
    if let Some(free) = affordable_optimum(m, w_initial, model, objective, constraint)? {
        let d = free.diagnostics.clone().unwrap_or(Diagnostics {
            iterations: 0,
            kkt_residual: 0.0,
            converged: true,
        });
        return finish(m, w_initial, model, objective, constraint, free.weights, d);
    }
    let cp = CostProgram::new(m.k, w_initial, model, constraint)?;
    let (mu, v) = scaled(m);
    let long_only = constraint == Constraint::LongOnly;
    match objective {
        Objective::Gmvp => {
            let obj = variance_objective(&v, cp.dim());
            let s = cp.solve(&obj, &cp.start, None)?;
            finish(m, w_initial, model, objective, constraint, cp.weights(&s.x, long_only), s.diagnostics)
        }
        Objective::Tp => {
            let (x, d) = frontier_tangency(&cp, &mu, &v)?;
            finish(m, w_initial, model, objective, constraint, cp.weights(&x, long_only), d)
        }
    }
}

/// The cost-free optimum when the budget covers the move to it.
fn affordable_optimum(
    m: &MarketMoments,
    w_initial: &DVector<f64>,
    model: &CostModel,
    objective: Objective,
    constraint: Constraint,
) -> Result<Option<PortfolioWeights>> {
    let Ok(free) = frontier::optimal(m, objective, constraint) else {
        return Ok(None);
    };
    // With 1'V^-1 mu < 0 the closed form is the Sharpe minimizer.
    if objective == Objective::Tp && !(m.portfolio_return(&free.weights) > 0.0) {
        return Ok(None);
    }
    let cost = total_cost(w_initial, &free.weights, model, m.k)?;
    Ok((cost <= model.budget * model.v0).then_some(free))
}

fn max_return_point(cp: &CostProgram, mu: &DVector<f64>) -> Result<solver::Solution> {
    let obj = Quadratic::linear(-pad(mu, cp.dim()));
    cp.solve(&obj, &cp.start, None)
}

/// Maximizes `mu'w / sqrt(w'Vw)` over the cost-feasible set.
///
/// The minimum risk `sigma(r)` at target return `r` is convex in `r`, so the
/// Sharpe ratio `r / sigma(r)` is unimodal on the positive returns and a
/// golden section search over `r` finds its peak.
fn frontier_tangency(cp: &CostProgram, mu: &DVector<f64>, v: &DMatrix<f64>) -> Result<(DVector<f64>, Diagnostics)> {
    let obj = variance_objective(v, cp.dim());
    let ret = |x: &DVector<f64>| mu.dot(&x.rows(0, cp.n).into_owned());
    let sharpe = |x: &DVector<f64>| {
        let w = x.rows(0, cp.n).into_owned();
        ret(x) / w.dot(&(v * &w)).sqrt()
    };
    let top = max_return_point(cp, mu)?;
    let hi = ret(&top.x);
    if !(hi > 1e-14 * mu.amax()) {
        return Err(Error::NoPositiveReturn(hi));
    }
    let g = cp.solve(&obj, &cp.start, None)?;
    let lo = ret(&g.x).max(0.0);
    let at = |r: f64| -> Result<solver::Solution> { cp.solve(&obj, &cp.start, Some((mu, r))) };

    let mut best = if sharpe(&g.x) >= sharpe(&top.x) { g } else { top };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, lo + (hi - lo) * (1.0 - 1e-9));
    let mut r1 = b - inv_phi * (b - a);
    let mut r2 = a + inv_phi * (b - a);
    let mut s1 = at(r1)?;
    let mut s2 = at(r2)?;
    while b - a > 1e-10 * hi {
        if sharpe(&s1.x) >= sharpe(&s2.x) {
            b = r2;
            r2 = r1;
            s2 = s1;
            r1 = b - inv_phi * (b - a);
            s1 = at(r1)?;
        } else {
            a = r1;
            r1 = r2;
            s1 = s2;
            r2 = a + inv_phi * (b - a);
            s2 = at(r2)?;
        }
    }
    for s in [s1, s2] {
        if sharpe(&s.x) > sharpe(&best.x) {
            best = s;
        }
    }
    Ok((best.x, best.diagnostics))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub budget: f64,
    pub gmvp: ConstrainedSolution,
    pub tp: ConstrainedSolution,
}

/// One GMVP and one TP solve per budget (fractions of wealth).
pub fn budget_sweep(
    m: &MarketMoments,
    w_initial: &DVector<f64>,
    model: &CostModel,
    constraint: Constraint,
    budgets: &[f64],
) -> Result<Vec<SweepRow>> {
    if budgets.is_empty() {
        return Err(Error::Parameter("budget list is empty".into()));
    }
    if budgets.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
        return Err(Error::Parameter("budgets must be finite and nonnegative".into()));
    }
    budgets
        .par_iter()
        .map(|&b| {
            let mm = model.with_budget(b);
            Ok(SweepRow {
                budget: b,
                gmvp: optimize_with_costs(m, w_initial, &mm, Objective::Gmvp, constraint)?,
                tp: optimize_with_costs(m, w_initial, &mm, Objective::Tp, constraint)?,
            })
        })
        .collect()
}

/// `budget_sweep.csv`: test weights summed over the test assets, GMVP variance as the objective.
pub fn sweep_table(rows: &[SweepRow], k: usize) -> Table {
    let mut t = Table::new(["budget_bp", "gmvp_test_weight", "tp_test_weight", "objective", "tp_objective"]);
    for r in rows {
        t.push(vec![
            fmt_num(r.budget / BASIS_POINT),
            fmt_num(r.gmvp.weights.test_weight(k)),
            fmt_num(r.tp.weights.test_weight(k)),
            fmt_num(r.gmvp.objective),
            fmt_num(r.tp.objective),
        ]);
    }
    t
}

/// Cost-feasible minimum-variance portfolios over a target-return grid from
/// the cost-constrained GMVP return to the highest reachable return.
pub fn net_frontier(
    m: &MarketMoments,
    w_initial: &DVector<f64>,
    model: &CostModel,
    constraint: Constraint,
    n_points: usize,
) -> Result<Vec<FrontierPoint>> {
    check_initial(m, w_initial, model)?;
    if n_points == 0 {
        return Err(Error::Parameter("frontier needs at least one point".into()));
    }
    let point = |w: DVector<f64>, d: Option<Diagnostics>| FrontierPoint {
        risk: m.portfolio_variance(&w).sqrt(),
        ret: m.portfolio_return(&w),
        weights: PortfolioWeights {
            assets: m.assets.clone(),
            weights: w,
            label: Objective::Gmvp,
            constraint,
            diagnostics: d,
        },
    };
    if model.budget == 0.0 {
        return Ok(vec![point(w_initial.clone(), None)]);
    }
    let long_only = constraint == Constraint::LongOnly;
    let cp = CostProgram::new(m.k, w_initial, model, constraint)?;
    let (mu, v) = scaled(m);
    let obj = variance_objective(&v, cp.dim());
    let g = cp.solve(&obj, &cp.start, None)?;
    let top = max_return_point(&cp, &mu)?;
    let lo = mu.dot(&g.x.rows(0, cp.n).into_owned());
    let hi = mu.dot(&top.x.rows(0, cp.n).into_owned()).max(lo);
    let mut points = vec![point(cp.weights(&g.x, long_only), Some(g.diagnostics.clone()))];
    if n_points > 1 {
        let row = mu.clone();
        let inner: Vec<Result<FrontierPoint>> = (1..n_points - 1)
            .into_par_iter()
            .map(|i| {
                let target = lo + (hi - lo) * i as f64 / (n_points - 1) as f64;
                let s = cp.solve(&obj, &cp.start, Some((&row, target)))?;
                Ok(point(cp.weights(&s.x, long_only), Some(s.diagnostics)))
            })
            .collect();
        for (i, p) in inner.into_iter().enumerate() {
            match p {
                Ok(p) => points.push(p),
                Err(e) => warn!("net frontier point {} skipped: {e}", i + 1),
            }
        }
        if hi > lo {
            points.push(point(cp.weights(&top.x, long_only), Some(top.diagnostics)));
        }
    }
    points.sort_by(|a, b| a.risk.total_cmp(&b.risk));
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn cost_function_examples() {
        assert_eq!(linear_cost(0.0, 0.0035, 1.0), 0.0);
        assert_eq!(linear_cost(1.0, 0.0035, 1.0), 0.0035);
        assert!((linear_cost(0.5, 0.005, 100.0) - 0.25).abs() < 1e-15);
        assert_eq!(quadratic_cost(0.0, 0.015, 1.0), 0.0);
        let at = quadratic_cost(2.0 / 3.0, 3.0 * 0.005, 1.0);
        assert!((at - 0.005 / 1.5).abs() < 1e-15);
        assert!((at - linear_cost(2.0 / 3.0, 0.005, 1.0)).abs() < 1e-15);
        assert!((quadratic_cost(1.0, 0.015, 1.0) - 0.0075).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(calibrate_psi(0.0, 1.0).unwrap(), 3.0);
        assert!((calibrate_psi(0.0, 0.5).unwrap() - 6.0).abs() < 1e-14);
        assert!(calibrate_psi(0.0, f64::INFINITY).is_err());
        assert!(calibrate_psi(0.5, 0.5).is_err());
        let uniform = calibrate_psi_weighted(0.0, 1.0, |_| 1.0).unwrap();
        assert!((uniform - 3.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_examples() {
        assert!((cost_intersection(0.005, 3.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(cost_intersection(0.005, 4.0).unwrap(), 0.5);
        assert_eq!(cost_intersection(0.005, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn total_cost_examples() {
        let m = CostModel::default();
        let w = DVector::from_vec(vec![0.5, 0.5, 0.0]);
        assert_eq!(total_cost(&w, &w, &m, 2).unwrap(), 0.0);
        let b = DVector::from_vec(vec![0.6, 0.4, 0.0]);
        // benchmark shift of 0.1 out of one asset into the other: two legs of 0.1
        assert!((total_cost(&w, &b, &m, 2).unwrap() - 2.0 * 0.00035).abs() < 1e-15);
        let one = DVector::from_vec(vec![0.5, 0.5]);
        let moved = DVector::from_vec(vec![0.6, 0.5]);
        assert!((total_cost(&one, &moved, &m, 2).unwrap() - 0.00035).abs() < 1e-15);
        let t = DVector::from_vec(vec![0.5, 0.4, 0.1]);
        let c = total_cost(&w, &t, &m, 2).unwrap() - 0.00035;
        assert!((c - 0.000075).abs() < 1e-15);
        assert!(total_cost(&w, &one, &m, 2).is_err());
    }

    #[test]
    fn zero_budget_keeps_initial() {
        let m = moments(&[0.01, 0.02, 0.03], &[1.0, 0.2, 0.1, 0.2, 2.0, 0.3, 0.1, 0.3, 3.0], 2);
        let w0 = default_initial_weights(2, 1);
        for o in [Objective::Gmvp, Objective::Tp] {
            let s = optimize_with_costs(&m, &w0, &CostModel::default().with_budget(0.0), o, Constraint::Unconstrained).unwrap();
            assert_eq!(s.weights.weights, w0);
            assert!(s.binding);
        }
    }

    #[test]
    fn large_budget_reaches_closed_form() {
        let m = moments(&[0.01, 0.02, 0.03], &[1.0, 0.2, 0.1, 0.2, 2.0, 0.3, 0.1, 0.3, 3.0], 2);
        let w0 = default_initial_weights(2, 1);
        let model = CostModel::default().with_budget(1.0);
        let g = optimize_with_costs(&m, &w0, &model, Objective::Gmvp, Constraint::Unconstrained).unwrap();
        let gc = crate::frontier::gmvp(&m).unwrap();
        assert!((&g.weights.weights - &gc.weights).amax() < 1e-6);
        let t = optimize_with_costs(&m, &w0, &model, Objective::Tp, Constraint::Unconstrained).unwrap();
        let tc = crate::frontier::tangency(&m).unwrap();
        assert!((&t.weights.weights - &tc.weights).amax() < 1e-6, "{} vs {}", t.weights.weights, tc.weights);
        assert!(!g.binding);
    }

    #[test]
    fn small_budget_binds_and_is_respected() {
        let m = moments(&[0.01, 0.02, 0.03], &[1.0, 0.2, 0.1, 0.2, 2.0, 0.3, 0.1, 0.3, 3.0], 2);
        let w0 = default_initial_weights(2, 1);
        let model = CostModel::default().with_budget(2.0 * BASIS_POINT);
        for c in [Constraint::Unconstrained, Constraint::LongOnly] {
            for o in [Objective::Gmvp, Objective::Tp] {
                let s = optimize_with_costs(&m, &w0, &model, o, c).unwrap();
                assert!(s.cost_spent <= model.budget * model.v0 + 1e-10, "{o:?} {c:?} {}", s.cost_spent);
                assert!(s.binding);
                assert!((s.weights.sum() - 1.0).abs() < 1e-8);
                assert!(s.diagnostics.kkt_residual <= 1e-8);
            }
        }
    }

    #[test]
    fn net_frontier_zero_budget_is_single_point() {
        let m = moments(&[0.01, 0.02, 0.03], &[1.0, 0.2, 0.1, 0.2, 2.0, 0.3, 0.1, 0.3, 3.0], 2);
        let w0 = default_initial_weights(2, 1);
        let pts = net_frontier(&m, &w0, &CostModel::default().with_budget(0.0), Constraint::Unconstrained, 10).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].weights.weights, w0);
        let pts = net_frontier(&m, &w0, &CostModel::default(), Constraint::LongOnly, 10).unwrap();
        assert_eq!(pts.len(), 10);
    }
}
