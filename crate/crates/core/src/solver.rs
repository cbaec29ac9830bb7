//! Primal-dual interior point method for smooth convex programs
//!
//! ```text
//! minimize f(x)  subject to  A x = b,  x_i >= 0 (i in nonneg),  q_j(x) <= 0
//! ```
//!
//! where each `q_j` is a convex quadratic. The starting point must satisfy the
//! inequalities strictly; equalities may be violated. A projected-gradient
//! ascent over the simplex covers the one non-convex problem the toolkit
//! meets (maximum Sharpe ratio when every mean is negative).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub trait Smooth {
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// `0.5 x'Qx + c'x + r` with symmetric positive semidefinite `Q`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub q: DMatrix<f64>,
    pub c: DVector<f64>,
    pub r: f64,
}

impl Quadratic {
    pub fn new(q: DMatrix<f64>, c: DVector<f64>, r: f64) -> Self {
        Self { q, c, r }
    }

    pub fn linear(c: DVector<f64>) -> Self {
        let n = c.len();
        Self::new(DMatrix::zeros(n, n), c, 0.0)
    }
}

impl Smooth for Quadratic {
    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.c.dot(x) + self.r
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.q * x + &self.c
    }

    fn hessian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.q.clone()
    }
}

pub struct Program<'a> {
    pub objective: &'a dyn Smooth,
    pub eq_a: DMatrix<f64>,
    pub eq_b: DVector<f64>,
    pub nonneg: Vec<usize>,
    pub quad_ineq: Vec<Quadratic>,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tolerance: 1e-11,
            max_iterations: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Largest of the stationarity, primal feasibility and complementarity residuals.
    pub kkt_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: DVector<f64>,
    pub objective: f64,
    pub diagnostics: Diagnostics,
}

struct State {
    x: DVector<f64>,
    lam: DVector<f64>,
    nu: DVector<f64>,
}

impl Program<'_> {
    fn n_ineq(&self) -> usize {
        self.nonneg.len() + self.quad_ineq.len()
    }

    fn constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n_ineq());
        for (j, &i) in self.nonneg.iter().enumerate() {
            g[j] = -x[i];
        }
        let off = self.nonneg.len();
        for (j, q) in self.quad_ineq.iter().enumerate() {
            g[off + j] = q.value(x);
        }
        g
    }

    /// Rows are constraint gradients.
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = x.len();
        let mut d = DMatrix::zeros(self.n_ineq(), n);
        for (j, &i) in self.nonneg.iter().enumerate() {
            d[(j, i)] = -1.0;
        }
        let off = self.nonneg.len();
        for (j, q) in self.quad_ineq.iter().enumerate() {
            d.row_mut(off + j).copy_from(&q.gradient(x).transpose());
        }
        d
    }

    fn residuals(&self, s: &State, t: f64) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let g = self.constraints(&s.x);
        let dg = self.jacobian(&s.x);
        let r_dual = self.objective.gradient(&s.x) + dg.transpose() * &s.lam + self.eq_a.transpose() * &s.nu;
        let r_cent = DVector::from_iterator(g.len(), (0..g.len()).map(|j| -s.lam[j] * g[j] - 1.0 / t));
        let r_pri = &self.eq_a * &s.x - &self.eq_b;
        (r_dual, r_cent, r_pri)
    }

    fn kkt_residual(&self, s: &State) -> f64 {
        let g = self.constraints(&s.x);
        let (r_dual, _, r_pri) = self.residuals(s, f64::INFINITY);
        let comp = (0..g.len()).map(|j| (s.lam[j] * g[j]).abs()).fold(0.0, f64::max);
        r_dual.amax().max(r_pri.amax()).max(comp)
    }
}

fn norm3(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> f64 {
    (a.norm_squared() + b.norm_squared() + c.norm_squared()).sqrt()
}

/// Primal-dual interior point method, with a primal barrier method as the
/// fallback when the primal-dual iteration stalls.
pub fn solve(p: &Program, x0: &DVector<f64>, opts: &Options) -> Result<Solution> {
    match primal_dual(p, x0, opts) {
        Err(e @ Error::Convergence { .. }) => barrier(p, x0, opts).map_err(|_| e),
        other => other,
    }
}

fn primal_dual(p: &Program, x0: &DVector<f64>, opts: &Options) -> Result<Solution> {
    let n = x0.len();
    let m = p.n_ineq();
    let neq = p.eq_a.nrows();
    if p.eq_a.ncols() != n || p.eq_b.len() != neq {
        return Err(Error::Dimension("equality constraint shape mismatch".into()));
    }
    let g0 = p.constraints(x0);
    if g0.iter().any(|&v| !(v < 0.0)) {
        return Err(Error::Parameter("interior point start must satisfy the inequalities strictly".into()));
    }
    let mut s = State {
        x: x0.clone(),
        lam: g0.map(|v| 1.0 / -v),
        nu: DVector::zeros(neq),
    };
    const MU: f64 = 10.0;
    const ALPHA: f64 = 0.01;
    const BETA: f64 = 0.5;
    let mut iterations = 0;
    loop {
        let g = p.constraints(&s.x);
        let gap = if m > 0 { -g.dot(&s.lam) } else { 0.0 };
        let t = if m > 0 { MU * m as f64 / gap.max(f64::MIN_POSITIVE) } else { f64::INFINITY };
        let (r_dual, r_cent, r_pri) = p.residuals(&s, t);
        if r_pri.amax() <= opts.tolerance && r_dual.amax() <= opts.tolerance && gap <= opts.tolerance {
            break;
        }
        if iterations >= opts.max_iterations {
            let kkt = p.kkt_residual(&s);
            if kkt <= opts.tolerance * 1e3 {
                return Ok(conclude(p, s, iterations));
            }
            return Err(Error::Convergence {
                iterations,
                message: format!(
                    "interior point stalled: dual residual {:.3e}, primal residual {:.3e}, gap {:.3e}, KKT {:.3e}",
                    r_dual.amax(),
                    r_pri.amax(),
                    gap,
                    kkt
                ),
            });
        }
        iterations += 1;

        let dg = p.jacobian(&s.x);
        let mut h = p.objective.hessian(&s.x);
        let off = p.nonneg.len();
        for (j, q) in p.quad_ineq.iter().enumerate() {
            h += &q.q * s.lam[off + j];
        }
        let mut rhs_x = -&r_dual;
        for j in 0..m {
            let w = s.lam[j] / -g[j];
            let row = dg.row(j).transpose();
            h += &row * row.transpose() * w;
            rhs_x -= row * (r_cent[j] / g[j]);
        }
        let mut kkt = DMatrix::zeros(n + neq, n + neq);
        kkt.view_mut((0, 0), (n, n)).copy_from(&h);
        kkt.view_mut((0, n), (n, neq)).copy_from(&p.eq_a.transpose());
        kkt.view_mut((n, 0), (neq, n)).copy_from(&p.eq_a);
        let mut rhs = DVector::zeros(n + neq);
        rhs.rows_mut(0, n).copy_from(&rhs_x);
        rhs.rows_mut(n, neq).copy_from(&(-&r_pri));
        let step = match kkt.clone().lu().solve(&rhs) {
            Some(v) if v.iter().all(|x| x.is_finite()) => v,
            _ => {
                let scale = h.amax().max(1.0) * 1e-12;
                for i in 0..n {
                    kkt[(i, i)] += scale;
                }
                kkt.lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::Singular("interior point Newton system is singular".into()))?
            }
        };
        let dx = step.rows(0, n).into_owned();
        let dnu = step.rows(n, neq).into_owned();
        let dlam = DVector::from_iterator(m, (0..m).map(|j| (r_cent[j] - s.lam[j] * dg.row(j).dot(&dx.transpose())) / g[j]));

        let mut smax: f64 = f64::INFINITY;
        for j in 0..m {
            if dlam[j] < 0.0 {
                smax = smax.min(-s.lam[j] / dlam[j]);
            }
        }
        let mut step_len = if smax < 1.0 { 0.99 * smax } else { 1.0 };
        let base = norm3(&r_dual, &r_cent, &r_pri);
        loop {
            let x_new = &s.x + &dx * step_len;
            if p.constraints(&x_new).iter().all(|&v| v < 0.0) {
                let cand = State {
                    x: x_new,
                    lam: &s.lam + &dlam * step_len,
                    nu: &s.nu + &dnu * step_len,
                };
                let (a, b, c) = p.residuals(&cand, t);
                if norm3(&a, &b, &c) <= (1.0 - ALPHA * step_len) * base {
                    s = cand;
                    break;
                }
            }
            step_len *= BETA;
            if step_len < 1e-16 {
                // No further progress is possible in floating point.
                let kkt_res = p.kkt_residual(&s);
                if kkt_res <= opts.tolerance * 1e3 {
                    return Ok(finish(p, s, iterations, kkt_res, true));
                }
                return Err(Error::Convergence {
                    iterations,
                    message: format!("interior point line search failed, KKT residual {kkt_res:.3e}"),
                });
            }
        }
    }
    Ok(conclude(p, s, iterations))
}

fn conclude(p: &Program, s: State, iterations: usize) -> Solution {
    let kkt_res = p.kkt_residual(&s);
    let best = [1.0, 1e-3, 1e3]
        .into_iter()
        .filter_map(|ratio| polish(p, &s, ratio))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    if let Some((x, polished)) = best {
        if polished <= kkt_res.max(1e-12) {
            let s = State { x, ..s };
            return finish(p, s, iterations, polished, true);
        }
    }
    finish(p, s, iterations, kkt_res, true)
}

/// Log-barrier method: infeasible-start Newton steps on
/// `t f(x) - sum log(-g(x))` subject to `Ax = b`, with `t` growing tenfold.
fn barrier(p: &Program, x0: &DVector<f64>, opts: &Options) -> Result<Solution> {
    let n = x0.len();
    let m = p.n_ineq();
    let neq = p.eq_a.nrows();
    let mut x = x0.clone();
    let mut nu = DVector::zeros(neq);
    let mut t = 1.0;
    let mut iterations = 0;
    let residual = |x: &DVector<f64>, nu: &DVector<f64>, t: f64| -> Option<(DVector<f64>, DVector<f64>)> {
        let g = p.constraints(x);
        if g.iter().any(|&v| !(v < 0.0)) {
            return None;
        }
        let dg = p.jacobian(x);
        let mut grad = p.objective.gradient(x) * t;
        for j in 0..m {
            grad -= dg.row(j).transpose() / g[j];
        }
        Some((grad + p.eq_a.transpose() * nu, &p.eq_a * x - &p.eq_b))
    };
    loop {
        for _ in 0..100 {
            iterations += 1;
            let g = p.constraints(&x);
            let dg = p.jacobian(&x);
            let mut h = p.objective.hessian(&x) * t;
            let off = p.nonneg.len();
            for (j, q) in p.quad_ineq.iter().enumerate() {
                h += &q.q / -g[off + j];
            }
            for j in 0..m {
                let row = dg.row(j).transpose();
                h += &row * row.transpose() / (g[j] * g[j]);
            }
            let (rd, rp) = residual(&x, &nu, t).expect("iterate is strictly feasible");
            let mut kkt = DMatrix::zeros(n + neq, n + neq);
            kkt.view_mut((0, 0), (n, n)).copy_from(&h);
            kkt.view_mut((0, n), (n, neq)).copy_from(&p.eq_a.transpose());
            kkt.view_mut((n, 0), (neq, n)).copy_from(&p.eq_a);
            let mut rhs = DVector::zeros(n + neq);
            rhs.rows_mut(0, n).copy_from(&(-&rd));
            rhs.rows_mut(n, neq).copy_from(&(-&rp));
            let Some(step) = kkt.lu().solve(&rhs).filter(|v| v.iter().all(|x| x.is_finite())) else {
                return Err(Error::Singular("barrier Newton system is singular".into()));
            };
            let dx = step.rows(0, n).into_owned();
            let dnu = step.rows(n, neq).into_owned();
            let decrement = dx.dot(&(&h * &dx));
            let base = (rd.norm_squared() + rp.norm_squared()).sqrt();
            let mut len = 1.0;
            let mut moved = false;
            while len > 1e-16 {
                let xn = &x + &dx * len;
                let nn = &nu + &dnu * len;
                if let Some((a, b)) = residual(&xn, &nn, t) {
                    if (a.norm_squared() + b.norm_squared()).sqrt() <= (1.0 - 0.01 * len) * base {
                        x = xn;
                        nu = nn;
                        moved = true;
                        break;
                    }
                }
                len *= 0.5;
            }
            if !moved || (rp.amax() <= 1e-13 && decrement <= 1e-14) {
                break;
            }
        }
        if m as f64 / t <= opts.tolerance || iterations > 50 * opts.max_iterations {
            break;
        }
        t *= 10.0;
    }
    let g = p.constraints(&x);
    let s = State {
        lam: g.map(|v| 1.0 / (-t * v)),
        nu: &nu / t,
        x,
    };
    let sol = conclude(p, s, iterations);
    let limit = opts.tolerance * 1e3;
    if sol.diagnostics.kkt_residual > limit {
        return Err(Error::Convergence {
            iterations,
            message: format!("barrier method stalled, KKT residual {:.3e}", sol.diagnostics.kkt_residual),
        });
    }
    Ok(sol)
}

/// Newton refinement on the active set read off an interior solution.
///
/// Interior iterates approach the boundary only like the square root of the
/// duality gap when strict complementarity fails; fixing the active
/// constraints and solving the resulting equality system recovers the
/// vertex to machine precision. Returns the refined point and its KKT residual.
/// A bound counts as active when `x_i <= ratio * lambda_i`.
fn polish(p: &Program, s: &State, ratio: f64) -> Option<(DVector<f64>, f64)> {
    let n = s.x.len();
    let nb = p.nonneg.len();
    let neq = p.eq_a.nrows();
    let g = p.constraints(&s.x);
    let mut fixed = vec![false; n];
    for (j, &i) in p.nonneg.iter().enumerate() {
        if s.x[i] <= ratio * s.lam[j] {
            fixed[i] = true;
        }
    }
    let active_q: Vec<usize> = (0..p.quad_ineq.len()).filter(|&j| s.lam[nb + j] > -g[nb + j] / ratio).collect();
    let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let nf = free.len();
    let na = active_q.len();
    let dim = nf + na + neq;
    if dim == 0 {
        return None;
    }
    let mut x = s.x.clone();
    for i in 0..n {
        if fixed[i] {
            x[i] = 0.0;
        }
    }
    let mut lq: DVector<f64> = DVector::from_iterator(na, active_q.iter().map(|&j| s.lam[nb + j]));
    let mut nu = s.nu.clone();
    let residual = |x: &DVector<f64>, lq: &DVector<f64>, nu: &DVector<f64>| {
        let mut grad = p.objective.gradient(x) + p.eq_a.transpose() * nu;
        for (a, &j) in active_q.iter().enumerate() {
            grad += p.quad_ineq[j].gradient(x) * lq[a];
        }
        let mut f = DVector::zeros(dim);
        for (r, &i) in free.iter().enumerate() {
            f[r] = grad[i];
        }
        for (a, &j) in active_q.iter().enumerate() {
            f[nf + a] = p.quad_ineq[j].value(x);
        }
        f.rows_mut(nf + na, neq).copy_from(&(&p.eq_a * x - &p.eq_b));
        (f, grad)
    };
    let mut best = f64::INFINITY;
    for _ in 0..30 {
        let (f, _) = residual(&x, &lq, &nu);
        let norm = f.amax();
        if !(norm < best) {
            break;
        }
        best = norm;
        if norm <= 1e-15 {
            break;
        }
        let mut h = p.objective.hessian(&x);
        for (a, &j) in active_q.iter().enumerate() {
            h += &p.quad_ineq[j].q * lq[a];
        }
        let mut jac = DMatrix::zeros(dim, dim);
        for (r, &i) in free.iter().enumerate() {
            for (c, &k) in free.iter().enumerate() {
                jac[(r, c)] = h[(i, k)];
            }
            for (a, &j) in active_q.iter().enumerate() {
                let gq = p.quad_ineq[j].gradient(&x);
                jac[(r, nf + a)] = gq[i];
                jac[(nf + a, r)] = gq[i];
            }
            for e in 0..neq {
                jac[(r, nf + na + e)] = p.eq_a[(e, i)];
                jac[(nf + na + e, r)] = p.eq_a[(e, i)];
            }
        }
        let apply = |step: &DVector<f64>| {
            let (mut x, mut lq, mut nu) = (x.clone(), lq.clone(), nu.clone());
            for (r, &i) in free.iter().enumerate() {
                x[i] += step[r];
            }
            for a in 0..na {
                lq[a] += step[nf + a];
            }
            for e in 0..neq {
                nu[e] += step[nf + na + e];
            }
            (x, lq, nu)
        };
        // Minimum-norm steps cover degenerate vertices where the multipliers are not unique.
        let mut steps: Vec<DVector<f64>> = jac.clone().lu().solve(&(-&f)).into_iter().collect();
        steps.extend(jac.svd(true, true).solve(&(-&f), 1e-14).ok());
        let (nx, nl, nn) = steps
            .iter()
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .map(|s| apply(s))
            .min_by(|a, b| residual(&a.0, &a.1, &a.2).0.amax().total_cmp(&residual(&b.0, &b.1, &b.2).0.amax()))?;
        x = nx;
        lq = nl;
        nu = nn;
    }
    let (f, grad) = residual(&x, &lq, &nu);
    // Sign conditions: free variables inside their bounds, multipliers of fixed bounds and
    // active quadratics nonnegative, inactive quadratics satisfied.
    let mut violation: f64 = f.amax();
    for &i in &free {
        if p.nonneg.contains(&i) {
            violation = violation.max(-x[i]);
        }
    }
    for i in 0..n {
        if fixed[i] {
            violation = violation.max(-grad[i]);
        }
    }
    for a in 0..na {
        violation = violation.max(-lq[a]);
    }
    for (j, q) in p.quad_ineq.iter().enumerate() {
        if !active_q.contains(&j) {
            violation = violation.max(q.value(&x));
        }
    }
    if !violation.is_finite() {
        return None;
    }
    for &i in &p.nonneg {
        x[i] = x[i].max(0.0);
    }
    Some((x, violation))
}

fn finish(p: &Program, s: State, iterations: usize, kkt_residual: f64, converged: bool) -> Solution {
    Solution {
        objective: p.objective.value(&s.x),
        x: s.x,
        diagnostics: Diagnostics {
            iterations,
            kkt_residual,
            converged,
        },
    }
}

/// Euclidean projection onto the unit simplex.
pub fn project_simplex(v: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = v.iter().cloned().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.map(|x| (x - theta).max(0.0))
}

fn sharpe_value(mu: &DVector<f64>, v: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    mu.dot(w) / w.dot(&(v * w)).sqrt()
}

/// Maximum Sharpe ratio over the simplex by projected gradient ascent from
/// every vertex and the barycenter; the best local optimum is returned.
pub fn max_sharpe_simplex(mu: &DVector<f64>, v: &DMatrix<f64>, opts: &Options) -> Result<Solution> {
    let n = mu.len();
    let mut starts: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    starts.push(DVector::from_element(n, 1.0 / n as f64));
    let cap = opts.max_iterations * 100;
    let mut best: Option<Solution> = None;
    for start in starts {
        let mut w = start;
        let mut f = sharpe_value(mu, v, &w);
        let mut step: f64 = 1.0;
        let mut residual = f64::INFINITY;
        let mut it = 0;
        while it < cap {
            it += 1;
            let vw = v * &w;
            let var = w.dot(&vw);
            let sd = var.sqrt();
            let grad = mu / sd - vw * (mu.dot(&w) / (var * sd));
            residual = (project_simplex(&(&w + &grad)) - &w).amax();
            if residual <= opts.tolerance {
                break;
            }
            step = (step * 2.0).min(1e6);
            loop {
                let cand = project_simplex(&(&w + &grad * step));
                let fc = sharpe_value(mu, v, &cand);
                let moved = &cand - &w;
                if fc >= f + 1e-4 * grad.dot(&moved) || step < 1e-14 {
                    w = cand;
                    f = fc;
                    break;
                }
                step *= 0.5;
            }
            if step < 1e-14 {
                break;
            }
        }
        let sol = Solution {
            objective: f,
            x: w,
            diagnostics: Diagnostics {
                iterations: it,
                kkt_residual: residual,
                converged: residual <= opts.tolerance * 1e3,
            },
        };
        if best.as_ref().map_or(true, |b| sol.objective > b.objective) {
            best = Some(sol);
        }
    }
    let best = best.expect("at least one start");
    if !best.diagnostics.converged {
        return Err(Error::Convergence {
            iterations: best.diagnostics.iterations,
            message: format!(
                "projected gradient on the simplex did not converge, residual {:.3e}",
                best.diagnostics.kkt_residual
            ),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_qp_matches_closed_form() {
        // min 0.5 x'x s.t. x1 + x2 = 1
        let obj = Quadratic::new(DMatrix::identity(2, 2), DVector::zeros(2), 0.0);
        let p = Program {
            objective: &obj,
            eq_a: DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            eq_b: DVector::from_vec(vec![1.0]),
            nonneg: vec![],
            quad_ineq: vec![],
        };
        let s = solve(&p, &DVector::from_vec(vec![3.0, -1.0]), &Options::default()).unwrap();
        assert!((s.x[0] - 0.5).abs() < 1e-12 && (s.x[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn active_bound() {
        // min 0.5 (x1 - 2)^2 + 0.5 (x2 + 1)^2, x1 + x2 = 1, x >= 0 -> (1, 0)
        let obj = Quadratic::new(DMatrix::identity(2, 2), DVector::from_vec(vec![-2.0, 1.0]), 2.5);
        let p = Program {
            objective: &obj,
            eq_a: DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            eq_b: DVector::from_vec(vec![1.0]),
            nonneg: vec![0, 1],
            quad_ineq: vec![],
        };
        let s = solve(&p, &DVector::from_vec(vec![0.5, 0.5]), &Options::default()).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-9 && s.x[1].abs() < 1e-9);
        assert!(s.diagnostics.kkt_residual <= 1e-8);
    }

    #[test]
    fn quadratic_inequality_disc() {
        // min -x1 s.t. x1^2 + x2^2 <= 1 -> (1, 0)
        let obj = Quadratic::linear(DVector::from_vec(vec![-1.0, 0.0]));
        let disc = Quadratic::new(DMatrix::identity(2, 2) * 2.0, DVector::zeros(2), -1.0);
        let p = Program {
            objective: &obj,
            eq_a: DMatrix::zeros(0, 2),
            eq_b: DVector::zeros(0),
            nonneg: vec![],
            quad_ineq: vec![disc],
        };
        let s = solve(&p, &DVector::zeros(2), &Options::default()).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-9 && s.x[1].abs() < 1e-9);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&DVector::from_vec(vec![2.0, 0.0]));
        assert_eq!(p, DVector::from_vec(vec![1.0, 0.0]));
        let p = project_simplex(&DVector::from_vec(vec![0.2, 0.2, 0.2]));
        assert!(p.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn negative_means_sharpe() {
        // Both means negative: the more volatile asset has the better (less negative) ratio.
        let mu = DVector::from_vec(vec![-0.1, -0.1]);
        let v = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let s = max_sharpe_simplex(&mu, &v, &Options::default()).unwrap();
        assert!((s.x[1] - 1.0).abs() < 1e-9);
        assert!((s.objective + 0.05).abs() < 1e-12);
    }
}
