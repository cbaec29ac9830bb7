use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cryptodiv::analytics::{correlation_matrix, describe, rolling_correlation, stats_table, CorrelationMethod, WEEKS_PER_YEAR};
use cryptodiv::backtest::{run_study, Case};
use cryptodiv::ewci::{build_index, IndexSeries, UniverseSpec};
use cryptodiv::frontier::{self, efficient_frontier, estimate_moments, frontier_table, Constraint, Objective};
use cryptodiv::io::{fmt_num, Table};
use cryptodiv::panel::{align_weekly, load_panel, to_log_returns, weekly_grid, PanelKind, PricePanel, ReturnPanel};
use cryptodiv::simulate::{random_moments, SpanningDesign};
use cryptodiv::spanning::{fit_spanning_regression, joint_significance, mv_spanning_tests_from_design, run_battery};
use cryptodiv::txcost::{budget_sweep, calibrate_psi, cost_intersection, default_initial_weights, net_frontier, sweep_table, BASIS_POINT};

use crate::config::RunConfig;
use crate::Shared;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Index,
    Stats,
    Corr,
    Frontier,
    Spanning,
    Backtest,
    Costs,
    Selftest,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn compute(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

pub fn run(task: Task, flags: &Shared, budgets: Option<Vec<f64>>) -> std::result::Result<(), Failure> {
    let mut cfg = match &flags.config {
        Some(p) => RunConfig::load(p).map_err(usage)?,
        None => {
            let mut c = RunConfig::default();
            c.resolve(&std::env::current_dir().map_err(|e| usage(e.into()))?).map_err(usage)?;
            c
        }
    };
    if let Some(out) = &flags.out {
        cfg.output_dir = std::path::absolute(out).map_err(|e| usage(e.into()))?;
    }
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(c) = flags.constraint {
        cfg.study.constraint = c;
    }
    if let Some(c) = flags.case {
        cfg.study.case = c;
    }
    if let Some(b) = budgets {
        cfg.study.budgets_bp = b;
    }
    cfg.validate().map_err(usage)?;
    if task != Task::Selftest {
        if task == Task::Index && cfg.data.coins.is_none() {
            return Err(usage(anyhow!("index needs data.coins in the configuration")));
        }
        if task != Task::Index && cfg.data.benchmarks.is_none() {
            return Err(usage(anyhow!("data.benchmarks is not configured (pass --config)")));
        }
    }
    if flags.dry_run {
        for f in cfg.input_files() {
            if !f.is_file() {
                return Err(compute(anyhow!("input file {} does not exist", f.display())));
            }
        }
        println!("configuration valid; outputs would go to {}", cfg.output_dir.display());
        return Ok(());
    }
    let mut out = Outputs::new(cfg.output_dir.clone());
    let result = match task {
        Task::Index => cmd_index(&cfg, &mut out),
        Task::Stats => cmd_stats(&cfg, &mut out),
        Task::Corr => cmd_corr(&cfg, &mut out),
        Task::Frontier => cmd_frontier(&cfg, &mut out),
        Task::Spanning => cmd_spanning(&cfg, &mut out),
        Task::Backtest => cmd_backtest(&cfg, flags.case, &mut out),
        Task::Costs => cmd_costs(&cfg, &mut out),
        Task::Selftest => cmd_selftest(&cfg, &mut out),
    };
    for p in &out.written {
        println!("wrote {}", p.display());
    }
    result.map_err(compute)
}

struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: PathBuf) -> Self {
        Self { dir, written: vec![] }
    }

    fn put(&mut self, name: &str, table: &Table) -> Result<()> {
        let p = self.dir.join(name);
        table.write(&p)?;
        self.written.push(p);
        Ok(())
    }
}

struct Inputs {
    returns: ReturnPanel,
    k: usize,
}

impl Inputs {
    fn n(&self) -> usize {
        self.returns.n_assets() - self.k
    }

    fn scoped(&self, with_test: bool) -> ReturnPanel {
        if with_test {
            self.returns.clone()
        } else {
            self.returns.select(&(0..self.k).collect::<Vec<_>>())
        }
    }
}

fn scope(with_test: bool) -> &'static str {
    if with_test {
        "with_test"
    } else {
        "without_test"
    }
}

fn own_grid(panel: &PricePanel) -> Vec<chrono::NaiveDate> {
    let d = panel.dates();
    weekly_grid(d[0], d[d.len() - 1])
}

fn load_index(cfg: &RunConfig, grid: Option<&[chrono::NaiveDate]>) -> Result<IndexSeries> {
    let path = cfg.data.coins.as_ref().context("data.coins is not configured")?;
    let coins = load_panel(path, PanelKind::Coin)?;
    if coins.is_empty() {
        bail!("coin panel {} has no rows", path.display());
    }
    let coins = match grid {
        Some(g) => align_weekly(&coins, g)?,
        None if cfg.data.align_weekly => align_weekly(&coins, &own_grid(&coins))?,
        None => coins,
    };
    let universe = cfg.universe.clone().unwrap_or_default();
    let reference = universe.reference_date.unwrap_or(coins.dates()[0]);
    let spec = if universe.coins.is_empty() {
        UniverseSpec::from_panel(reference, &coins)?
    } else {
        UniverseSpec::new(reference, universe.coins)?
    };
    let index = build_index(&coins, &spec)?;
    for w in &index.warnings {
        warn!("{w}");
    }
    Ok(index)
}

fn load_benchmarks(cfg: &RunConfig) -> Result<PricePanel> {
    let path = cfg.data.benchmarks.as_ref().context("data.benchmarks is not configured")?;
    let bench = load_panel(path, PanelKind::Benchmark)?;
    if bench.len() < 2 {
        bail!("benchmark panel {} needs at least 2 rows", path.display());
    }
    Ok(if cfg.data.align_weekly { align_weekly(&bench, &own_grid(&bench))? } else { bench })
}

/// Log returns ordered benchmarks first, then test columns, then the coin index.
fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let mut prices = load_benchmarks(cfg)?;
    let mut tests = cfg.data.test_columns.clone();
    if cfg.data.coins.is_some() {
        let index = load_index(cfg, Some(prices.dates()))?;
        let ip = index.to_panel(&cfg.data.index_id)?;
        let d = ip.dates();
        prices = prices.slice_dates(d[0], d[d.len() - 1])?.hstack(&ip)?;
        tests.push(cfg.data.index_id.clone());
    }
    prices.require_complete()?;
    let returns = to_log_returns(&prices)?;
    let assets = returns.assets();
    let test_idx: Vec<usize> = tests
        .iter()
        .map(|t| {
            assets
                .iter()
                .position(|a| a == t)
                .ok_or_else(|| anyhow!("test column `{t}` not found in the panel"))
        })
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..assets.len()).filter(|i| !test_idx.contains(i)).collect();
    let k = order.len();
    if k == 0 {
        bail!("no benchmark assets left after removing the test columns");
    }
    order.extend(test_idx);
    Ok(Inputs {
        returns: returns.select(&order),
        k,
    })
}

fn cmd_index(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let grid = match &cfg.data.benchmarks {
        Some(_) => Some(load_benchmarks(cfg)?.dates().to_vec()),
        None => None,
    };
    let index = load_index(cfg, grid.as_deref())?;
    out.put("ewci_levels.csv", &index.levels_table())?;
    out.put("ewci_audit.csv", &index.audit_table())
}

fn cmd_stats(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let inputs = load_inputs(cfg)?;
    let r = &inputs.returns;
    let blocks = (0..r.n_assets())
        .map(|j| describe(r.column(j).as_slice(), WEEKS_PER_YEAR).with_context(|| format!("asset {}", r.assets()[j])))
        .collect::<Result<Vec<_>>>()?;
    out.put("stats.csv", &stats_table(r.assets(), &blocks))
}

fn cmd_corr(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let inputs = load_inputs(cfg)?;
    let r = &inputs.returns;
    for method in CorrelationMethod::all() {
        let m = correlation_matrix(r, method)?;
        out.put(&format!("corr_{}.csv", method.name()), &m.table())?;
    }
    let window = cfg.study.rolling_correlation_window;
    for x in inputs.k..r.n_assets() {
        for y in 0..inputs.k {
            let rc = rolling_correlation(r.column(x).as_slice(), r.column(y).as_slice(), window)?;
            out.put(
                &format!("rollcorr_{}_{}.csv", r.assets()[x], r.assets()[y]),
                &rc.table(r.dates()),
            )?;
        }
    }
    Ok(())
}

fn cmd_frontier(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let inputs = load_inputs(cfg)?;
    let constraint = cfg.study.constraint;
    for with_test in [false, true] {
        if with_test && inputs.n() == 0 {
            continue;
        }
        let m = estimate_moments(&inputs.scoped(with_test), inputs.k)?;
        for objective in [Objective::Gmvp, Objective::Tp] {
            let w = frontier::optimal(&m, objective, constraint)?;
            out.put(&format!("weights_{objective}_{}_{constraint}.csv", scope(with_test)), &w.table())?;
        }
        let points = efficient_frontier(&m, constraint, cfg.study.frontier_points)?;
        out.put(&format!("frontier_{}_{constraint}.csv", scope(with_test)), &frontier_table(&points))?;
    }
    Ok(())
}

fn cmd_spanning(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let inputs = load_inputs(cfg)?;
    if inputs.n() == 0 {
        bail!("spanning tests need at least one test asset");
    }
    match cfg.study.case {
        Case::A => {
            let x = inputs.returns.values();
            let r1 = x.columns(0, inputs.k).into_owned();
            let r2 = x.columns(inputs.k, inputs.n()).into_owned();
            let battery = run_battery(&r1, &r2, &cfg.spanning_config())?;
            out.put("spanning_full.csv", &battery.table())
        }
        Case::B => {
            let mut study = cfg.study_config();
            study.case = Case::B;
            study.cost = None;
            let report = run_study(&inputs.returns, inputs.k, &study)?;
            for w in &report.windows {
                if let Some(b) = &w.spanning {
                    out.put(&format!("spanning_window_{:03}.csv", w.index), &b.table())?;
                }
            }
            out.put("spanning_rolling.csv", &report.spanning_rolling_table())?;
            if let Some(a) = &report.aggregate {
                out.put("significance_shares.csv", &a.table())?;
            }
            Ok(())
        }
    }
}

fn cmd_backtest(cfg: &RunConfig, only: Option<Case>, out: &mut Outputs) -> Result<()> {
    let inputs = load_inputs(cfg)?;
    let cases = match only {
        Some(c) => vec![c],
        None => vec![Case::A, Case::B],
    };
    for case in cases {
        let mut study = cfg.study_config();
        study.case = case;
        let report = run_study(&inputs.returns, inputs.k, &study)?;
        let dir = out.dir.join(format!("case_{}", case.to_string().to_lowercase()));
        out.written.extend(report.write(&dir)?);
    }
    Ok(())
}

fn cmd_costs(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let inputs = load_inputs(cfg)?;
    let model = cfg.cost.unwrap_or_default();
    let constraint = cfg.study.constraint;
    let budgets: Vec<f64> = cfg.study.budgets_bp.iter().map(|b| b * BASIS_POINT).collect();
    let m = estimate_moments(&inputs.returns, inputs.k)?;
    let w0 = default_initial_weights(inputs.k, inputs.n());
    let rows = budget_sweep(&m, &w0, &model, constraint, &budgets)?;
    out.put("budget_sweep.csv", &sweep_table(&rows, inputs.k))?;
    for with_test in [false, true] {
        if with_test && inputs.n() == 0 {
            continue;
        }
        let m = estimate_moments(&inputs.scoped(with_test), inputs.k)?;
        let w0 = default_initial_weights(inputs.k, m.len() - inputs.k);
        let points = net_frontier(&m, &w0, &model, constraint, cfg.study.frontier_points)?;
        out.put(&format!("net_frontier_{}_{constraint}.csv", scope(with_test)), &frontier_table(&points))?;
    }
    Ok(())
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn selftest_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let psi = calibrate_psi(0.0, 1.0)?;
    checks.push(Check {
        name: "psi_calibration",
        passed: psi == 3.0,
        detail: fmt_num(psi),
    });
    let x = cost_intersection(50.0 * BASIS_POINT, 3.0)?;
    checks.push(Check {
        name: "cost_intersection",
        passed: (x - 2.0 / 3.0).abs() < 1e-12,
        detail: fmt_num(x),
    });
    let xi = joint_significance(0.10, 0.05);
    checks.push(Check {
        name: "joint_significance",
        passed: xi == 0.145,
        detail: fmt_num(xi),
    });

    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = random_moments(&mut rng, 3, 1);
        for obj in [Objective::Gmvp, Objective::Tp] {
            for c in [Constraint::Unconstrained, Constraint::LongOnly] {
                match frontier::optimal(&m, obj, c) {
                    Ok(w) => worst = worst.max((w.sum() - 1.0).abs()),
                    Err(cryptodiv::Error::DegenerateTangency(_)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    checks.push(Check {
        name: "weights_sum_to_one",
        passed: worst < 1e-9,
        detail: format!("max deviation {}", fmt_num(worst)),
    });

    let mut violations = 0usize;
    for _ in 0..200 {
        let d = SpanningDesign::spanned(&mut rng, 3, 2);
        let (r1, r2) = d.sample(&mut rng, 120);
        let reg = fit_spanning_regression(&r1, &r2)?;
        let res = mv_spanning_tests_from_design(&reg)?;
        if !(res[0].statistic + 1e-10 >= res[1].statistic && res[1].statistic + 1e-10 >= res[2].statistic) {
            violations += 1;
        }
    }
    checks.push(Check {
        name: "statistic_ordering",
        passed: violations == 0,
        detail: format!("{violations} violations in 200"),
    });
    Ok(checks)
}

fn cmd_selftest(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let checks = selftest_checks(cfg.seed)?;
    let mut t = Table::new(["check", "passed", "detail"]);
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        t.push(vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()]);
    }
    out.put("selftest.csv", &t)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        bail!("{failed} self-check(s) failed");
    }
    Ok(())
}
