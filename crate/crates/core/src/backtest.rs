//! Full-sample (case A) and rolling-window (case B) studies.
//!
//! Case B estimates weights on a trailing window of whole calendar months,
//! holds them through the following month, and rolls forward one month at a
//! time. Before the first window closes the capital sits in the equally
//! weighted benchmark portfolio. Weights apply to simple returns and are held
//! constant (rebalanced weekly) within a month.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::analytics::{historical_cvar, max_drawdown, mean, sample_variance, sharpe_ratio, sortino_ratio, DEFAULT_CVAR_CONFIDENCE};
use crate::error::{Error, Result};
use crate::frontier::{self, efficient_frontier, estimate_moments, frontier_table, Constraint, FrontierPoint, Objective, DEFAULT_FRONTIER_POINTS};
use crate::io::{fmt_date, fmt_num, fmt_opt, Table};
use crate::panel::ReturnPanel;
use crate::spanning::{run_battery, SpanningBattery, SpanningConfig, TestKind};
use crate::txcost::{default_initial_weights, net_frontier, optimize_with_costs, CostModel};

pub const DEFAULT_WINDOW_MONTHS: usize = 12;
pub const DEFAULT_INITIAL_WEALTH: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Deserialize, serde::Serialize)]
pub enum Case {
    A,
    #[default]
    B,
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            other => Err(Error::Parameter(format!("unknown case `{other}` (expected A or B)"))),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "A",
            Self::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub case: Case,
    pub window_months: usize,
    pub constraint: Constraint,
    pub cost: Option<CostModel>,
    pub spanning: SpanningConfig,
    pub initial_wealth: f64,
    pub frontier_points: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            case: Case::B,
            window_months: DEFAULT_WINDOW_MONTHS,
            constraint: Constraint::Unconstrained,
            cost: None,
            spanning: SpanningConfig::default(),
            initial_wealth: DEFAULT_INITIAL_WEALTH,
            frontier_points: DEFAULT_FRONTIER_POINTS,
        }
    }
}

/// One of the four portfolios tracked by a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub objective: Objective,
    pub with_test: bool,
}

impl Variant {
    pub fn all() -> [Variant; 4] {
        [
            Variant { objective: Objective::Gmvp, with_test: false },
            Variant { objective: Objective::Gmvp, with_test: true },
            Variant { objective: Objective::Tp, with_test: false },
            Variant { objective: Objective::Tp, with_test: true },
        ]
    }

    pub fn scope(&self) -> &'static str {
        if self.with_test {
            "with_test"
        } else {
            "without_test"
        }
    }

    pub fn name(&self) -> String {
        format!("{}_{}", self.objective, self.scope())
    }
}

/// Rows `start..end` of a weekly panel falling in one calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonthBlock {
    pub year: i32,
    pub month: u32,
    pub start: usize,
    pub end: usize,
}

pub fn month_blocks(dates: &[NaiveDate]) -> Vec<MonthBlock> {
    let mut out: Vec<MonthBlock> = Vec::new();
    for (i, d) in dates.iter().enumerate() {
        match out.last_mut() {
            Some(b) if b.year == d.year() && b.month == d.month() => b.end = i + 1,
            _ => out.push(MonthBlock {
                year: d.year(),
                month: d.month(),
                start: i,
                end: i + 1,
            }),
        }
    }
    out
}

/// Rolling windows of `window` months in a sample of `months` months.
pub fn window_count(months: usize, window: usize) -> usize {
    if window == 0 || months < window {
        0
    } else {
        months - window + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowRecord {
    pub index: usize,
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// First and last date of the month the weights are held, if any.
    pub hold: Option<(NaiveDate, NaiveDate)>,
    /// Full-length weight vectors; benchmark-only portfolios carry zeros on the test assets.
    pub weights: Vec<(Variant, DVector<f64>)>,
    /// Portfolios whose weights were carried over because the window could not be solved.
    pub flagged: Vec<Variant>,
    pub spanning: Option<SpanningBattery>,
}

impl WindowRecord {
    pub fn weights_for(&self, v: Variant) -> Option<&DVector<f64>> {
        self.weights.iter().find(|(x, _)| *x == v).map(|(_, w)| w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthPath {
    /// Wealth after each period.
    pub values: Vec<f64>,
    pub end_value: f64,
    /// A period lost the whole portfolio; the path stays at zero afterwards.
    pub floored: bool,
}

/// Compounds `C_{t+1} = C_t (1 + w_t' r_t)` over the rows of `simple_returns`.
pub fn wealth_path(weights: &[DVector<f64>], simple_returns: &DMatrix<f64>, initial: f64) -> Result<WealthPath> {
    if weights.len() != simple_returns.nrows() {
        return Err(Error::Dimension("one weight vector per period is required".into()));
    }
    let mut c = initial;
    let mut floored = false;
    let mut values = Vec::with_capacity(weights.len());
    for (t, w) in weights.iter().enumerate() {
        if w.len() != simple_returns.ncols() {
            return Err(Error::Dimension("weight vector length differs from the asset count".into()));
        }
        let r: f64 = (0..w.len()).map(|j| w[j] * simple_returns[(t, j)]).sum();
        if r <= -1.0 {
            floored = true;
        }
        c = if floored { 0.0 } else { c * (1.0 + r) };
        values.push(c);
    }
    Ok(WealthPath {
        end_value: c,
        values,
        floored,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioMetrics {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub std_dev: f64,
    pub cvar: f64,
    pub max_drawdown: f64,
    pub sharpe: Option<f64>,
    pub sortino: Option<f64>,
    pub end_value: f64,
}

/// Metrics of realized per-period simple returns; `wealth` includes the starting value.
pub fn portfolio_metrics(returns: &[f64], wealth: &[f64], end_value: f64) -> Result<PortfolioMetrics> {
    if returns.len() < 2 {
        return Err(Error::InsufficientData("portfolio metrics need at least 2 periods".into()));
    }
    let degenerate = sample_variance(returns) <= 0.0;
    Ok(PortfolioMetrics {
        min: returns.iter().cloned().fold(f64::INFINITY, f64::min),
        mean: mean(returns),
        max: returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        std_dev: sample_variance(returns).max(0.0).sqrt(),
        cvar: historical_cvar(returns, DEFAULT_CVAR_CONFIDENCE),
        max_drawdown: max_drawdown(wealth),
        sharpe: if degenerate { None } else { sharpe_ratio(returns) },
        sortino: if degenerate { None } else { sortino_ratio(returns) },
        end_value,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantPath {
    pub variant: Variant,
    pub dates: Vec<NaiveDate>,
    pub wealth: WealthPath,
    /// Realized simple returns over the out-of-sample months.
    pub held_returns: Vec<f64>,
    pub metrics: Option<PortfolioMetrics>,
}

/// Significance buckets: p in [0.10, 0.05) (first stepdown step only), [0.05, 0.01),
/// [0.01, 0.001), below 0.001, and not significant.
pub const BUCKETS: [&str; 5] = ["p_10_5", "p_5_1", "p_1_01", "p_01", "non_significant"];

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceShares {
    pub n_windows: usize,
    pub counts: Vec<(TestKind, [usize; 5])>,
}

impl SignificanceShares {
    pub fn counts_for(&self, test: TestKind) -> [usize; 5] {
        self.counts.iter().find(|(t, _)| *t == test).map(|(_, c)| *c).unwrap_or([0; 5])
    }

    pub fn share(&self, test: TestKind, bucket: usize) -> f64 {
        self.counts_for(test)[bucket] as f64 / self.n_windows as f64
    }

    /// Share of windows significant at 5% or better.
    pub fn significant_share(&self, test: TestKind) -> f64 {
        let c = self.counts_for(test);
        (c[1] + c[2] + c[3]) as f64 / self.n_windows as f64
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(
            std::iter::once("test".to_string())
                .chain(BUCKETS.iter().map(|b| b.to_string()))
                .chain(std::iter::once("windows".to_string())),
        );
        for (test, _) in &self.counts {
            let mut row = vec![test.name().to_string()];
            row.extend((0..5).map(|b| fmt_num(self.share(*test, b))));
            row.push(self.n_windows.to_string());
            t.push(row);
        }
        t
    }
}

fn bucket(p: f64, coarse: bool) -> usize {
    if p < 0.001 {
        3
    } else if p < 0.01 {
        2
    } else if p < 0.05 {
        1
    } else if coarse && p < 0.10 {
        0
    } else {
        4
    }
}

pub fn aggregate_significance(history: &[SpanningBattery]) -> Result<SignificanceShares> {
    if history.is_empty() {
        return Err(Error::InsufficientData("no spanning results to aggregate".into()));
    }
    let counts = TestKind::all()
        .iter()
        .map(|&test| {
            let mut c = [0usize; 5];
            for b in history {
                c[bucket(b.get(test).p_value, test == TestKind::F1)] += 1;
            }
            (test, c)
        })
        .collect();
    Ok(SignificanceShares {
        n_windows: history.len(),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub case: Case,
    pub constraint: Constraint,
    pub assets: Vec<String>,
    pub k: usize,
    pub windows: Vec<WindowRecord>,
    pub paths: Vec<VariantPath>,
    pub aggregate: Option<SignificanceShares>,
    /// Plot data keyed by file tag, e.g. `with_test_unconstrained`.
    pub frontiers: Vec<(String, Vec<FrontierPoint>)>,
    pub net_frontiers: Vec<(String, Vec<FrontierPoint>)>,
    pub warnings: Vec<String>,
}

fn variants_for(n: usize) -> Vec<Variant> {
    Variant::all().into_iter().filter(|v| n > 0 || !v.with_test).collect()
}

fn pad(w: &DVector<f64>, len: usize) -> DVector<f64> {
    let mut out = DVector::zeros(len);
    out.rows_mut(0, w.len()).copy_from(w);
    out
}

/// Weights of one portfolio on one sample, padded to the full asset count.
fn solve_variant(
    panel: &ReturnPanel,
    k: usize,
    v: Variant,
    config: &StudyConfig,
    w_initial: &DVector<f64>,
) -> Result<DVector<f64>> {
    let total = panel.n_assets();
    let sub = if v.with_test { panel.clone() } else { panel.select(&(0..k).collect::<Vec<_>>()) };
    let m = estimate_moments(&sub, k)?;
    let w = match &config.cost {
        None => frontier::optimal(&m, v.objective, config.constraint)?.weights,
        Some(model) => {
            let w0 = w_initial.rows(0, m.len()).into_owned();
            let w0 = &w0 / w0.sum();
            optimize_with_costs(&m, &w0, model, v.objective, config.constraint)?.weights.weights
        }
    };
    Ok(pad(&w, total))
}

fn spanning_for(panel: &ReturnPanel, k: usize, config: &StudyConfig) -> Result<Option<SpanningBattery>> {
    let total = panel.n_assets();
    if total == k {
        return Ok(None);
    }
    let x = panel.values();
    let r1 = x.columns(0, k).into_owned();
    let r2 = x.columns(k, total - k).into_owned();
    run_battery(&r1, &r2, &config.spanning).map(Some)
}

fn check_panel(panel: &ReturnPanel, k: usize) -> Result<()> {
    if k == 0 || k > panel.n_assets() {
        return Err(Error::Dimension(format!(
            "benchmark count {k} out of range 1..={}",
            panel.n_assets()
        )));
    }
    Ok(())
}

pub fn run_study(panel: &ReturnPanel, k: usize, config: &StudyConfig) -> Result<BacktestReport> {
    match config.case {
        Case::A => run_case_a(panel, k, config),
        Case::B => run_case_b(panel, k, config),
    }
}

/// One optimization and one spanning battery over the whole sample.
pub fn run_case_a(panel: &ReturnPanel, k: usize, config: &StudyConfig) -> Result<BacktestReport> {
    check_panel(panel, k)?;
    let total = panel.n_assets();
    let n = total - k;
    let w0 = default_initial_weights(k, n);
    let mut weights = Vec::new();
    for v in variants_for(n) {
        weights.push((v, solve_variant(panel, k, v, config, &w0)?));
    }
    let spanning = spanning_for(panel, k, config)?;
    let mut frontiers = Vec::new();
    let mut net_frontiers = Vec::new();
    for with_test in [false, true] {
        if with_test && n == 0 {
            continue;
        }
        let sub = if with_test { panel.clone() } else { panel.select(&(0..k).collect::<Vec<_>>()) };
        let m = estimate_moments(&sub, k)?;
        let tag = format!("{}_{}", if with_test { "with_test" } else { "without_test" }, config.constraint);
        frontiers.push((tag.clone(), efficient_frontier(&m, config.constraint, config.frontier_points)?));
        if let Some(model) = &config.cost {
            let w_init = default_initial_weights(k, m.len() - k);
            net_frontiers.push((tag, net_frontier(&m, &w_init, model, config.constraint, config.frontier_points)?));
        }
    }
    let dates = panel.dates();
    Ok(BacktestReport {
        case: Case::A,
        constraint: config.constraint,
        assets: panel.assets().to_vec(),
        k,
        windows: vec![WindowRecord {
            index: 0,
            start: dates[0],
            end: dates[dates.len() - 1],
            hold: None,
            weights,
            flagged: vec![],
            spanning,
        }],
        paths: vec![],
        aggregate: None,
        frontiers,
        net_frontiers,
        warnings: vec![],
    })
}

/// Rolling estimation over `window_months` months, monthly steps.
pub fn run_case_b(panel: &ReturnPanel, k: usize, config: &StudyConfig) -> Result<BacktestReport> {
    check_panel(panel, k)?;
    let total = panel.n_assets();
    let n = total - k;
    let months = month_blocks(panel.dates());
    let wm = config.window_months;
    if wm == 0 || months.len() < wm + 1 {
        return Err(Error::InsufficientData(format!(
            "rolling study needs at least {} months, got {}",
            wm + 1,
            months.len()
        )));
    }
    let n_windows = window_count(months.len(), wm);
    let variants = variants_for(n);
    let dates = panel.dates();
    let mut warnings = Vec::new();

    let slice = |i: usize| panel.rows(months[i].start, months[i + wm - 1].end);
    let spanning: Vec<Result<Option<SpanningBattery>>> = (0..n_windows)
        .into_par_iter()
        .map(|i| spanning_for(&slice(i), k, config))
        .collect();

    let ew = default_initial_weights(k, n);
    // Without a cost model every window is independent; with one, each solve starts from the last weights.
    let mut solved: Vec<Vec<Option<Result<DVector<f64>>>>> = if config.cost.is_none() {
        (0..n_windows)
            .into_par_iter()
            .map(|i| {
                let s = slice(i);
                variants.iter().map(|&v| Some(solve_variant(&s, k, v, config, &ew))).collect()
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut prev: HashMap<Variant, DVector<f64>> = variants.iter().map(|&v| (v, ew.clone())).collect();
    let mut windows = Vec::with_capacity(n_windows);
    for (i, sp) in spanning.into_iter().enumerate() {
        let s = slice(i);
        let mut weights = Vec::new();
        let mut flagged = Vec::new();
        for (j, &v) in variants.iter().enumerate() {
            let result = if config.cost.is_none() {
                solved[i][j].take().expect("solved once")
            } else {
                solve_variant(&s, k, v, config, &prev[&v])
            };
            let w = match result {
                Ok(w) => w,
                Err(e) => {
                    let msg = format!("window {i} ({}): {} weights carried over: {e}", fmt_date(s.dates()[0]), v.name());
                    warn!("{msg}");
                    warnings.push(msg);
                    flagged.push(v);
                    prev[&v].clone()
                }
            };
            prev.insert(v, w.clone());
            weights.push((v, w));
        }
        let spanning = match sp {
            Ok(b) => b,
            Err(e) => {
                let msg = format!("window {i}: spanning tests skipped: {e}");
                warn!("{msg}");
                warnings.push(msg);
                None
            }
        };
        let hold = months.get(i + wm).map(|b| (dates[b.start], dates[b.end - 1]));
        windows.push(WindowRecord {
            index: i,
            start: s.dates()[0],
            end: s.dates()[s.len() - 1],
            hold,
            weights,
            flagged,
            spanning,
        });
    }

    let simple = panel.simple_returns();
    let first_held = months[wm].start;
    let mut paths = Vec::new();
    for &v in &variants {
        let mut per_week = vec![ew.clone(); panel.len()];
        for (mi, b) in months.iter().enumerate().skip(wm) {
            let w = windows[mi - wm].weights_for(v).expect("weights for every variant");
            for slot in per_week.iter_mut().take(b.end).skip(b.start) {
                *slot = w.clone();
            }
        }
        let wealth = wealth_path(&per_week, &simple, config.initial_wealth)?;
        if wealth.floored {
            let msg = format!("{}: wealth exhausted, path floored at zero", v.name());
            warn!("{msg}");
            warnings.push(msg);
        }
        let held_returns: Vec<f64> = (first_held..panel.len())
            .map(|t| (0..total).map(|j| per_week[t][j] * simple[(t, j)]).sum())
            .collect();
        let start_value = if first_held == 0 { config.initial_wealth } else { wealth.values[first_held - 1] };
        let held_wealth: Vec<f64> = std::iter::once(start_value).chain(wealth.values[first_held..].iter().cloned()).collect();
        let metrics = portfolio_metrics(&held_returns, &held_wealth, wealth.end_value).ok();
        paths.push(VariantPath {
            variant: v,
            dates: dates.to_vec(),
            wealth,
            held_returns,
            metrics,
        });
    }

    let history: Vec<SpanningBattery> = windows.iter().filter_map(|w| w.spanning.clone()).collect();
    let aggregate = if history.is_empty() { None } else { Some(aggregate_significance(&history)?) };
    Ok(BacktestReport {
        case: Case::B,
        constraint: config.constraint,
        assets: panel.assets().to_vec(),
        k,
        windows,
        paths,
        aggregate,
        frontiers: vec![],
        net_frontiers: vec![],
        warnings,
    })
}

impl BacktestReport {
    pub fn scenario(&self) -> String {
        self.constraint.to_string()
    }

    /// Window-by-asset weights of one portfolio.
    pub fn heatmap_table(&self, v: Variant) -> Table {
        let mut t = Table::new(
            ["window", "start", "end", "hold_start", "hold_end", "flagged"]
                .iter()
                .map(|s| s.to_string())
                .chain(self.assets.iter().cloned()),
        );
        for w in &self.windows {
            let Some(weights) = w.weights_for(v) else { continue };
            let mut row = vec![
                w.index.to_string(),
                fmt_date(w.start),
                fmt_date(w.end),
                w.hold.map(|h| fmt_date(h.0)).unwrap_or_default(),
                w.hold.map(|h| fmt_date(h.1)).unwrap_or_default(),
                w.flagged.contains(&v).to_string(),
            ];
            row.extend(weights.iter().map(|x| fmt_num(*x)));
            t.push(row);
        }
        t
    }

    pub fn metrics_table(&self) -> Table {
        let mut t = Table::new([
            "portfolio",
            "min",
            "mean",
            "max",
            "std_dev",
            "cvar",
            "max_drawdown",
            "sharpe",
            "sortino",
            "end_value",
        ]);
        for p in &self.paths {
            let mut row = vec![p.variant.name()];
            match &p.metrics {
                Some(m) => row.extend([
                    fmt_num(m.min),
                    fmt_num(m.mean),
                    fmt_num(m.max),
                    fmt_num(m.std_dev),
                    fmt_num(m.cvar),
                    fmt_num(m.max_drawdown),
                    fmt_opt(m.sharpe),
                    fmt_opt(m.sortino),
                    fmt_num(m.end_value),
                ]),
                None => {
                    row.extend(std::iter::repeat_n(String::new(), 8));
                    row.push(fmt_num(p.wealth.end_value));
                }
            }
            t.push(row);
        }
        t
    }

    pub fn wealth_table(&self) -> Table {
        let mut t = Table::new(std::iter::once("date".to_string()).chain(self.paths.iter().map(|p| p.variant.name())));
        if let Some(first) = self.paths.first() {
            for (i, d) in first.dates.iter().enumerate() {
                let mut row = vec![fmt_date(*d)];
                row.extend(self.paths.iter().map(|p| fmt_num(p.wealth.values[i])));
                t.push(row);
            }
        }
        t
    }

    pub fn spanning_rolling_table(&self) -> Table {
        let mut header = vec!["window".to_string(), "start".into(), "end".into()];
        for k in TestKind::all() {
            header.push(format!("{}_stat", k.name()));
            header.push(format!("{}_p", k.name()));
        }
        header.push("joint_reject".into());
        let mut t = Table::new(header);
        for w in &self.windows {
            let Some(b) = &w.spanning else { continue };
            let mut row = vec![w.index.to_string(), fmt_date(w.start), fmt_date(w.end)];
            for k in TestKind::all() {
                row.push(fmt_num(b.get(k).statistic));
                row.push(fmt_num(b.get(k).p_value));
            }
            row.push(b.stepdown.reject().to_string());
            t.push(row);
        }
        t
    }

    /// Writes every output file of the study into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let mut put = |name: String, table: Table| -> Result<()> {
            let p = dir.join(name);
            table.write(&p)?;
            written.push(p);
            Ok(())
        };
        let scenario = self.scenario();
        let variants: Vec<Variant> = self.windows.first().map(|w| w.weights.iter().map(|(v, _)| *v).collect()).unwrap_or_default();
        for v in variants {
            put(format!("heatmap_{}_{}_{scenario}.csv", v.objective, v.scope()), self.heatmap_table(v))?;
        }
        match self.case {
            Case::A => {
                if let Some(b) = &self.windows[0].spanning {
                    put("spanning_full.csv".into(), b.table())?;
                }
                for (tag, pts) in &self.frontiers {
                    put(format!("frontier_{tag}.csv"), frontier_table(pts))?;
                }
                for (tag, pts) in &self.net_frontiers {
                    put(format!("net_frontier_{tag}.csv"), frontier_table(pts))?;
                }
            }
            Case::B => {
                put(format!("metrics_{scenario}.csv"), self.metrics_table())?;
                put(format!("wealth_{scenario}.csv"), self.wealth_table())?;
                put("spanning_rolling.csv".into(), self.spanning_rolling_table())?;
                if let Some(a) = &self.aggregate {
                    put("significance_shares.csv".into(), a.table())?;
                }
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Days;

    fn fridays(n: usize) -> Vec<NaiveDate> {
        let d = NaiveDate::from_ymd_opt(2014, 1, 3).unwrap();
        (0..n).map(|i| d + Days::new(7 * i as u64)).collect()
    }

    #[test]
    fn compounding_examples() {
        let w = vec![DVector::from_element(1, 1.0); 10];
        let r = DMatrix::from_element(10, 1, 0.01);
        let p = wealth_path(&w, &r, 100.0).unwrap();
        assert!((p.end_value - 100.0 * 1.01f64.powi(10)).abs() < 1e-10);
        assert!((p.end_value - 110.462).abs() < 1e-3);
        let r = DMatrix::from_column_slice(2, 1, &[-0.5, 1.0]);
        let p = wealth_path(&w[..2], &r, 100.0).unwrap();
        assert_eq!(p.values, vec![50.0, 100.0]);
        let r = DMatrix::from_column_slice(2, 1, &[-1.5, 1.0]);
        let p = wealth_path(&w[..2], &r, 100.0).unwrap();
        assert!(p.floored);
        assert_eq!(p.end_value, 0.0);
    }

    #[test]
    fn month_blocks_and_window_count() {
        let d = fridays(10);
        let b = month_blocks(&d);
        // 2014-01-03 .. 2014-03-07: five Fridays in January, four in February, one in March.
        assert_eq!(b.len(), 3);
        assert_eq!((b[0].start, b[0].end, b[1].end, b[2].end), (0, 5, 9, 10));
        assert_eq!(window_count(65, 12), 54);
        assert_eq!(window_count(12, 12), 1);
        assert_eq!(window_count(11, 12), 0);
    }

    #[test]
    fn significance_counting() {
        let p_values = |p: f64| crate::spanning::SpanningResult {
            test: TestKind::Wald,
            statistic: 0.0,
            dof: crate::spanning::Dof::ChiSquare(2.0),
            p_value: p,
            eigenvalues: None,
        };
        let battery = |p: f64| {
            let r = p_values(p);
            SpanningBattery {
                wald: r.clone(),
                lr: r.clone(),
                lm: r.clone(),
                gmm: r.clone(),
                stepdown: crate::spanning::Stepdown {
                    f1: r.clone(),
                    f2: r,
                    xi1: 0.1,
                    xi2: 0.05,
                    xi_joint: 0.145,
                },
                level: 0.05,
                degenerate: false,
            }
        };
        let mut h: Vec<_> = (0..43).map(|_| battery(0.5)).collect();
        h.extend((0..11).map(|_| battery(0.02)));
        let s = aggregate_significance(&h).unwrap();
        assert_eq!(s.n_windows, 54);
        assert!((s.significant_share(TestKind::Wald) - 0.204).abs() < 5e-4);
        let all: Vec<_> = (0..5).map(|_| battery(1.0)).collect();
        let s = aggregate_significance(&all).unwrap();
        assert_eq!(s.share(TestKind::Lr, 4), 1.0);
        let f1 = aggregate_significance(&[battery(0.07)]).unwrap();
        assert_eq!(f1.counts_for(TestKind::F1)[0], 1);
        assert_eq!(f1.counts_for(TestKind::Wald)[4], 1);
        assert!(aggregate_significance(&[]).is_err());
    }

    #[test]
    fn zero_returns_end_at_initial_wealth() {
        let d = fridays(80);
        let p = ReturnPanel::new(d, vec!["A".into(), "B".into(), "C".into()], DMatrix::zeros(80, 3)).unwrap();
        let r = run_case_b(&p, 2, &StudyConfig::default()).unwrap();
        for path in &r.paths {
            assert_eq!(path.wealth.end_value, 100.0);
            let m = path.metrics.as_ref().unwrap();
            assert_eq!((m.mean, m.std_dev, m.max_drawdown), (0.0, 0.0, 0.0));
            assert_eq!(m.sharpe, None);
        }
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn single_asset_tracks_the_asset() {
        let d = fridays(70);
        let x: Vec<f64> = (0..70).map(|i| 0.01 * ((i * 37 % 11) as f64 - 5.0)).collect();
        let p = ReturnPanel::new(d, vec!["A".into()], DMatrix::from_column_slice(70, 1, &x)).unwrap();
        let r = run_case_b(&p, 1, &StudyConfig::default()).unwrap();
        assert_eq!(r.paths.len(), 2);
        let expected: f64 = 100.0 * x.iter().map(|v| v.exp()).product::<f64>();
        for path in &r.paths {
            assert!((path.wealth.end_value - expected).abs() < 1e-9);
        }
        for w in &r.windows {
            assert!(w.weights.iter().all(|(_, v)| (v[0] - 1.0).abs() < 1e-12));
        }
        assert!(r.aggregate.is_none());
    }
}
