//! Descriptive statistics, performance ratios, normality and mean tests,
//! static and rolling correlations.
//!
//! Statistics are computed on per-period log returns. Sharpe and Sortino use
//! a zero risk-free rate and target, and stay in per-period units. Kurtosis is
//! raw (a normal sample is near 3). Quantities that are undefined for the
//! input, such as ratios of a zero-variance series, are `None`.

use chrono::NaiveDate;

use crate::dist::{normal_two_sided, t_two_sided};
use crate::error::{Error, Result};
use crate::io::{fmt_date, fmt_num, fmt_opt, Table};
use crate::panel::ReturnPanel;

pub const DEFAULT_CVAR_CONFIDENCE: f64 = 0.95;
pub const WEEKS_PER_YEAR: f64 = 52.0;

#[derive(Debug, Clone, PartialEq)]
pub struct StatBlock {
    pub n: usize,
    pub min: f64,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std_dev: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    /// Annualized buy-and-hold return.
    pub bh_return: f64,
    pub sharpe: Option<f64>,
    pub sortino: Option<f64>,
    pub max_drawdown: f64,
    /// Expected loss beyond the `cvar_confidence` quantile, reported as a positive loss.
    pub cvar: f64,
    pub cvar_confidence: f64,
    pub t_stat: Option<f64>,
    pub t_pvalue: Option<f64>,
    pub jb_stat: Option<f64>,
    pub jb_pvalue: Option<f64>,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with n - 1 denominator.
pub fn sample_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

pub fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Central moments `m2, m3, m4` with 1/n normalization.
fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let m = mean(x);
    let n = x.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Largest peak-to-trough decline of a wealth path, as a fraction of the peak.
pub fn max_drawdown(wealth: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst: f64 = 0.0;
    for &w in wealth {
        peak = peak.max(w);
        if peak > 0.0 {
            worst = worst.max((peak - w) / peak);
        }
    }
    worst.clamp(0.0, 1.0)
}

/// Historical CVaR: mean of the worst `ceil((1 - confidence) n)` returns, as a positive loss.
pub fn historical_cvar(returns: &[f64], confidence: f64) -> f64 {
    let mut s = returns.to_vec();
    s.sort_by(f64::total_cmp);
    let k = (((1.0 - confidence) * s.len() as f64 - 1e-9).ceil() as usize).clamp(1, s.len());
    -mean(&s[..k])
}

/// Mean over the root mean square of the shortfall below zero.
pub fn sortino_ratio(returns: &[f64]) -> Option<f64> {
    let downside = (returns.iter().map(|r| r.min(0.0).powi(2)).sum::<f64>() / returns.len() as f64).sqrt();
    (downside > 0.0).then(|| mean(returns) / downside)
}

pub fn sharpe_ratio(returns: &[f64]) -> Option<f64> {
    let sd = sample_variance(returns).sqrt();
    (sd > 0.0).then(|| mean(returns) / sd)
}

pub fn describe(returns: &[f64], periods_per_year: f64) -> Result<StatBlock> {
    describe_with(returns, periods_per_year, DEFAULT_CVAR_CONFIDENCE)
}

pub fn describe_with(returns: &[f64], periods_per_year: f64, cvar_confidence: f64) -> Result<StatBlock> {
    if returns.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "descriptive statistics need at least 4 observations, got {}",
            returns.len()
        )));
    }
    if returns.iter().any(|r| !r.is_finite()) {
        return Err(Error::Parameter("returns must be finite".into()));
    }
    if !(0.0..1.0).contains(&cvar_confidence) {
        return Err(Error::Parameter(format!("CVaR confidence {cvar_confidence} not in [0, 1)")));
    }
    let n = returns.len();
    let (m2, m3, m4) = central_moments(returns);
    let std_dev = sample_variance(returns).sqrt();
    let degenerate = m2 <= f64::EPSILON * f64::EPSILON * mean(returns).abs().max(1.0);
    let mut wealth = Vec::with_capacity(n + 1);
    let mut cum = 0.0;
    wealth.push(1.0);
    for r in returns {
        cum += r;
        wealth.push(cum.exp());
    }
    let total: f64 = returns.iter().sum();
    let (t_stat, t_pvalue) = match t_test_mean_zero(returns) {
        Ok((t, p)) => (Some(t), Some(p)),
        Err(_) => (None, None),
    };
    let (jb_stat, jb_pvalue) = match jarque_bera(returns) {
        Ok((jb, p)) => (Some(jb), Some(p)),
        Err(_) => (None, None),
    };
    Ok(StatBlock {
        n,
        min: returns.iter().cloned().fold(f64::INFINITY, f64::min),
        mean: mean(returns),
        median: median(returns),
        max: returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        std_dev,
        skewness: (!degenerate).then(|| m3 / m2.powf(1.5)),
        kurtosis: (!degenerate).then(|| m4 / (m2 * m2)),
        bh_return: (total * periods_per_year / n as f64).exp_m1(),
        sharpe: if degenerate { None } else { sharpe_ratio(returns) },
        sortino: if degenerate { None } else { sortino_ratio(returns) },
        max_drawdown: max_drawdown(&wealth),
        cvar: historical_cvar(returns, cvar_confidence),
        cvar_confidence,
        t_stat,
        t_pvalue,
        jb_stat,
        jb_pvalue,
    })
}

/// One-sample two-sided t-test of a zero mean with n - 1 degrees of freedom.
pub fn t_test_mean_zero(returns: &[f64]) -> Result<(f64, f64)> {
    if returns.len() < 2 {
        return Err(Error::InsufficientData("t-test needs at least 2 observations".into()));
    }
    let var = sample_variance(returns);
    if !(var > 0.0) {
        return Err(Error::Parameter("t-test undefined for a zero-variance series".into()));
    }
    let n = returns.len() as f64;
    let t = mean(returns) / (var / n).sqrt();
    Ok((t, t_two_sided(t, n - 1.0)))
}

/// Jarque-Bera statistic `n/6 (S^2 + (K-3)^2/4)` with its chi-square(2) p-value.
pub fn jarque_bera(returns: &[f64]) -> Result<(f64, f64)> {
    if returns.len() < 4 {
        return Err(Error::InsufficientData("Jarque-Bera needs at least 4 observations".into()));
    }
    let (m2, m3, m4) = central_moments(returns);
    if !(m2 > 0.0) {
        return Err(Error::Parameter("Jarque-Bera undefined for a zero-variance series".into()));
    }
    let s = m3 / m2.powf(1.5);
    let k = m4 / (m2 * m2);
    Ok(jarque_bera_from_moments(returns.len(), s, k))
}

pub fn jarque_bera_from_moments(n: usize, skewness: f64, kurtosis: f64) -> (f64, f64) {
    let jb = (n as f64 / 6.0) * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0);
    // chi-square with 2 degrees of freedom has survival exp(-x/2)
    (jb, (-jb / 2.0).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
    Kendall,
}

impl CorrelationMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pearson => "pearson",
            Self::Spearman => "spearman",
            Self::Kendall => "kendall",
        }
    }

    pub fn all() -> [CorrelationMethod; 3] {
        [Self::Pearson, Self::Spearman, Self::Kendall]
    }
}

impl std::str::FromStr for CorrelationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" => Ok(Self::Pearson),
            "spearman" => Ok(Self::Spearman),
            "kendall" => Ok(Self::Kendall),
            other => Err(Error::Parameter(format!("unknown correlation method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub method: CorrelationMethod,
    pub assets: Vec<String>,
    pub coefficients: Vec<Vec<Option<f64>>>,
    pub p_values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.coefficients[i][j]
    }

    /// Long format: one row per ordered pair.
    pub fn table(&self) -> Table {
        let mut t = Table::new(["asset_x", "asset_y", "coefficient", "p_value"]);
        for (i, a) in self.assets.iter().enumerate() {
            for (j, b) in self.assets.iter().enumerate() {
                t.push(vec![
                    a.clone(),
                    b.clone(),
                    fmt_opt(self.coefficients[i][j]),
                    fmt_opt(self.p_values[i][j]),
                ]);
            }
        }
        t
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

fn tie_groups(x: &[f64]) -> Vec<usize> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        if j > i {
            groups.push(j - i + 1);
        }
        i = j + 1;
    }
    groups
}

/// Kendall tau-b and the concordant-minus-discordant count `S`.
fn kendall_parts(x: &[f64], y: &[f64]) -> (Option<f64>, f64) {
    let n = x.len();
    let (mut s, mut tx, mut ty) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut pairs = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1.0;
            let dx = (x[i] - x[j]).partial_cmp(&0.0).map_or(0, |o| o as i32);
            let dy = (y[i] - y[j]).partial_cmp(&0.0).map_or(0, |o| o as i32);
            if dx == 0 {
                tx += 1.0;
            }
            if dy == 0 {
                ty += 1.0;
            }
            s += (dx * dy) as f64;
        }
    }
    let denom = ((pairs - tx) * (pairs - ty)).sqrt();
    let tau = (denom > 0.0).then(|| (s / denom).clamp(-1.0, 1.0));
    (tau, s)
}

pub fn kendall(x: &[f64], y: &[f64]) -> Option<f64> {
    kendall_parts(x, y).0
}

/// Number of permutations of `n` items with exactly `k` inversions, for all `k`.
fn inversion_counts(n: usize) -> Vec<f64> {
    let mut counts = vec![1.0];
    for m in 2..=n {
        let max = counts.len() - 1 + (m - 1);
        let mut next = vec![0.0; max + 1];
        for (k, &c) in counts.iter().enumerate() {
            for add in 0..m {
                next[k + add] += c;
            }
        }
        counts = next;
    }
    counts
}

fn kendall_p_value(x: &[f64], y: &[f64], s: f64) -> f64 {
    let n = x.len();
    let tx = tie_groups(x);
    let ty = tie_groups(y);
    if n <= 10 && tx.is_empty() && ty.is_empty() {
        // Exact permutation distribution of S = pairs - 2 * inversions.
        let counts = inversion_counts(n);
        let total: f64 = counts.iter().sum();
        let pairs = (n * (n - 1) / 2) as f64;
        let tail: f64 = counts
            .iter()
            .enumerate()
            .filter(|(k, _)| (pairs - 2.0 * *k as f64).abs() >= s.abs() - 1e-9)
            .map(|(_, c)| c)
            .sum();
        return (tail / total).clamp(0.0, 1.0);
    }
    let nf = n as f64;
    let sum = |g: &[usize], f: &dyn Fn(f64) -> f64| g.iter().map(|&t| f(t as f64)).sum::<f64>();
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt = sum(&tx, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&ty, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let v1 = sum(&tx, &|t| t * (t - 1.0)) * sum(&ty, &|t| t * (t - 1.0)) / (2.0 * nf * (nf - 1.0));
    let v2 = sum(&tx, &|t| t * (t - 1.0) * (t - 2.0)) * sum(&ty, &|t| t * (t - 1.0) * (t - 2.0))
        / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    let var = (v0 - vt - vu) / 18.0 + v1 + v2;
    if var <= 0.0 {
        return 1.0;
    }
    normal_two_sided(s / var.sqrt())
}

/// Coefficient and two-sided p-value for one pair.
pub fn correlation_test(x: &[f64], y: &[f64], method: CorrelationMethod) -> (Option<f64>, Option<f64>) {
    let n = x.len() as f64;
    let t_p = |r: f64| {
        if r.abs() >= 1.0 {
            0.0
        } else {
            t_two_sided(r * ((n - 2.0) / (1.0 - r * r)).sqrt(), n - 2.0)
        }
    };
    match method {
        CorrelationMethod::Pearson => {
            let r = pearson(x, y);
            (r, r.map(t_p))
        }
        CorrelationMethod::Spearman => {
            let r = spearman(x, y);
            (r, r.map(t_p))
        }
        CorrelationMethod::Kendall => {
            let (tau, s) = kendall_parts(x, y);
            (tau, tau.map(|_| kendall_p_value(x, y, s)))
        }
    }
}

pub fn correlation_matrix(panel: &ReturnPanel, method: CorrelationMethod) -> Result<CorrelationMatrix> {
    if panel.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "correlations need at least 3 observations, got {}",
            panel.len()
        )));
    }
    let k = panel.n_assets();
    let cols: Vec<Vec<f64>> = (0..k).map(|c| panel.column(c).iter().cloned().collect()).collect();
    let mut coefficients = vec![vec![None; k]; k];
    let mut p_values = vec![vec![None; k]; k];
    for i in 0..k {
        let constant = cols[i].iter().all(|&v| v == cols[i][0]);
        if !constant {
            coefficients[i][i] = Some(1.0);
            p_values[i][i] = Some(0.0);
        }
        for j in i + 1..k {
            let (r, p) = correlation_test(&cols[i], &cols[j], method);
            coefficients[i][j] = r;
            coefficients[j][i] = r;
            p_values[i][j] = p;
            p_values[j][i] = p;
        }
    }
    Ok(CorrelationMatrix {
        method,
        assets: panel.assets().to_vec(),
        coefficients,
        p_values,
    })
}

/// Standard error band `sqrt(1 / (n - 1))` of a sample correlation near zero.
pub fn correlation_error_band(window: usize) -> Result<f64> {
    if window < 2 {
        return Err(Error::Parameter("error band needs a window of at least 2".into()));
    }
    Ok((1.0 / (window as f64 - 1.0)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingCorrelation {
    pub window: usize,
    /// `rho[i]` covers observations `i ..= i + window - 1`.
    pub rho: Vec<Option<f64>>,
    pub sigma: f64,
}

impl RollingCorrelation {
    /// `dates` are the dates of the input series; each row is stamped with its window's last date.
    pub fn table(&self, dates: &[NaiveDate]) -> Table {
        let mut t = Table::new(["date", "rho", "band_lo", "band_hi"]);
        for (i, r) in self.rho.iter().enumerate() {
            t.push(vec![
                fmt_date(dates[i + self.window - 1]),
                fmt_opt(*r),
                fmt_num(-self.sigma),
                fmt_num(self.sigma),
            ]);
        }
        t
    }
}

pub fn rolling_correlation(x: &[f64], y: &[f64], window: usize) -> Result<RollingCorrelation> {
    if window < 3 {
        return Err(Error::Parameter("rolling correlation needs a window of at least 3".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Dimension("series differ in length".into()));
    }
    if x.len() < window {
        return Err(Error::InsufficientData(format!(
            "series of length {} shorter than window {window}",
            x.len()
        )));
    }
    let rho = (0..=x.len() - window)
        .map(|i| pearson(&x[i..i + window], &y[i..i + window]))
        .collect();
    Ok(RollingCorrelation {
        window,
        rho,
        sigma: correlation_error_band(window)?,
    })
}

pub fn stats_table(assets: &[String], blocks: &[StatBlock]) -> Table {
    let mut t = Table::new([
        "asset",
        "n",
        "min",
        "mean",
        "median",
        "max",
        "std_dev",
        "skewness",
        "kurtosis",
        "bh_return",
        "sharpe",
        "sortino",
        "max_drawdown",
        "cvar",
        "t_stat",
        "t_pvalue",
        "jb_stat",
        "jb_pvalue",
    ]);
    for (a, b) in assets.iter().zip(blocks) {
        t.push(vec![
            a.clone(),
            b.n.to_string(),
            fmt_num(b.min),
            fmt_num(b.mean),
            fmt_num(b.median),
            fmt_num(b.max),
            fmt_num(b.std_dev),
            fmt_opt(b.skewness),
            fmt_opt(b.kurtosis),
            fmt_num(b.bh_return),
            fmt_opt(b.sharpe),
            fmt_opt(b.sortino),
            fmt_num(b.max_drawdown),
            fmt_num(b.cvar),
            fmt_opt(b.t_stat),
            fmt_opt(b.t_pvalue),
            fmt_opt(b.jb_stat),
            fmt_opt(b.jb_pvalue),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_returns_are_degenerate() {
        let b = describe(&[0.0; 10], 52.0).unwrap();
        assert_eq!(b.mean, 0.0);
        assert_eq!(b.std_dev, 0.0);
        assert_eq!(b.sharpe, None);
        assert_eq!(b.sortino, None);
        assert_eq!(b.jb_stat, None);
        assert_eq!(b.t_stat, None);
        assert_eq!(b.max_drawdown, 0.0);
        assert!(describe(&[0.0; 3], 52.0).is_err());
    }

    #[test]
    fn drawdown_of_hand_path() {
        assert_eq!(max_drawdown(&[100.0, 50.0, 75.0]), 0.5);
        assert_eq!(max_drawdown(&[1.0, 1.0, 2.0, 3.0]), 0.0);
        // The same path from log returns.
        let r = [(0.5_f64).ln(), (1.5_f64).ln(), 0.0, 0.0];
        let b = describe(&r, 52.0).unwrap();
        assert!((b.max_drawdown - 0.5).abs() < 1e-12);
    }

    #[test]
    fn t_test_examples() {
        let (t, p) = t_test_mean_zero(&[-0.1, 0.1, -0.1, 0.1]).unwrap();
        assert_eq!(t, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        assert!(t_test_mean_zero(&[1.0; 4]).is_err());
    }

    #[test]
    fn t_test_jittered_ones() {
        // mean 1.0025, sample sd 0.00645, t ~ 310.8 on 3 dof: p ~ 7.3e-8
        let x = [1.0, 1.01, 0.995, 1.005];
        let (t, p) = t_test_mean_zero(&x).unwrap();
        let m = 1.0025;
        let s = ((0.0025f64.powi(2) + 0.0075f64.powi(2) + 0.0075f64.powi(2) + 0.0025f64.powi(2)) / 3.0).sqrt();
        assert!((t - m / (s / 2.0)).abs() < 1e-9);
        assert!(p < 0.01);
    }

    #[test]
    fn jarque_bera_normal_moments() {
        let (jb, p) = jarque_bera_from_moments(100, 0.0, 3.0);
        assert_eq!(jb, 0.0);
        assert_eq!(p, 1.0);
        assert!(jarque_bera(&[1.0; 5]).is_err());
    }

    #[test]
    fn cvar_is_mean_of_tail() {
        let r: Vec<f64> = (1..=20).map(|i| i as f64 / 100.0 - 0.1).collect();
        // worst ceil(0.05 * 20) = 1 observation: -0.09
        assert!((historical_cvar(&r, 0.95) - 0.09).abs() < 1e-15);
        // worst 2 at 90%
        assert!((historical_cvar(&r, 0.90) - 0.085).abs() < 1e-15);
    }

    #[test]
    fn bh_return_annualizes_log_sum() {
        let r = vec![0.01; 52];
        let b = describe(&r, 52.0).unwrap();
        assert!((b.bh_return - (0.52_f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 4.0, 3.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        for m in CorrelationMethod::all() {
            let (r, p) = correlation_test(&x, &y, m);
            assert!((r.unwrap() + 1.0).abs() < 1e-12, "{m:?}");
            assert!(p.unwrap() < 0.05 || m == CorrelationMethod::Kendall);
        }
        assert_eq!(pearson(&x, &[1.0; 5]), None);
    }

    #[test]
    fn kendall_exact_small_sample() {
        // n = 4, perfect order: S = 6, only 1 of 24 permutations reaches |S| >= 6 on each side.
        let x = [1.0, 2.0, 3.0, 4.0];
        let (tau, p) = correlation_test(&x, &x, CorrelationMethod::Kendall);
        assert_eq!(tau, Some(1.0));
        assert!((p.unwrap() - 2.0 / 24.0).abs() < 1e-15);
        assert_eq!(inversion_counts(3), vec![1.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn average_ranks_share_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn error_band_examples() {
        assert!((correlation_error_band(10).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(correlation_error_band(2).unwrap(), 1.0);
        assert!(correlation_error_band(1).is_err());
    }

    #[test]
    fn rolling_self_correlation_is_one() {
        let x: Vec<f64> = (0..30).map(|i| ((i * 7919) % 31) as f64).collect();
        let rc = rolling_correlation(&x, &x, 10).unwrap();
        assert_eq!(rc.rho.len(), 21);
        assert!(rc.rho.iter().all(|r| (r.unwrap() - 1.0).abs() < 1e-12));
        let full = rolling_correlation(&x, &x.iter().map(|v| v * v).collect::<Vec<_>>(), 30).unwrap();
        let stat = pearson(&x, &x.iter().map(|v| v * v).collect::<Vec<_>>()).unwrap();
        assert!((full.rho[0].unwrap() - stat).abs() < 1e-12);
        assert!(rolling_correlation(&x, &x, 2).is_err());
    }
}
