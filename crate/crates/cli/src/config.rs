//! TOML run configuration.
//!
//! Relative paths in the file resolve against the file's directory; paths
//! given on the command line resolve against the working directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use serde::Deserialize;

use cryptodiv::backtest::{Case, StudyConfig, DEFAULT_INITIAL_WEALTH, DEFAULT_WINDOW_MONTHS};
use cryptodiv::frontier::{Constraint, DEFAULT_FRONTIER_POINTS};
use cryptodiv::spanning::{SpanningConfig, DEFAULT_LEVEL, DEFAULT_XI1, DEFAULT_XI2};
use cryptodiv::txcost::{CostModel, SWEEP_BUDGETS_BP};

pub const DEFAULT_ROLLING_CORRELATION_WINDOW: usize = 10;
pub const DEFAULT_SEED: u64 = 20190531;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub data: DataConfig,
    pub universe: Option<UniverseConfig>,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub spanning: SpanningSection,
    pub cost: Option<CostModel>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Benchmark price panel.
    pub benchmarks: Option<PathBuf>,
    /// Columns of the benchmark file treated as test assets.
    #[serde(default)]
    pub test_columns: Vec<String>,
    /// Coin panel pair `<coins>_price.csv` / `<coins>_mcap.csv`.
    pub coins: Option<PathBuf>,
    #[serde(default = "default_index_id")]
    pub index_id: String,
    /// Resample every panel to a Friday grid before use.
    #[serde(default)]
    pub align_weekly: bool,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct UniverseConfig {
    pub reference_date: Option<NaiveDate>,
    /// Empty means every coin in the panel.
    #[serde(default)]
    pub coins: Vec<String>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub case: Case,
    pub window_months: usize,
    pub constraint: Constraint,
    pub frontier_points: usize,
    pub initial_wealth: f64,
    pub rolling_correlation_window: usize,
    pub budgets_bp: Vec<f64>,
}

impl Default for StudySection {
    fn default() -> Self {
        Self {
            case: Case::B,
            window_months: DEFAULT_WINDOW_MONTHS,
            constraint: Constraint::Unconstrained,
            frontier_points: DEFAULT_FRONTIER_POINTS,
            initial_wealth: DEFAULT_INITIAL_WEALTH,
            rolling_correlation_window: DEFAULT_ROLLING_CORRELATION_WINDOW,
            budgets_bp: SWEEP_BUDGETS_BP.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SpanningSection {
    pub xi1: f64,
    pub xi2: f64,
    pub level: f64,
    pub hac_lags: Option<usize>,
}

impl Default for SpanningSection {
    fn default() -> Self {
        Self {
            xi1: DEFAULT_XI1,
            xi2: DEFAULT_XI2,
            level: DEFAULT_LEVEL,
            hac_lags: None,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_index_id() -> String {
    "EWCI".into()
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: default_output_dir(),
            seed: DEFAULT_SEED,
            data: DataConfig::default(),
            universe: None,
            study: StudySection::default(),
            spanning: SpanningSection::default(),
            cost: None,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads `path` and resolves every relative path against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = std::path::absolute(path)?
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        cfg.resolve(&base)?;
        Ok(cfg)
    }

    pub fn resolve(&mut self, base: &Path) -> Result<()> {
        let fix = |p: &mut PathBuf| -> Result<()> {
            if p.is_relative() {
                *p = std::path::absolute(base.join(&*p))?;
            }
            Ok(())
        };
        fix(&mut self.output_dir)?;
        if let Some(p) = self.data.benchmarks.as_mut() {
            fix(p)?;
        }
        if let Some(p) = self.data.coins.as_mut() {
            fix(p)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.cost {
            c.validate()?;
        }
        let s = &self.study;
        if s.window_months == 0 {
            bail!("study.window_months must be positive");
        }
        if s.frontier_points == 0 {
            bail!("study.frontier_points must be positive");
        }
        if s.rolling_correlation_window < 3 {
            bail!("study.rolling_correlation_window must be at least 3");
        }
        if !(s.initial_wealth > 0.0) {
            bail!("study.initial_wealth must be positive");
        }
        let sp = &self.spanning;
        for (name, v) in [("xi1", sp.xi1), ("xi2", sp.xi2), ("level", sp.level)] {
            if !(v > 0.0 && v < 1.0) {
                bail!("spanning.{name} must lie in (0, 1)");
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.data.test_columns {
            if !seen.insert(c) {
                bail!("data.test_columns lists `{c}` twice");
            }
        }
        Ok(())
    }

    pub fn study_config(&self) -> StudyConfig {
        StudyConfig {
            case: self.study.case,
            window_months: self.study.window_months,
            constraint: self.study.constraint,
            cost: self.cost,
            spanning: self.spanning_config(),
            initial_wealth: self.study.initial_wealth,
            frontier_points: self.study.frontier_points,
        }
    }

    pub fn spanning_config(&self) -> SpanningConfig {
        SpanningConfig {
            xi1: self.spanning.xi1,
            xi2: self.spanning.xi2,
            level: self.spanning.level,
            hac_lags: self.spanning.hac_lags,
        }
    }

    /// Input files the configured commands will read.
    pub fn input_files(&self) -> Vec<PathBuf> {
        let mut out = Vec::new();
        if let Some(b) = &self.data.benchmarks {
            out.push(b.clone());
        }
        if let Some(c) = &self.data.coins {
            let (p, m) = cryptodiv::panel::coin_paths(c);
            out.push(p);
            out.push(m);
        }
        out
    }
}
