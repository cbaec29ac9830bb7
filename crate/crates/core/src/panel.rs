//! Price panels, weekly alignment and log returns.
//!
//! A panel is a date-indexed matrix with one column per asset identifier and
//! an explicit missing marker per cell. Panels are validated on construction:
//! dates strictly increase, identifiers are unique, present prices are finite
//! and positive, and market caps (coin panels only) are finite and
//! non-negative. Missing cells are recorded, never filled here.

use std::collections::HashSet;
use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelKind {
    Benchmark,
    Coin,
}

/// Dense dates x assets grid of optional observations, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Option<f64>>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<Option<f64>>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "grid of {rows}x{cols} needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn from_rows(rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Option<f64>) {
        self.cells[row * self.cols + col] = value;
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        (0..self.rows).map(move |r| self.get(r, col))
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    values: Grid,
    kind: PanelKind,
    market_caps: Option<Grid>,
}

impl PricePanel {
    pub fn new(
        dates: Vec<NaiveDate>,
        assets: Vec<String>,
        values: Grid,
        kind: PanelKind,
    ) -> Result<Self> {
        let panel = Self {
            dates,
            assets,
            values,
            kind,
            market_caps: None,
        };
        panel.validate()?;
        Ok(panel)
    }

    /// Coin panel with a parallel market-cap grid on the same date/asset layout.
    pub fn coins(
        dates: Vec<NaiveDate>,
        assets: Vec<String>,
        prices: Grid,
        market_caps: Grid,
    ) -> Result<Self> {
        let panel = Self {
            dates,
            assets,
            values: prices,
            kind: PanelKind::Coin,
            market_caps: Some(market_caps),
        };
        panel.validate()?;
        Ok(panel)
    }

    fn validate(&self) -> Result<()> {
        if self.values.rows() != self.dates.len() || self.values.cols() != self.assets.len() {
            return Err(Error::Dimension(format!(
                "{} dates x {} assets but grid is {}x{}",
                self.dates.len(),
                self.assets.len(),
                self.values.rows(),
                self.values.cols()
            )));
        }
        validate_dates(&self.dates)?;
        validate_assets(&self.assets)?;
        for t in 0..self.values.rows() {
            for (i, asset) in self.assets.iter().enumerate() {
                if let Some(v) = self.values.get(t, i) {
                    if !v.is_finite() || v <= 0.0 {
                        return Err(Error::Panel {
                            row: Some(t),
                            column: Some(asset.clone()),
                            message: format!("price must be finite and positive, got {v}"),
                        });
                    }
                }
            }
        }
        match (&self.kind, &self.market_caps) {
            (PanelKind::Coin, Some(caps)) => {
                if caps.rows() != self.values.rows() || caps.cols() != self.values.cols() {
                    return Err(Error::Dimension(
                        "market-cap grid does not match the price grid".into(),
                    ));
                }
                for t in 0..caps.rows() {
                    for (i, asset) in self.assets.iter().enumerate() {
                        if let Some(v) = caps.get(t, i) {
                            if !v.is_finite() || v < 0.0 {
                                return Err(Error::Panel {
                                    row: Some(t),
                                    column: Some(asset.clone()),
                                    message: format!(
                                        "market cap must be finite and non-negative, got {v}"
                                    ),
                                });
                            }
                        }
                    }
                }
            }
            (PanelKind::Coin, None) => {
                return Err(Error::Contract("coin panels carry market caps".into()))
            }
            (PanelKind::Benchmark, Some(_)) => {
                return Err(Error::Contract("benchmark panels carry no market caps".into()))
            }
            (PanelKind::Benchmark, None) => {}
        }
        Ok(())
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn kind(&self) -> PanelKind {
        self.kind
    }

    pub fn values(&self) -> &Grid {
        &self.values
    }

    pub fn market_caps(&self) -> Option<&Grid> {
        self.market_caps.as_ref()
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn price(&self, row: usize, col: usize) -> Option<f64> {
        self.values.get(row, col)
    }

    pub fn market_cap(&self, row: usize, col: usize) -> Option<f64> {
        self.market_caps.as_ref().and_then(|m| m.get(row, col))
    }

    pub fn asset_index(&self, id: &str) -> Option<usize> {
        self.assets.iter().position(|a| a == id)
    }

    /// Fails with the first missing cell; benchmark panels must be complete after alignment.
    pub fn require_complete(&self) -> Result<()> {
        for t in 0..self.len() {
            for (i, asset) in self.assets.iter().enumerate() {
                if self.values.get(t, i).is_none() {
                    return Err(Error::Panel {
                        row: Some(t),
                        column: Some(asset.clone()),
                        message: format!("missing observation on {}", self.dates[t]),
                    });
                }
            }
        }
        Ok(())
    }

    /// Appends the columns of `other`, which must share the date grid.
    pub fn hstack(&self, other: &PricePanel) -> Result<PricePanel> {
        if self.dates != other.dates {
            return Err(Error::Dimension("panels do not share a date grid".into()));
        }
        if self.market_caps.is_some() || other.market_caps.is_some() {
            return Err(Error::Contract("only price-only panels can be stacked".into()));
        }
        let cols = self.assets.len() + other.assets.len();
        let mut cells = Vec::with_capacity(self.len() * cols);
        for t in 0..self.len() {
            cells.extend((0..self.assets.len()).map(|i| self.values.get(t, i)));
            cells.extend((0..other.assets.len()).map(|i| other.values.get(t, i)));
        }
        let mut assets = self.assets.clone();
        assets.extend(other.assets.iter().cloned());
        PricePanel::new(
            self.dates.clone(),
            assets,
            Grid::new(self.len(), cols, cells)?,
            PanelKind::Benchmark,
        )
    }

    /// Keeps the rows whose date lies in `[from, to]`.
    pub fn slice_dates(&self, from: NaiveDate, to: NaiveDate) -> Result<PricePanel> {
        let rows: Vec<usize> = (0..self.len())
            .filter(|&t| self.dates[t] >= from && self.dates[t] <= to)
            .collect();
        let pick = |g: &Grid| {
            let cells = rows
                .iter()
                .flat_map(|&t| (0..g.cols()).map(move |i| g.get(t, i)))
                .collect();
            Grid::new(rows.len(), g.cols(), cells)
        };
        Ok(PricePanel {
            dates: rows.iter().map(|&t| self.dates[t]).collect(),
            assets: self.assets.clone(),
            values: pick(&self.values)?,
            kind: self.kind,
            market_caps: self.market_caps.as_ref().map(pick).transpose()?,
        })
    }
}

fn validate_dates(dates: &[NaiveDate]) -> Result<()> {
    for (t, pair) in dates.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(Error::Panel {
                row: Some(t + 1),
                column: Some("date".into()),
                message: format!("non-monotone dates: {} follows {}", pair[1], pair[0]),
            });
        }
    }
    Ok(())
}

fn validate_assets(assets: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for a in assets {
        if a.is_empty() {
            return Err(Error::Panel {
                row: None,
                column: None,
                message: "empty asset identifier".into(),
            });
        }
        if !seen.insert(a.as_str()) {
            return Err(Error::Panel {
                row: None,
                column: Some(a.clone()),
                message: "duplicate asset identifier".into(),
            });
        }
    }
    Ok(())
}

/// Log returns on a complete panel; row `t` holds `ln(P[t+1] / P[t])` dated at `t+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    values: DMatrix<f64>,
}

impl ReturnPanel {
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != dates.len() || values.ncols() != assets.len() {
            return Err(Error::Dimension(format!(
                "{} dates x {} assets but matrix is {}x{}",
                dates.len(),
                assets.len(),
                values.nrows(),
                values.ncols()
            )));
        }
        validate_dates(&dates)?;
        validate_assets(&assets)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Panel {
                row: None,
                column: None,
                message: "returns must be finite".into(),
            });
        }
        Ok(Self {
            dates,
            assets,
            values,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn column(&self, col: usize) -> DVector<f64> {
        self.values.column(col).into_owned()
    }

    pub fn column_by_id(&self, id: &str) -> Option<DVector<f64>> {
        self.assets.iter().position(|a| a == id).map(|c| self.column(c))
    }

    /// Rows `[start, end)`.
    pub fn rows(&self, start: usize, end: usize) -> ReturnPanel {
        ReturnPanel {
            dates: self.dates[start..end].to_vec(),
            assets: self.assets.clone(),
            values: self.values.rows(start, end - start).into_owned(),
        }
    }

    /// Columns in the given order.
    pub fn select(&self, cols: &[usize]) -> ReturnPanel {
        ReturnPanel {
            dates: self.dates.clone(),
            assets: cols.iter().map(|&c| self.assets[c].clone()).collect(),
            values: self.values.select_columns(cols),
        }
    }

    /// `exp(r) - 1` per cell.
    pub fn simple_returns(&self) -> DMatrix<f64> {
        self.values.map(f64::exp_m1)
    }
}

pub fn to_log_returns(panel: &PricePanel) -> Result<ReturnPanel> {
    if panel.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "log returns need at least 2 dates, got {}",
            panel.len()
        )));
    }
    panel.require_complete()?;
    let t = panel.len() - 1;
    let n = panel.assets().len();
    let values = DMatrix::from_fn(t, n, |row, col| {
        // Completeness and positivity were validated above.
        let p0 = panel.price(row, col).unwrap_or(f64::NAN);
        let p1 = panel.price(row + 1, col).unwrap_or(f64::NAN);
        (p1 / p0).ln()
    });
    ReturnPanel::new(panel.dates()[1..].to_vec(), panel.assets().to_vec(), values)
}

/// Fridays covering `[start, end]`: the first Friday on or after `start` through the last on or before `end`.
pub fn weekly_grid(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    let offset = (Weekday::Fri.num_days_from_monday() as i64
        - start.weekday().num_days_from_monday() as i64)
        .rem_euclid(7);
    let mut day = start + Duration::days(offset);
    let mut out = Vec::new();
    while day <= end {
        out.push(day);
        day += Duration::days(7);
    }
    out
}

/// Samples each cell at the last observation inside `(previous grid date, grid date]`.
///
/// A grid week without an observation stays missing. Benchmark panels must be
/// complete after alignment, so a missing benchmark cell is an error.
pub fn align_weekly(panel: &PricePanel, grid: &[NaiveDate]) -> Result<PricePanel> {
    validate_dates(grid)?;
    let n = panel.assets().len();
    let mut prices = Vec::with_capacity(grid.len() * n);
    let mut caps = Vec::with_capacity(grid.len() * n);
    let mut cursor = 0usize;
    let dates = panel.dates();
    for (g, &day) in grid.iter().enumerate() {
        let lower = if g == 0 { None } else { Some(grid[g - 1]) };
        while cursor < dates.len() && lower.is_some_and(|lo| dates[cursor] <= lo) {
            cursor += 1;
        }
        let mut end = cursor;
        while end < dates.len() && dates[end] <= day {
            end += 1;
        }
        let rows = if g == 0 {
            // Only the same week counts for the first grid date.
            let week_start = day - Duration::days(6);
            (0..end).filter(|&r| dates[r] >= week_start).collect::<Vec<_>>()
        } else {
            (cursor..end).collect::<Vec<_>>()
        };
        for i in 0..n {
            let last = |grid: Option<&Grid>| {
                rows.iter()
                    .rev()
                    .find_map(|&r| grid.and_then(|gr| gr.get(r, i)))
            };
            prices.push(last(Some(panel.values())));
            caps.push(last(panel.market_caps()));
        }
        cursor = end;
    }
    let values = Grid::new(grid.len(), n, prices)?;
    let aligned = match panel.kind() {
        PanelKind::Benchmark => {
            PricePanel::new(grid.to_vec(), panel.assets().to_vec(), values, PanelKind::Benchmark)?
        }
        PanelKind::Coin => PricePanel::coins(
            grid.to_vec(),
            panel.assets().to_vec(),
            values,
            Grid::new(grid.len(), n, caps)?,
        )?,
    };
    if aligned.kind() == PanelKind::Benchmark {
        aligned.require_complete()?;
    }
    Ok(aligned)
}

/// Loads a panel under the CSV contract: a `date` column (YYYY-MM-DD) followed by one
/// column per asset, empty cells missing.
///
/// Benchmark panels are read from `path`. For coin panels `path` names the pair
/// `<path>_price.csv` / `<path>_mcap.csv`; a path ending in `_price.csv` is accepted too.
pub fn load_panel(path: &Path, kind: PanelKind) -> Result<PricePanel> {
    match kind {
        PanelKind::Benchmark => {
            let (dates, assets, grid) = read_grid(path)?;
            PricePanel::new(dates, assets, grid, PanelKind::Benchmark).map_err(|e| at(path, e))
        }
        PanelKind::Coin => {
            let (price_path, mcap_path) = coin_paths(path);
            let (dates, assets, prices) = read_grid(&price_path)?;
            let (mdates, massets, caps) = read_grid(&mcap_path)?;
            if dates != mdates || assets != massets {
                return Err(Error::Load {
                    path: mcap_path,
                    message: "date/asset grid differs from the price file".into(),
                });
            }
            PricePanel::coins(dates, assets, prices, caps).map_err(|e| at(&price_path, e))
        }
    }
}

pub fn coin_paths(path: &Path) -> (PathBuf, PathBuf) {
    let s = path.to_string_lossy();
    let stem = s
        .strip_suffix("_price.csv")
        .or_else(|| s.strip_suffix("_mcap.csv"))
        .unwrap_or(&s)
        .to_string();
    (
        PathBuf::from(format!("{stem}_price.csv")),
        PathBuf::from(format!("{stem}_mcap.csv")),
    )
}

fn at(path: &Path, e: Error) -> Error {
    Error::Load {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read_grid(path: &Path) -> Result<(Vec<NaiveDate>, Vec<String>, Grid)> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let load_err = |message: String| Error::Load {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader.headers().map_err(|e| load_err(format!("malformed header: {e}")))?;
    if header.get(0) != Some("date") {
        return Err(load_err("malformed header: first column must be `date`".into()));
    }
    let assets: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    validate_assets(&assets).map_err(|e| load_err(format!("malformed header: {e}")))?;
    let mut dates = Vec::new();
    let mut cells = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| load_err(format!("row {}: {e}", row + 1)))?;
        if record.len() != assets.len() + 1 {
            return Err(load_err(format!(
                "row {}: expected {} fields, got {}",
                row + 1,
                assets.len() + 1,
                record.len()
            )));
        }
        let date = NaiveDate::parse_from_str(&record[0], DATE_FORMAT)
            .map_err(|e| load_err(format!("row {}, column date: {e}", row + 1)))?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(load_err(format!(
                    "row {}, column date: non-monotone dates ({date} follows {prev})",
                    row + 1
                )));
            }
        }
        dates.push(date);
        for (i, field) in record.iter().skip(1).enumerate() {
            if field.is_empty() {
                cells.push(None);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                load_err(format!(
                    "row {}, column {}: cannot parse `{field}`",
                    row + 1,
                    assets[i]
                ))
            })?;
            if v < 0.0 {
                return Err(load_err(format!(
                    "row {}, column {}: negative value {v}",
                    row + 1,
                    assets[i]
                )));
            }
            cells.push(Some(v));
        }
    }
    let n = dates.len();
    Ok((dates, assets, Grid::new(n, cells.len().checked_div(n).unwrap_or(0), cells)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DATE_FORMAT).unwrap()
    }

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    fn bench(prices: &[&[f64]]) -> PricePanel {
        let dates: Vec<_> = (0..prices.len())
            .map(|t| d("2020-01-03") + Duration::days(7 * t as i64))
            .collect();
        let cols = prices[0].len();
        let grid = Grid::from_rows(
            prices
                .iter()
                .map(|r| r.iter().map(|&v| Some(v)).collect())
                .collect(),
        )
        .unwrap();
        PricePanel::new(
            dates,
            (0..cols).map(|i| format!("A{i}")).collect(),
            grid,
            PanelKind::Benchmark,
        )
        .unwrap()
    }

    #[test]
    fn loads_well_formed_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "b.csv",
            "date,STO,BND\n2020-01-03,100,50\n2020-01-10,101,50.5\n2020-01-17,99,51\n",
        );
        let panel = load_panel(&p, PanelKind::Benchmark).unwrap();
        assert_eq!(panel.len(), 3);
        assert_eq!(panel.assets(), ["STO", "BND"]);
        assert_eq!(panel.price(2, 1), Some(51.0));
    }

    #[test]
    fn rejects_out_of_order_dates() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "b.csv",
            "date,STO\n2020-01-10,100\n2020-01-03,101\n",
        );
        let err = load_panel(&p, PanelKind::Benchmark).unwrap_err().to_string();
        assert!(err.contains("non-monotone dates"), "{err}");
        assert!(err.contains("row 2"), "{err}");
    }

    #[test]
    fn rejects_negative_price_naming_cell() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "b.csv", "date,STO,BND\n2020-01-03,100,-5\n");
        let err = load_panel(&p, PanelKind::Benchmark).unwrap_err().to_string();
        assert!(err.contains("row 1, column BND"), "{err}");
    }

    #[test]
    fn rejects_malformed_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "b.csv", "day,STO\n2020-01-03,100\n");
        let err = load_panel(&p, PanelKind::Benchmark).unwrap_err().to_string();
        assert!(err.contains("malformed header"), "{err}");
        let p = write(dir.path(), "c.csv", "date,STO,STO\n2020-01-03,100,1\n");
        assert!(load_panel(&p, PanelKind::Benchmark).is_err());
    }

    #[test]
    fn coin_panel_records_missing_cells() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "coins_price.csv",
            "date,BTC,LTC\n2014-01-03,800,\n2014-01-10,820,20\n",
        );
        write(
            dir.path(),
            "coins_mcap.csv",
            "date,BTC,LTC\n2014-01-03,1e10,\n2014-01-10,1.1e10,5e8\n",
        );
        let panel = load_panel(&dir.path().join("coins"), PanelKind::Coin).unwrap();
        assert_eq!(panel.price(0, 1), None);
        assert_eq!(panel.market_cap(0, 1), None);
        assert_eq!(panel.market_cap(1, 1), Some(5e8));
    }

    #[test]
    fn missing_mcap_file_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "coins_price.csv", "date,BTC\n2014-01-03,800\n");
        let err = load_panel(&dir.path().join("coins"), PanelKind::Coin)
            .unwrap_err()
            .to_string();
        assert!(err.contains("coins_mcap.csv"), "{err}");
    }

    #[test]
    fn log_return_examples() {
        let r = to_log_returns(&bench(&[&[100.0], &[100.0]])).unwrap();
        assert_eq!(r.values()[(0, 0)], 0.0);

        let e = std::f64::consts::E;
        let r = to_log_returns(&bench(&[&[100.0], &[100.0 * e]])).unwrap();
        assert!((r.values()[(0, 0)] - 1.0).abs() < 1e-15);

        let r = to_log_returns(&bench(&[&[100.0], &[110.0], &[99.0]])).unwrap();
        assert!((r.values()[(0, 0)] - 0.09531017980432493).abs() < 1e-12);
        assert!((r.values()[(1, 0)] + 0.10536051565782628).abs() < 1e-12);
        assert_eq!(r.dates()[0], d("2020-01-10"));
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn log_returns_reject_missing_cells() {
        let grid = Grid::from_rows(vec![vec![Some(1.0)], vec![None]]).unwrap();
        let panel = PricePanel::new(
            vec![d("2020-01-03"), d("2020-01-10")],
            vec!["A".into()],
            grid,
            PanelKind::Benchmark,
        )
        .unwrap();
        assert!(to_log_returns(&panel).is_err());
        assert!(to_log_returns(&bench(&[&[1.0]])).is_err());
    }

    #[test]
    fn weekly_grid_lands_on_fridays() {
        let g = weekly_grid(d("2014-01-01"), d("2014-01-31"));
        assert_eq!(g.first(), Some(&d("2014-01-03")));
        assert_eq!(g.len(), 5);
        assert!(g.iter().all(|x| x.weekday() == Weekday::Fri));
    }

    #[test]
    fn alignment_takes_last_observation_of_the_week() {
        let dates = vec![
            d("2014-01-02"),
            d("2014-01-03"),
            d("2014-01-08"),
            d("2014-01-09"),
            d("2014-01-16"),
        ];
        let grid = Grid::from_rows(
            [1.0, 2.0, 3.0, 4.0, 5.0]
                .iter()
                .map(|&v| vec![Some(v)])
                .collect(),
        )
        .unwrap();
        let panel = PricePanel::new(dates, vec!["A".into()], grid, PanelKind::Benchmark).unwrap();
        let fridays = weekly_grid(d("2014-01-01"), d("2014-01-17"));
        let aligned = align_weekly(&panel, &fridays).unwrap();
        let col: Vec<_> = aligned.values().column(0).collect();
        assert_eq!(col, vec![Some(2.0), Some(4.0), Some(5.0)]);

        // A benchmark week without data is a hard error.
        let fridays = weekly_grid(d("2014-01-01"), d("2014-01-31"));
        assert!(align_weekly(&panel, &fridays).is_err());
    }
}
