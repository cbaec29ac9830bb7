//! Equally-weighted cryptocurrency index over a closed coin universe.
//!
//! The universe is fixed at a reference date. At the first weekly date of
//! every calendar month the index is recomposed: the active coins (price and
//! market cap both observed) are counted, the index size is rounded down to a
//! multiple of five, and the largest coins by market cap become constituents.
//! Between rebalancing dates the weekly index return is the equally-weighted
//! mean of the constituents' simple returns; a constituent without a price
//! keeps its last observation (zero return) until it trades again. Each
//! composition runs as a sub-index starting at 100 and is chain-linked into
//! the published level through a normalization factor.

use chrono::{Datelike, NaiveDate};
use log::warn;

use crate::error::{Error, Result};
use crate::io::{fmt_date, fmt_num, Table};
use crate::panel::{Grid, PanelKind, PricePanel};

pub const BASE_LEVEL: f64 = 100.0;
const SIZE_STEP: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct UniverseSpec {
    reference_date: NaiveDate,
    coins: Vec<String>,
}

impl UniverseSpec {
    pub fn new(reference_date: NaiveDate, coins: Vec<String>) -> Result<Self> {
        if coins.is_empty() {
            return Err(Error::Parameter("coin universe is empty".into()));
        }
        let mut sorted = coins.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parameter(format!("duplicate coin `{}` in universe", w[0])));
        }
        Ok(Self {
            reference_date,
            coins,
        })
    }

    /// Universe made of every column of the panel.
    pub fn from_panel(reference_date: NaiveDate, panel: &PricePanel) -> Result<Self> {
        Self::new(reference_date, panel.assets().to_vec())
    }

    pub fn reference_date(&self) -> NaiveDate {
        self.reference_date
    }

    pub fn coins(&self) -> &[String] {
        &self.coins
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RebalanceRecord {
    pub date: NaiveDate,
    pub n_act: usize,
    pub n_ind: usize,
    pub constituents: Vec<String>,
    /// Published level divided by the sub-index base at this date.
    pub normalization_factor: f64,
    /// Sub-index of this composition, 100 at `date`, through the next rebalancing date.
    pub sub_levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub dates: Vec<NaiveDate>,
    pub levels: Vec<f64>,
    pub audit: Vec<RebalanceRecord>,
    pub warnings: Vec<String>,
}

impl IndexSeries {
    pub fn rebalance_dates(&self) -> Vec<NaiveDate> {
        self.audit.iter().map(|r| r.date).collect()
    }

    /// Single-column benchmark-style panel named `id`.
    pub fn to_panel(&self, id: &str) -> Result<PricePanel> {
        let cells = self.levels.iter().map(|&v| Some(v)).collect();
        PricePanel::new(
            self.dates.clone(),
            vec![id.to_string()],
            Grid::new(self.levels.len(), 1, cells)?,
            PanelKind::Benchmark,
        )
    }

    pub fn levels_table(&self) -> Table {
        let mut t = Table::new(["date", "level"]);
        for (d, l) in self.dates.iter().zip(&self.levels) {
            t.push(vec![fmt_date(*d), fmt_num(*l)]);
        }
        t
    }

    pub fn audit_table(&self) -> Table {
        let mut t = Table::new([
            "rebalance_date",
            "n_act",
            "n_ind",
            "constituents",
            "normalization_factor",
        ]);
        for r in &self.audit {
            t.push(vec![
                fmt_date(r.date),
                r.n_act.to_string(),
                r.n_ind.to_string(),
                r.constituents.join(";"),
                fmt_num(r.normalization_factor),
            ]);
        }
        t
    }
}

/// Coins with both a price and a market cap at `date`, in panel column order.
pub fn active_universe(coins: &PricePanel, date: NaiveDate) -> Result<Vec<String>> {
    let row = coins
        .dates()
        .iter()
        .position(|&d| d == date)
        .ok_or_else(|| Error::Contract(format!("{date} is not a panel date")))?;
    Ok(active_at(coins, row, None))
}

fn active_at(coins: &PricePanel, row: usize, universe: Option<&[usize]>) -> Vec<String> {
    let all: Vec<usize>;
    let cols = match universe {
        Some(c) => c,
        None => {
            all = (0..coins.assets().len()).collect();
            &all
        }
    };
    cols.iter()
        .filter(|&&c| coins.price(row, c).is_some() && coins.market_cap(row, c).is_some())
        .map(|&c| coins.assets()[c].clone())
        .collect()
}

/// Largest multiple of five not above `n_act`; universes below five keep their size.
pub fn index_size(n_act: usize) -> usize {
    if n_act < SIZE_STEP {
        n_act
    } else {
        n_act - n_act % SIZE_STEP
    }
}

/// The `n_ind` candidates with the largest market cap; ties go to the smaller identifier.
pub fn select_constituents(candidates: &[(String, f64)], n_ind: usize) -> Result<Vec<String>> {
    if n_ind > candidates.len() {
        return Err(Error::Contract(format!(
            "index size {n_ind} exceeds the {} active coins",
            candidates.len()
        )));
    }
    let mut ranked: Vec<&(String, f64)> = candidates.iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked.into_iter().take(n_ind).map(|(id, _)| id.clone()).collect())
}

/// Rows that open a composition: the first row, then the first row of each new calendar month.
pub fn rebalancing_rows(dates: &[NaiveDate]) -> Vec<usize> {
    (0..dates.len())
        .filter(|&t| {
            t == 0 || (dates[t].year(), dates[t].month()) != (dates[t - 1].year(), dates[t - 1].month())
        })
        .collect()
}

pub fn build_index(coins: &PricePanel, spec: &UniverseSpec) -> Result<IndexSeries> {
    if coins.kind() != PanelKind::Coin {
        return Err(Error::Contract("index construction needs a coin panel".into()));
    }
    let universe: Vec<usize> = spec
        .coins()
        .iter()
        .map(|id| {
            coins
                .asset_index(id)
                .ok_or_else(|| Error::Parameter(format!("universe coin `{id}` not in the coin panel")))
        })
        .collect::<Result<_>>()?;
    let start = coins
        .dates()
        .iter()
        .position(|&d| d >= spec.reference_date())
        .ok_or_else(|| {
            Error::InsufficientData(format!(
                "coin panel ends before the reference date {}",
                spec.reference_date()
            ))
        })?;
    let dates = coins.dates()[start..].to_vec();
    let rebal = rebalancing_rows(&dates);

    let mut levels = vec![BASE_LEVEL; dates.len()];
    let mut audit = Vec::with_capacity(rebal.len());
    let mut warnings = Vec::new();

    for (p, &open) in rebal.iter().enumerate() {
        let close = rebal.get(p + 1).copied().unwrap_or(dates.len() - 1);
        let row = start + open;
        let active = active_at(coins, row, Some(&universe));
        let n_act = active.len();
        let n_ind = index_size(n_act);
        let candidates: Vec<(String, f64)> = active
            .iter()
            .map(|id| {
                let c = coins.asset_index(id).unwrap_or_default();
                (id.clone(), coins.market_cap(row, c).unwrap_or(0.0))
            })
            .collect();
        let constituents = select_constituents(&candidates, n_ind)?;
        let cols: Vec<usize> = constituents
            .iter()
            .filter_map(|id| coins.asset_index(id))
            .collect();

        if cols.is_empty() && close > open {
            let msg = format!(
                "no active coins at {}; index level carried flat until the next rebalancing",
                dates[open]
            );
            warn!("{msg}");
            warnings.push(msg);
        }

        let factor = levels[open] / BASE_LEVEL;
        let mut last: Vec<f64> = cols
            .iter()
            .map(|&c| coins.price(row, c).unwrap_or(f64::NAN))
            .collect();
        let mut sub = Vec::with_capacity(close - open + 1);
        sub.push(BASE_LEVEL);
        for t in open + 1..=close {
            let mean_return = if cols.is_empty() {
                0.0
            } else {
                let total: f64 = cols
                    .iter()
                    .zip(last.iter_mut())
                    .map(|(&c, prev)| match coins.price(start + t, c) {
                        Some(p) => {
                            let r = p / *prev - 1.0;
                            *prev = p;
                            r
                        }
                        None => 0.0,
                    })
                    .sum();
                total / cols.len() as f64
            };
            let next = sub[sub.len() - 1] * (1.0 + mean_return);
            sub.push(next);
            levels[t] = factor * next;
        }
        audit.push(RebalanceRecord {
            date: dates[open],
            n_act,
            n_ind,
            constituents,
            normalization_factor: factor,
            sub_levels: sub,
        });
    }

    Ok(IndexSeries {
        dates,
        levels,
        audit,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Duration;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn weekly(start: &str, n: usize) -> Vec<NaiveDate> {
        (0..n).map(|t| d(start) + Duration::days(7 * t as i64)).collect()
    }

    fn coins(dates: Vec<NaiveDate>, prices: &[&[Option<f64>]], caps: &[&[Option<f64>]]) -> PricePanel {
        let n = prices[0].len();
        let to_grid = |rows: &[&[Option<f64>]]| Grid::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap();
        PricePanel::coins(
            dates,
            (0..n).map(|i| format!("C{i}")).collect(),
            to_grid(prices),
            to_grid(caps),
        )
        .unwrap()
    }

    #[test]
    fn index_size_examples() {
        assert_eq!(index_size(66), 65);
        assert_eq!(index_size(5), 5);
        assert_eq!(index_size(3), 3);
        assert_eq!(index_size(0), 0);
        assert_eq!(index_size(14), 10);
    }

    #[test]
    fn selection_examples() {
        let c = |v: &[(&str, f64)]| v.iter().map(|(a, b)| (a.to_string(), *b)).collect::<Vec<_>>();
        assert_eq!(
            select_constituents(&c(&[("A", 10.0), ("B", 20.0), ("C", 5.0)]), 2).unwrap(),
            ["B", "A"]
        );
        assert_eq!(select_constituents(&c(&[("B", 10.0), ("A", 10.0)]), 1).unwrap(), ["A"]);
        assert_eq!(select_constituents(&c(&[("A", 1.0), ("B", 2.0)]), 2).unwrap().len(), 2);
        assert!(select_constituents(&c(&[("A", 1.0)]), 2).is_err());
    }

    #[test]
    fn active_universe_examples() {
        let p = coins(
            weekly("2014-01-03", 1),
            &[&[Some(1.0), Some(2.0), None]],
            &[&[Some(1.0), None, None]],
        );
        assert_eq!(active_universe(&p, d("2014-01-03")).unwrap(), ["C0"]);
        let p = coins(weekly("2014-01-03", 1), &[&[None, None]], &[&[None, None]]);
        assert!(active_universe(&p, d("2014-01-03")).unwrap().is_empty());
        assert!(active_universe(&p, d("2014-01-04")).is_err());
    }

    #[test]
    fn single_coin_tracks_its_price() {
        let p = coins(
            weekly("2014-01-03", 3),
            &[&[Some(100.0)], &[Some(110.0)], &[Some(121.0)]],
            &[&[Some(1.0)], &[Some(1.0)], &[Some(1.0)]],
        );
        let spec = UniverseSpec::from_panel(d("2014-01-01"), &p).unwrap();
        let idx = build_index(&p, &spec).unwrap();
        assert_eq!(idx.levels[0], 100.0);
        assert!((idx.levels[1] - 110.0).abs() < 1e-12);
        assert!((idx.levels[2] - 121.0).abs() < 1e-12);
    }

    #[test]
    fn offsetting_returns_cancel() {
        let p = coins(
            weekly("2014-01-03", 2),
            &[&[Some(50.0), Some(80.0)], &[Some(55.0), Some(72.0)]],
            &[&[Some(1.0), Some(2.0)], &[Some(1.0), Some(2.0)]],
        );
        let spec = UniverseSpec::from_panel(d("2014-01-01"), &p).unwrap();
        let idx = build_index(&p, &spec).unwrap();
        assert!((idx.levels[1] - 100.0).abs() < 1e-12);

        let flat = coins(
            weekly("2014-01-03", 3),
            &[&[Some(5.0), Some(7.0)][..]; 3],
            &[&[Some(1.0), Some(1.0)][..]; 3],
        );
        let idx = build_index(&flat, &UniverseSpec::from_panel(d("2014-01-01"), &flat).unwrap()).unwrap();
        assert!(idx.levels.iter().all(|&l| l == 100.0));
    }

    #[test]
    fn empty_month_is_carried_flat_with_warning() {
        let p = coins(
            weekly("2014-01-03", 7),
            &[&[None], &[None], &[None], &[None], &[None], &[Some(10.0)], &[Some(20.0)]],
            &[&[None], &[None], &[None], &[None], &[None], &[Some(1.0)], &[Some(1.0)]],
        );
        let idx = build_index(&p, &UniverseSpec::from_panel(d("2014-01-01"), &p).unwrap()).unwrap();
        // January has no active coin; February opens on 2014-02-07 with C0.
        assert!(!idx.warnings.is_empty());
        assert_eq!(idx.levels[..6], [100.0; 6]);
        assert!((idx.levels[6] - 200.0).abs() < 1e-12);
        assert_eq!(idx.audit.len(), 2);
        assert_eq!(idx.audit[1].constituents, ["C0"]);
    }

    #[test]
    fn late_starter_waits_for_next_rebalancing() {
        // C1 becomes active mid-January; it must not enter before February.
        let one = [Some(1.0), Some(1.0)];
        let p = coins(
            weekly("2014-01-03", 7),
            &[
                &[Some(10.0), None],
                &[Some(10.0), Some(5.0)],
                &[Some(10.0), Some(50.0)],
                &[Some(10.0), Some(50.0)],
                &[Some(10.0), Some(50.0)],
                &[Some(10.0), Some(50.0)],
                &[Some(10.0), Some(100.0)],
            ],
            &[&[Some(1.0), None], &one, &one, &one, &one, &one, &one],
        );
        let idx = build_index(&p, &UniverseSpec::from_panel(d("2014-01-01"), &p).unwrap()).unwrap();
        assert_eq!(idx.levels[..6], [100.0; 6]);
        // February: C1 doubles, C0 flat -> mean simple return 50%.
        assert!((idx.levels[6] - 150.0).abs() < 1e-12);
        assert_eq!(idx.audit[1].n_ind, 2);
        assert_eq!(idx.audit[0].n_act, 1);
    }

    #[test]
    fn tables_have_contract_columns() {
        let p = coins(
            weekly("2014-01-03", 2),
            &[&[Some(1.0), Some(2.0)], &[Some(1.5), Some(2.0)]],
            &[&[Some(3.0), Some(2.0)], &[Some(3.0), Some(2.0)]],
        );
        let idx = build_index(&p, &UniverseSpec::from_panel(d("2014-01-01"), &p).unwrap()).unwrap();
        let audit = idx.audit_table();
        assert_eq!(audit.header, ["rebalance_date", "n_act", "n_ind", "constituents", "normalization_factor"]);
        assert_eq!(audit.rows[0][3], "C0;C1");
        assert_eq!(idx.levels_table().header, ["date", "level"]);
    }
}
