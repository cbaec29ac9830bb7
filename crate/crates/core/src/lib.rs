//! Diversification analysis for a cryptocurrency index against traditional
//! asset classes: index construction, descriptive analytics, mean-variance
//! frontiers, spanning tests, transaction-cost-aware portfolios and rolling
//! backtests.

pub mod analytics;
pub mod backtest;
pub mod dist;
pub mod error;
pub mod frontier;
pub mod ewci;
pub mod io;
pub mod linalg;
pub mod panel;
pub mod simulate;
pub mod solver;
pub mod spanning;
pub mod txcost;

pub use error::{Error, Result};
