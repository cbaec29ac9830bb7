mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cryptodiv::backtest::Case;
use cryptodiv::frontier::Constraint;

#[derive(Parser, Debug)]
#[command(name = "cryptodiv", version, about = "Cryptocurrency diversification studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the equally weighted coin index.
    Index(Shared),
    /// Descriptive statistics per asset.
    Stats(Shared),
    /// Correlation matrices and rolling correlations.
    Corr(Shared),
    /// Optimal weights and efficient frontiers.
    Frontier(Shared),
    /// Mean-variance spanning tests.
    Spanning(Shared),
    /// Full-sample and rolling-window studies.
    Backtest(Shared),
    /// Transaction-cost budget sweep and net frontiers.
    Costs {
        #[command(flatten)]
        shared: Shared,
        /// Budgets in basis points, comma separated.
        #[arg(long, value_delimiter = ',')]
        budgets: Option<Vec<f64>>,
    },
    /// Seeded numerical self-checks on synthetic data.
    Selftest(Shared),
}

#[derive(Args, Debug, Clone)]
pub struct Shared {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_constraint)]
    pub constraint: Option<Constraint>,
    #[arg(long, value_parser = parse_case)]
    pub case: Option<Case>,
    /// Validate the configuration and inputs without writing anything.
    #[arg(long)]
    pub dry_run: bool,
}

fn parse_constraint(s: &str) -> Result<Constraint, String> {
    s.parse().map_err(|e: cryptodiv::Error| e.to_string())
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse().map_err(|e: cryptodiv::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Index(s) => commands::run(commands::Task::Index, &s, None),
        Command::Stats(s) => commands::run(commands::Task::Stats, &s, None),
        Command::Corr(s) => commands::run(commands::Task::Corr, &s, None),
        Command::Frontier(s) => commands::run(commands::Task::Frontier, &s, None),
        Command::Spanning(s) => commands::run(commands::Task::Spanning, &s, None),
        Command::Backtest(s) => commands::run(commands::Task::Backtest, &s, None),
        Command::Costs { shared, budgets } => commands::run(commands::Task::Costs, &shared, budgets),
        Command::Selftest(s) => commands::run(commands::Task::Selftest, &s, None),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
