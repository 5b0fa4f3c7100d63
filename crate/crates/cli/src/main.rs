// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reinmenu::ContractClass;

use commands::Common;

/// Optimal reinsurance menus under hidden types.
#[derive(Parser)]
#[command(name = "reinmenu", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides solver.class.
    #[arg(long, value_parser = parse_class)]
    class: Option<ContractClass>,
    /// Overrides solver.grid_points (kink search grid).
    #[arg(long)]
    grid: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the optimal menu; writes menu.csv and summary.json.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate the objective as a function of the kink; writes curve.csv.
    Curve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        t_lo: Option<f64>,
        /// Defaults to the largest a in the type support.
        #[arg(long)]
        t_hi: Option<f64>,
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// Audit a menu table for IC, IR and the shape of its indirect utility;
    /// writes report.json.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        menu: PathBuf,
    },
    /// Show that first-best pricing invites mimicking; writes report.json.
    FirstBest {
        #[command(flatten)]
        common: CommonArgs,
        /// ALPHA1,K1,ALPHA2,K2 (repeatable). Random pairs when omitted.
        #[arg(long, value_parser = parse_pair)]
        pair: Vec<[f64; 4]>,
    },
    /// Monte Carlo estimate of a menu's profit; writes estimate.json.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        menu: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
}

fn parse_class(s: &str) -> Result<ContractClass, String> {
    ContractClass::parse(s).ok_or_else(|| format!("expected stop_loss, quota_share or change_loss, got {s:?}"))
}

fn parse_pair(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("expected ALPHA1,K1,ALPHA2,K2, got {} numbers", v.len()))
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            config: a.config,
            out: a.out,
            class: a.class,
            grid: a.grid,
            seed: a.seed,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve { common } => commands::solve(&common.into()),
        Command::Curve { common, t_lo, t_hi, n } => commands::curve_cmd(&common.into(), t_lo, t_hi, n),
        Command::Verify { common, menu } => commands::verify(&common.into(), &menu),
        Command::FirstBest { common, pair } => commands::first_best(&common.into(), &pair),
        Command::Simulate { common, menu, n } => commands::simulate(&common.into(), &menu, n),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
