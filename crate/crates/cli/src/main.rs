//! `qwork`: characteristic functions, work distributions and fluctuation
//! checks from a run configuration.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Axis, Context, Status};
use config::RunConfig;
use error::{CliError, Result};
use qwork_core::MuGrid;

#[derive(Parser)]
#[command(name = "qwork", version, about = "Ramsey-scheme work statistics of thermal scalar fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides `[output] jobs`.
    #[arg(long, env = "QWORK_JOBS")]
    jobs: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    mu_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu_max: Option<f64>,
    #[arg(long)]
    mu_n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Beta,
    Lambda,
    Lapse,
}

#[derive(Subcommand)]
enum Command {
    /// Sample P̃(μ) on the μ grid.
    Charfunc(Common),
    /// Lattice atoms (discrete spectra) or sampled density (continuum).
    Workdist(Common),
    /// Closed-form moments as JSON.
    Moments(Common),
    /// Run every fluctuation check; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Check this atoms CSV instead of regenerating it.
        #[arg(long)]
        atoms: Option<PathBuf>,
        /// Also write the regulated Wightman function along the τ grid.
        #[arg(long)]
        wightman: bool,
    },
    /// Moments along one parameter axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Closed form against the truncated Fock-space trace.
    OracleCompare(Common),
}

fn context(common: &Common) -> Result<Context> {
    let mut cfg = RunConfig::load(&common.config)?;
    if common.mu_min.is_some() || common.mu_max.is_some() || common.mu_n.is_some() {
        cfg.grid = MuGrid::new(
            common.mu_min.unwrap_or(cfg.grid.min),
            common.mu_max.unwrap_or(cfg.grid.max),
            common.mu_n.unwrap_or(cfg.grid.n),
        )?;
    }
    if let Some(j) = common.jobs.or(cfg.jobs) {
        if j == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        // Only the first call configures the pool; later runs in the same
        // process keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let out_dir = common.out.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    Ok(Context { cfg, out_dir })
}

fn report(status: Status) -> ExitCode {
    if status.failures.is_empty() {
        return ExitCode::SUCCESS;
    }
    for f in &status.failures {
        eprintln!("FAIL {f}");
    }
    ExitCode::from(1)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Charfunc(c) => {
            println!("{}", commands::charfunc(&context(&c)?)?.display());
        }
        Command::Workdist(c) => {
            println!("{}", commands::workdist(&context(&c)?)?.display());
        }
        Command::Moments(c) => {
            println!("{}", commands::moments(&context(&c)?)?);
        }
        Command::Verify { common, atoms, wightman } => {
            let (json, status) = commands::verify(&context(&common)?, atoms.as_deref(), wightman)?;
            println!("{json}");
            return Ok(report(status));
        }
        Command::Sweep { common, axis, values } => {
            let axis = match axis {
                AxisArg::Beta => Axis::Beta,
                AxisArg::Lambda => Axis::Lambda,
                AxisArg::Lapse => Axis::Lapse,
            };
            println!("{}", commands::sweep(&context(&common)?, axis, &values)?.display());
        }
        Command::OracleCompare(c) => {
            let (path, status) = commands::oracle_compare(&context(&c)?)?;
            println!("{}", path.display());
            return Ok(report(status));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
