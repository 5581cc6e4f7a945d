use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sbs::cli::{self, CommonOpts};

/// Event-driven simulator and analysis toolkit for collaborative
/// best-option learning on communication graphs. Batch only: every command
/// reads a TOML config and writes CSV artifacts.
#[derive(Parser)]
#[command(name = "sbs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replication worker threads (default: one per core).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for CSV artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Validate the config and print the resolved plan without running.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One stochastic run; writes trajectory.csv (and jumps.csv).
    Simulate(Common),
    /// Integrate the deterministic limit; writes ode_trajectory.csv and
    /// bounds.csv.
    Meanfield(Common),
    /// One run against the integrated limit; writes compare.csv and
    /// summary.csv.
    Compare(Common),
    /// Absorption statistics over replications; writes summary.csv.
    Learnability(Common),
    /// Coupled finite/limit runs; writes coupling.csv.
    Coupling(Common),
    /// Structured counterexample experiments; writes summary.csv.
    Scenario {
        /// Which setup to materialize: example1 | example2.
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn opts(&self) -> CommonOpts {
        CommonOpts {
            config: self.config.clone(),
            seed: self.seed,
            jobs: self.jobs,
            out: self.out.clone(),
            dry_run: self.dry_run,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SBS_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => cli::cmd_simulate(&c.opts()),
        Command::Meanfield(c) => cli::cmd_meanfield(&c.opts()),
        Command::Compare(c) => cli::cmd_compare(&c.opts()),
        Command::Learnability(c) => cli::cmd_learnability(&c.opts()),
        Command::Coupling(c) => cli::cmd_coupling(&c.opts()),
        Command::Scenario { name, common } => cli::cmd_scenario(name, &common.opts()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
