//! Command-line frontend for the diamond coupled-mode network simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use diamond::cli;
use diamond::model::SignConvention;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Paper,
    Standard,
}

impl From<ConventionArg> for SignConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Paper => SignConvention::Paper,
            ConventionArg::Standard => SignConvention::Standard,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "diamond",
    about = "Frequency-domain simulator and design optimizer for a four-mode \
             diamond coupled-mode network",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the 8x8 scattering matrix and headline metrics at one probe
    /// frequency.
    Smatrix {
        #[arg(long)]
        config: PathBuf,
        /// Probe frequency in Hz (cycles).
        #[arg(long)]
        freq_hz: f64,
        /// Overrides the config's sign convention.
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
    },
    /// Run the config's parameter sweep; write CSV and JSON summary.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker thread count (default: DIAMOND_WORKERS env, then config,
        /// then all cores). Output is identical for any count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the config's optimization problem; write optimize.json.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-run a built-in preset data set and evaluate its headline checks.
    /// Exits non-zero if a check fails.
    Reproduce {
        /// Preset identifier: 2, 3, 3a, 4, 5, 6, 7, 8, 9, 10 or 11.
        #[arg(long)]
        figure: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Cross-check the frequency-domain scattering matrix against direct
    /// time-domain integration. Exits non-zero if any check fails.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Maximum relative error accepted in the cross-check.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

fn env_workers() -> Option<usize> {
    std::env::var("DIAMOND_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
}

fn run(cli: Cli) -> diamond::Result<bool> {
    match cli.command {
        Command::Smatrix { config, freq_hz, convention } => {
            cli::cmd_smatrix(&config, freq_hz, convention.map(Into::into))?;
            Ok(true)
        }
        Command::Sweep { config, out, workers } => {
            cli::cmd_sweep(&config, &out, workers.or_else(env_workers))?;
            Ok(true)
        }
        Command::Optimize { config, out } => {
            cli::cmd_optimize(&config, &out)?;
            Ok(true)
        }
        Command::Reproduce { figure, out, workers } => {
            cli::cmd_reproduce(&figure, &out, workers.or_else(env_workers))
        }
        Command::Verify { config, tolerance } => cli::cmd_verify(&config, tolerance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
