//! `layersep` command-line driver.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};


#[derive(Debug, Parser)]
#[command(name = "layersep", version, about = "Wall-shear separation ODE and near-boundary flow solver on curved surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized manufactured fields.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Refinement levels for verification studies.
    #[arg(long, global = true, default_value_t = 3)]
    levels: usize,
    /// Suppress the summary on standard output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Integrate the wall-shear ODE for a coefficient schedule.
    Ode,
    /// Run the Navier-Stokes solver and record the wall data.
    Simulate,
    /// Run the verification battery.
    Verify,
    /// Sweep the ODE over a (lambda0, beta) grid.
    Sweep,
    /// Refinement study of the discrete operators only.
    OperatorsCheck,
}

pub struct Manifest {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub levels: usize,
    pub quiet: bool,
}

impl Manifest {
    pub fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let m = Manifest {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        levels: cli.levels,
        quiet: cli.quiet,
    };
    let res = match cli.command {
        Command::Ode => commands::ode(&m),
        Command::Simulate => commands::simulate(&m),
        Command::Verify => commands::verify(&m, false),
        Command::Sweep => commands::sweep(&m),
        Command::OperatorsCheck => commands::verify(&m, true),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
