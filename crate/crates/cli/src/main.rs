//! `chaosdeg` — entropic chaos degree analysis from the command line.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error.

mod cmd;
mod config;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

const MAP_CATALOG: &str = "\
Built-in maps (name: parameters [canonical values], domain):
  logistic:   a            [4]                  on [0,1]
  circle:     v            [(sqrt(5)-1)/2]      on [0,2pi), wraps mod 2pi
  tent:       mu           [2]                  on [0,1]
  henon:      a,b          [1.4,0.3]            on [-1.5,1.5]x[-0.5,0.5]
  baker:      (none)                            on [0,1]^2
  tinkerbell: a,b,c,d      [0.9,-0.6013,2,0.5]  on [-2,2]^2

Partition specs are `L` for 1-D or `L1xL2` per axis (e.g. `100`, `32x32`).
Cell indexing is row-major over axes with half-open cells; the top cell on
each axis is closed. Config files hold `key=value` lines using the long flag
names; command-line flags take precedence.";

#[derive(Parser)]
#[command(
    name = "chaosdeg",
    version,
    about = "Entropic chaos degree, Lyapunov exponents, and observation studies for discrete maps",
    after_long_help = MAP_CATALOG
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the entropic chaos degree of a map (or an ingested orbit)
    Ecd(cmd::EcdArgs),
    /// Sweep one map parameter, pairing the chaos degree with the Lyapunov exponent
    Sweep(cmd::SweepArgs),
    /// Emit bifurcation data for a 1-D map
    Bifurcation(cmd::BifurcationArgs),
    /// Circle-map decay study over continued-fraction convergent partitions
    #[command(name = "circle-decay")]
    CircleDecay(cmd::CircleDecayArgs),
    /// Lyapunov exponent of a built-in map (full spectrum optional)
    Lyapunov(cmd::LyapunovArgs),
    /// Quantum chaos degree from plain-text state and Kraus files
    #[command(name = "quantum-ecd")]
    QuantumEcd(cmd::QuantumEcdArgs),
    /// Parse an orbit CSV, report its shape, optionally re-export it
    Ingest(cmd::IngestArgs),
}

/// CLI failure classes, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(chaosdeg_core::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<chaosdeg_core::Error> for CliError {
    fn from(e: chaosdeg_core::Error) -> Self {
        use chaosdeg_core::Error as E;
        match e {
            E::UnknownMap(_)
            | E::ParamOutOfRange { .. }
            | E::InvalidArgument(_)
            | E::EmptyGrid
            | E::EmptyAxis(_) => CliError::Usage(e.to_string()),
            other => CliError::Run(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ecd(args) => cmd::run_ecd(args),
        Command::Sweep(args) => cmd::run_sweep_cmd(args),
        Command::Bifurcation(args) => cmd::run_bifurcation(args),
        Command::CircleDecay(args) => cmd::run_circle_decay(args),
        Command::Lyapunov(args) => cmd::run_lyapunov(args),
        Command::QuantumEcd(args) => cmd::run_quantum_ecd(args),
        Command::Ingest(args) => cmd::run_ingest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
