//! `lattice-kc`: kernel tables, ground-state solves, the verification suite
//! and parameter sweeps for the discrete Kirchhoff–Choquard problem.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lattice_kc::config::RunConfig;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "lattice-kc", version, about)]
struct Cli {
    /// Run configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the solver and verification seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for kernel builds and convolutions.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Parent directory for run artifacts, overriding `[output] directory`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Build (or load) the Green's function table and export its fundamental octant.
    Green,
    /// Compute the ground state.
    Solve,
    /// Run the sampled property checks.
    Verify,
    /// Solve over the values in the `[sweep]` section.
    Sweep,
}

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Config(lattice_kc::Error),
    #[error("{0}")]
    Quadrature(lattice_kc::Error),
    #[error("{0}")]
    NotConverged(String),
    #[error("failed checks: {}", .0.join(", "))]
    Verify(Vec<String>),
    #[error("{0}")]
    Run(lattice_kc::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Run(_) => 1,
            Failure::Quadrature(_) => 2,
            Failure::NotConverged(_) => 3,
            Failure::Verify(_) => 4,
        }
    }
}

impl From<lattice_kc::Error> for Failure {
    fn from(e: lattice_kc::Error) -> Self {
        match e {
            lattice_kc::Error::QuadratureNotConverged { .. } => Failure::Quadrature(e),
            lattice_kc::Error::Config { .. } | lattice_kc::Error::InvalidParameter(_) => Failure::Config(e),
            other => Failure::Run(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            lattice_kc::Error::Io(io) => Failure::Config(lattice_kc::Error::Config {
                line: 0,
                message: format!("cannot read {}: {io}", path.display()),
            }),
            other => Failure::Config(other),
        })?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.solve.seed = seed;
        config.verify.seed = seed;
    }
    if let Some(dir) = &cli.output {
        config.output.directory = dir.clone();
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(lattice_kc::Error::InvalidParameter(format!("--threads: {e}"))))?;
    }
    let config = load_config(cli)?;
    match cli.command {
        Command::Green => commands::green(&config),
        Command::Solve => commands::solve(&config),
        Command::Verify => commands::verify(&config),
        Command::Sweep => commands::sweep(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
