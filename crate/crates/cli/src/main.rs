//! `gwtree`: sampling, exact tables, stable numerics and verification
//! suites for conditioned Galton-Watson trees.
//!
//! Exit status: 0 on success, 1 when a verification gate fails, 2 on usage
//! or runtime errors.

mod codings;
mod common;
mod exact;
mod sample;
mod stable;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "gwtree", version, about = "Conditioned Galton-Watson trees and their stable limits")]
struct Cli {
    /// Worker threads; all cores when absent. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    Sample(sample::SampleArgs),
    Exact(exact::ExactArgs),
    Stable(stable::StableArgs),
    Verify(verify::VerifyArgs),
    Codings(codings::CodingsArgs),
}

/// A verification gate failed; the output was still written.
#[derive(Debug)]
pub struct GateFailed;

impl std::fmt::Display for GateFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for GateFailed {}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    match &cli.command {
        Command::Sample(a) => sample::run(a),
        Command::Exact(a) => exact::run(a),
        Command::Stable(a) => stable::run(a),
        Command::Codings(a) => codings::run(a),
        Command::Verify(a) => {
            if verify::run(a)? {
                Ok(())
            } else {
                Err(GateFailed.into())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<GateFailed>() => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
