//! `mpsk-ls`: sweeps, theory curves, single-frame estimates and self tests.

mod estimate;
mod grid;
mod output;
mod selftest;
mod simulate;
mod theory;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit status for usage errors detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(
    name = "mpsk-ls",
    version,
    about = "Least-squares M-PSK phase and amplitude estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo sweep over an SNR grid; writes CSV and a JSON manifest.
    Simulate(simulate::Args),
    /// Asymptotic theory curves over an SNR grid.
    Theory(theory::Args),
    /// Estimate from a CSV file of received samples.
    Estimate(estimate::Args),
    /// Reduced-scale acceptance checks.
    Selftest(selftest::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Theory(args) => theory::run(args),
        Command::Estimate(args) => estimate::run(args),
        Command::Selftest(args) => selftest::run(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

/// Runs `f` on a pool of `threads` workers, or the global pool when `None`.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> anyhow::Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(f)),
    }
}
