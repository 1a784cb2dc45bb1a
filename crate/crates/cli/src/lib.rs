//! Command-line front end for `strictqst`. Each subcommand reads and writes
//! JSON; the experiment drivers add a CSV table, an SVG plot and a manifest.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 3 I/O failure,
//! 4 dimension mismatch, 5 infeasible data.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod plot;
pub mod report;

pub use args::Cli;
pub use error::{CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    commands::run(cli.command)
}
