//! The `structinfo` command-line tool: argument definitions, input readers,
//! output formatting and one function per subcommand.

pub mod args;
pub mod commands;
pub mod error;
pub mod inputs;
pub mod output;

use crate::args::{Cli, Command};
use crate::error::CliResult;
use crate::output::Units;

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    let units = Units { base: cli.log_base };
    match &cli.command {
        Command::Hu(a) => commands::hu(a, units),
        Command::Hs(a) => commands::hs(a, units),
        Command::Notions(a) => commands::notions(a, units),
        Command::Distance(a) => commands::distance(a, units),
        Command::Code(a) => commands::code(a, units),
        Command::Trials(a) => commands::trials(a, units),
        Command::Itr { command } => commands::itr(command, units),
        Command::Sequences(a) => commands::sequences(a, units),
        Command::Conserve(a) => commands::conserve(a, units),
    }
}
