//! File formats and subcommands of the `vco` tool.

pub mod commands;
pub mod documents;

pub use commands::{run, Cli, CliError};
