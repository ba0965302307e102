//! Library half of the `qnoise` command-line tool: config schema, CSV I/O and
//! the subcommand implementations.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::{run, sidecar, CommandKind, CommandOutput, RunOptions};
pub use config::RunConfig;
pub use error::{CliError, Result};
