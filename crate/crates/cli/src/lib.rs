//! Command-line front end for the `fdd2d-core` models.
//!
//! Subcommands read flat `key = value` scenario files (see [`config`]) and
//! print reports or CSV. Exit status is 0 on success, 2 for invalid input and
//! 3 when a `--strict` consistency check fails.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod sweep;
pub mod table;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
