//! Command-line front end: argument parsing, reports and the acceptance suite.

pub mod commands;
pub mod error;
pub mod input;
pub mod report;
pub mod verify;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
