//! Command-line front end for `funcorr-core`: matrix input, built-in
//! reference fixtures, and JSON or table reports.

pub mod app;
pub mod fixtures;
pub mod io;
pub mod report;

pub use app::{run_from_args, Cli, CliError, Output};
