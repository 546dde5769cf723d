//! JSON formats and the command-line front end for `cremona-core`.

pub mod cli;
pub mod commands;
pub mod complex;
pub mod error;
pub mod schema;

pub use error::CliError;
