//! Command-line driver: configuration, run orchestration, output files and
//! the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};
