//! Command-line front end for `talbot-core`: configuration files, the
//! `simulate`, `quench` and `oracle-check` commands, CSV/SVG output and run
//! manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod svg;
pub mod units;

pub use error::CliError;
