//! Library side of the `tpeqw` command-line tool: configuration loading,
//! the commands, and their output documents.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, CliError, Command, Outcome};
pub use config::{LoadedConfig, RunConfig};
pub use report::{write_atomic, Artifact, ResultDocument};
