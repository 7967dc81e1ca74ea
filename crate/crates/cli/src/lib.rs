//! Configuration, file formats and subcommands behind the `nsqpwd` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use error::{CliError, Result};
