//! Subcommand implementations.

pub mod compare;
pub mod counts;
pub mod dose;
pub mod reproduce;
pub mod sigma;
pub mod simulate;
pub mod surface;
pub mod sweep;

use std::path::Path;

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};

/// Loads and validates the --config file, failing when the flag is absent.
pub fn load_config(path: Option<&Path>) -> CliResult<ScenarioConfig> {
    let path = path.ok_or_else(|| CliError::config("this subcommand needs --config"))?;
    ScenarioConfig::load(path)
}

/// The --out directory, created if missing.
pub fn require_out(out: Option<&Path>) -> CliResult<&Path> {
    let dir = out.ok_or_else(|| CliError::config("this subcommand needs --out"))?;
    crate::output::ensure_dir(dir)?;
    Ok(dir)
}
