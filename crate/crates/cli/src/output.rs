//! Output helpers: deterministic CSV and JSON writers.
//!
//! Floats are printed with `{:?}` — the shortest representation that
//! round-trips — so identical inputs produce byte-identical files.

use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Shortest round-trip decimal form of `v`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `header` then one comma-joined line per row.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> CliResult<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Creates `dir` (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("{}: {e}", dir.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::config(format!("serialization failed: {e}")))
}

/// Pretty JSON to stdout (the machine-readable channel).
pub fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    println!("{}", to_json(value)?);
    Ok(())
}

/// Pretty JSON to `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = to_json(value)?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}
