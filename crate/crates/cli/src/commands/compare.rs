//! `snspd compare` — side-by-side table of fit records.

use std::path::{Path, PathBuf};

use snspd_core::response::{compare_schemes, ComparisonReport, SchemeRecord, SigmoidFit};
use snspd_core::units::{a_to_ua, ua_to_a};

use crate::commands::require_out;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, write_csv};
use crate::records::FitRecord;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Fit-record JSON files, as written by `fit-counts`.
    #[arg(required = true, num_args = 1..)]
    pub records: Vec<PathBuf>,
    /// Plateau edge as a fraction of the fitted asymptote.
    #[arg(long, default_value_t = snspd_core::response::PLATEAU_THRESHOLD_DEFAULT)]
    pub threshold: f64,
}

fn scheme_record(path: &Path) -> CliResult<SchemeRecord> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let record: FitRecord = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let before = record.switching_before_ua.ok_or_else(|| {
        CliError::config(format!("{}: record lacks switching_before_ua", path.display()))
    })?;
    let after = record.switching_after_ua.ok_or_else(|| {
        CliError::config(format!("{}: record lacks switching_after_ua", path.display()))
    })?;
    Ok(SchemeRecord {
        label: record.label,
        switching_before: ua_to_a(before),
        switching_after: ua_to_a(after),
        critical_after: ua_to_a(record.critical_current_ua),
        fit: SigmoidFit {
            asymptote: record.fit.asymptote_per_s,
            center: ua_to_a(record.fit.center_ua),
            width: ua_to_a(record.fit.width_ua),
            offset: record.fit.offset_per_s,
            residual_rms: record.fit.residual_rms,
        },
    })
}

pub const COMPARISON_HEADER: &str = "label,switching_before_ua,switching_after_ua,critical_after_ua,switching_reduction,critical_reduction,plateau_absolute_ua,plateau_relative";

/// CSV rows of a comparison report, currents in µA and reductions as
/// fractions.
pub fn comparison_rows(report: &ComparisonReport) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|row| {
            vec![
                row.label.clone(),
                fmt_f64(a_to_ua(row.switching_before)),
                fmt_f64(a_to_ua(row.switching_after)),
                fmt_f64(a_to_ua(row.critical_after)),
                fmt_f64(row.switching_reduction),
                fmt_f64(row.critical_reduction),
                fmt_f64(a_to_ua(row.plateau.absolute)),
                fmt_f64(row.plateau.relative),
            ]
        })
        .collect()
}

/// The human-readable table shared with `reproduce plateau`.
pub fn print_report(report: &ComparisonReport) {
    println!(
        "{:<14} {:>10} {:>10} {:>8} {:>8} {:>12}",
        "scheme", "I_sw [uA]", "-> [uA]", "red [%]", "I_c red", "plateau [%]"
    );
    for row in &report.rows {
        println!(
            "{:<14} {:>10.1} {:>10.1} {:>8.0} {:>8.0} {:>12.1}",
            row.label,
            a_to_ua(row.switching_before),
            a_to_ua(row.switching_after),
            100.0 * row.switching_reduction,
            100.0 * row.critical_reduction,
            100.0 * row.plateau.relative
        );
    }
}

pub fn run(args: &Args, out: Option<&Path>) -> CliResult<()> {
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        return Err(CliError::config(format!(
            "threshold must be in (0, 1), got {}",
            args.threshold
        )));
    }
    let records: Vec<SchemeRecord> =
        args.records.iter().map(|p| scheme_record(p)).collect::<CliResult<_>>()?;
    let report = compare_schemes(&records, args.threshold)?;
    print_report(&report);
    if let Some(dir) = out {
        let dir = require_out(Some(dir))?;
        write_csv(&dir.join("comparison.csv"), COMPARISON_HEADER, &comparison_rows(&report))?;
    }
    Ok(())
}
