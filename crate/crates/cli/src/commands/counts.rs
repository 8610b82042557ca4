//! `snspd fit-counts` — sigmoid fit and plateau metrics for a measured
//! count-rate curve.

use std::path::{Path, PathBuf};

use snspd_core::io::read_xy_csv;
use snspd_core::response::{
    fit_error_function, fit_error_function_with_offset, plateau_width, CountRateCurve,
    PLATEAU_THRESHOLD_DEFAULT,
};
use snspd_core::units::{a_to_ua, ua_to_a};

use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, print_json, write_json};
use crate::records::{FitParams, FitRecord, PlateauMetrics};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Count-rate CSV with header bias_ua,counts_per_s.
    #[arg(long)]
    pub counts: PathBuf,
    /// Critical current of the device [µA].
    #[arg(long)]
    pub critical_current_ua: f64,
    /// Also fit a constant dark floor.
    #[arg(long)]
    pub with_offset: bool,
    /// Plateau edge as a fraction of the fitted asymptote.
    #[arg(long, default_value_t = PLATEAU_THRESHOLD_DEFAULT)]
    pub threshold: f64,
    /// Record label; also names the --out file.
    #[arg(long, default_value = "device")]
    pub label: String,
    /// Switching current before treatment [µA]; carried for `compare`.
    #[arg(long)]
    pub switching_before_ua: Option<f64>,
    /// Switching current after treatment [µA]; carried for `compare`.
    #[arg(long)]
    pub switching_after_ua: Option<f64>,
}

/// File-system-safe version of the record label.
fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn read_curve(path: &Path, critical_current: f64) -> CliResult<CountRateCurve> {
    let table = read_xy_csv(path)?;
    let expect = ("bias_ua", "counts_per_s");
    if !table.x_label.eq_ignore_ascii_case(expect.0)
        || !table.y_label.eq_ignore_ascii_case(expect.1)
    {
        return Err(CliError::config(format!(
            "{}: expected header {},{} but found {},{}",
            path.display(),
            expect.0,
            expect.1,
            table.x_label,
            table.y_label
        )));
    }
    let curve = CountRateCurve {
        bias_points: table.rows.iter().map(|&(b, _)| ua_to_a(b)).collect(),
        counts: table.rows.iter().map(|&(_, c)| c).collect(),
        critical_current,
    };
    curve.validate()?;
    Ok(curve)
}

pub fn run(args: &Args, out: Option<&Path>) -> CliResult<()> {
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        return Err(CliError::config(format!(
            "threshold must be in (0, 1), got {}",
            args.threshold
        )));
    }
    if !(args.critical_current_ua > 0.0) {
        return Err(CliError::config(format!(
            "critical current must be > 0 uA, got {}",
            args.critical_current_ua
        )));
    }
    let curve = read_curve(&args.counts, ua_to_a(args.critical_current_ua))?;
    let fit = if args.with_offset {
        fit_error_function_with_offset(&curve)?
    } else {
        fit_error_function(&curve)?
    };
    // A threshold crossing at or above I_c is a legitimate non-saturating
    // curve, not a failure: report it as a missing plateau.
    let plateau = plateau_width(&fit, curve.critical_current, args.threshold)
        .ok()
        .map(|p| PlateauMetrics { absolute_ua: a_to_ua(p.absolute), relative: p.relative });

    let record = FitRecord {
        label: args.label.clone(),
        critical_current_ua: args.critical_current_ua,
        switching_before_ua: args.switching_before_ua,
        switching_after_ua: args.switching_after_ua,
        threshold: args.threshold,
        fit: FitParams {
            asymptote_per_s: fit.asymptote,
            center_ua: a_to_ua(fit.center),
            width_ua: a_to_ua(fit.width),
            offset_per_s: fit.offset,
            residual_rms: fit.residual_rms,
        },
        plateau,
    };
    print_json(&record)?;
    match &record.plateau {
        Some(p) => eprintln!(
            "fit-counts: {} -> center {:.4} uA, width {:.4} uA, plateau {:.2}% of I_c",
            args.label,
            record.fit.center_ua,
            record.fit.width_ua,
            100.0 * p.relative
        ),
        None => eprintln!(
            "fit-counts: {} -> center {:.4} uA, width {:.4} uA, no saturation plateau below I_c",
            args.label, record.fit.center_ua, record.fit.width_ua
        ),
    }
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join(format!("{}.json", sanitize(&args.label))), &record)?;
    }
    Ok(())
}
