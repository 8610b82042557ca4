//! `snspd analyze-surface` — roughness, elevation-onset, and dark-contrast
//! metrics from height maps, elevation tables, and micrographs.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ndarray::Array2;
use serde::Serialize;

use snspd_core::io::{read_matrix_csv, read_pgm, read_xy_csv};
use snspd_core::surface::{
    dark_contrast_by_depth, elevation_onset_fit, rms_roughness_region, strip_averaged_profile,
    wrinkling_amplitude, Connectivity, Detrend, GrayImage, HeightMap, ProfileAxis,
    DARK_THRESHOLD_DEFAULT, ONSET_EXCLUSION_DEFAULT,
};

use crate::commands::require_out;
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, fmt_f64, print_json, write_csv, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Region RMS roughness plus wrinkling amplitude of a height map.
    Roughness,
    /// Elevation-versus-fluence line fit with an onset intercept.
    ElevationFit,
    /// Dark-area fraction and region size per depth row of a micrograph.
    DarkContrast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConnectivityArg {
    Four,
    Eight,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Height-map CSV (roughness), elevation CSV (elevation-fit), or PGM
    /// micrograph (dark-contrast).
    #[arg(long)]
    pub input: PathBuf,
    /// Averaging-strip width for the wrinkling profile [nm]; defaults to a
    /// third of the map extent.
    #[arg(long)]
    pub strip_width_nm: Option<f64>,
    /// Ignore points below this fluence in the elevation fit.
    #[arg(long, default_value_t = ONSET_EXCLUSION_DEFAULT)]
    pub exclude_below: f64,
    /// Micrograph pixel pitch [nm].
    #[arg(long)]
    pub pixel_size_nm: Option<f64>,
    /// Depth of the first micrograph row [nm].
    #[arg(long, default_value_t = 0.0)]
    pub depth_start_nm: f64,
    /// Background-window side for the dark mask [pixels], odd.
    #[arg(long, default_value_t = 31)]
    pub window: usize,
    /// Dark threshold in local standard deviations below the local mean.
    #[arg(long, default_value_t = DARK_THRESHOLD_DEFAULT)]
    pub threshold_k: f64,
    #[arg(long, value_enum, default_value_t = ConnectivityArg::Eight)]
    pub connectivity: ConnectivityArg,
}

#[derive(Debug, Serialize)]
struct RoughnessReport {
    pixel_size_nm: f64,
    rows: usize,
    cols: usize,
    rms_mean_detrend_nm: f64,
    rms_plane_detrend_nm: f64,
    wrinkling_range_nm: f64,
    wrinkling_rms_nm: f64,
}

fn run_roughness(args: &Args, out: Option<&Path>) -> CliResult<()> {
    let (pixel_size, heights) = read_matrix_csv(&args.input)?;
    let map = HeightMap { heights, pixel_size };
    let rows = map.heights.nrows();
    let cols = map.heights.ncols();
    let strip = args
        .strip_width_nm
        .unwrap_or_else(|| (rows as f64 * pixel_size / 3.0).max(pixel_size));
    let profile = strip_averaged_profile(&map, ProfileAxis::Horizontal, strip)?;
    let profile_heights: Vec<f64> = profile.iter().map(|&(_, h)| h).collect();
    let wrinkling = wrinkling_amplitude(&profile_heights)?;
    let report = RoughnessReport {
        pixel_size_nm: pixel_size,
        rows,
        cols,
        rms_mean_detrend_nm: rms_roughness_region(&map, Detrend::Mean)?,
        rms_plane_detrend_nm: rms_roughness_region(&map, Detrend::Linear)?,
        wrinkling_range_nm: wrinkling.range,
        wrinkling_rms_nm: wrinkling.rms,
    };
    print_json(&report)?;
    eprintln!(
        "analyze-surface: {} x {} map -> rms {:.4} nm (plane detrend), wrinkling range {:.4} nm",
        rows, cols, report.rms_plane_detrend_nm, report.wrinkling_range_nm
    );
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join("roughness.json"), &report)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OnsetReport {
    exclusion_below_ions_per_nm2: f64,
    points_used: usize,
    slope_nm_per_ion_nm2: f64,
    onset_fluence_ions_per_nm2: f64,
}

fn run_elevation_fit(args: &Args, out: Option<&Path>) -> CliResult<()> {
    let table = read_xy_csv(&args.input)?;
    let expect = ("fluence_ions_per_nm2", "elevation_nm");
    if !table.x_label.eq_ignore_ascii_case(expect.0)
        || !table.y_label.eq_ignore_ascii_case(expect.1)
    {
        return Err(CliError::config(format!(
            "{}: expected header {},{} but found {},{}",
            args.input.display(),
            expect.0,
            expect.1,
            table.x_label,
            table.y_label
        )));
    }
    let fit = elevation_onset_fit(&table.rows, args.exclude_below)?;
    let report = OnsetReport {
        exclusion_below_ions_per_nm2: args.exclude_below,
        points_used: table.rows.iter().filter(|&&(f, _)| f >= args.exclude_below).count(),
        slope_nm_per_ion_nm2: fit.slope,
        onset_fluence_ions_per_nm2: fit.intercept_fluence,
    };
    print_json(&report)?;
    eprintln!(
        "analyze-surface: onset at {:.2} ions/nm^2, slope {:.6} nm per ion/nm^2",
        report.onset_fluence_ions_per_nm2, report.slope_nm_per_ion_nm2
    );
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join("elevation_fit.json"), &report)?;
    }
    Ok(())
}

fn run_dark_contrast(args: &Args, out: Option<&Path>) -> CliResult<()> {
    let pixel_size = args.pixel_size_nm.ok_or_else(|| {
        CliError::config("dark-contrast needs --pixel-size-nm")
    })?;
    let out = require_out(out)?;
    let pgm = read_pgm(&args.input)?;
    let intensities = Array2::from_shape_vec(
        (pgm.height, pgm.width),
        pgm.pixels.iter().map(|&p| f64::from(p)).collect(),
    )
    .expect("pgm dimensions were validated on read");
    let image = GrayImage::with_affine_depth(intensities, args.depth_start_nm, pixel_size)?;
    let connectivity = match args.connectivity {
        ConnectivityArg::Four => Connectivity::Four,
        ConnectivityArg::Eight => Connectivity::Eight,
    };
    let contrast = dark_contrast_by_depth(&image, args.window, args.threshold_k, connectivity)?;
    let rows: Vec<Vec<String>> = contrast
        .iter()
        .map(|c| vec![fmt_f64(c.depth), fmt_f64(c.area_fraction), fmt_f64(c.mean_region_size)])
        .collect();
    write_csv(
        &out.join("dark_contrast.csv"),
        "depth_nm,dark_area_fraction,mean_region_size_nm2",
        &rows,
    )?;
    let peak = contrast
        .iter()
        .max_by(|a, b| a.area_fraction.total_cmp(&b.area_fraction))
        .expect("a validated image has at least one row");
    println!(
        "analyze-surface: {} depth rows, dark-area peak {:.4} at {:.1} nm",
        contrast.len(),
        peak.area_fraction,
        peak.depth
    );
    Ok(())
}

pub fn run(args: &Args, out: Option<&Path>) -> CliResult<()> {
    match args.mode {
        Mode::Roughness => run_roughness(args, out),
        Mode::ElevationFit => run_elevation_fit(args, out),
        Mode::DarkContrast => run_dark_contrast(args, out),
    }
}
