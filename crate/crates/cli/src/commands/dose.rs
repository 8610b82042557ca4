//! `snspd dose` — lateral received-fraction and stopping-depth profiles.

use std::path::Path;

use snspd_core::dose::lateral_fraction_at;
use snspd_core::math::interp_table;

use crate::commands::{load_config, require_out};
use crate::error::CliResult;
use crate::output::{fmt_f64, write_csv};

pub fn run(config: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let config = load_config(config)?;
    let dose = config.dose()?;
    let out = require_out(out)?;

    let (pattern, fwhm) = dose.pattern_and_fwhm()?;
    let grid = dose.x_grid();
    let mut rows = Vec::with_capacity(grid.len());
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &x in &grid {
        let f = lateral_fraction_at(&pattern, fwhm, x)?;
        min = min.min(f);
        max = max.max(f);
        rows.push(vec![fmt_f64(x), fmt_f64(f)]);
    }
    write_csv(&out.join("lateral_fraction.csv"), "x_nm,received_fraction", &rows)?;

    let model = dose.model()?;
    let depth_rows: Vec<Vec<String>> = model
        .depth_pdf
        .iter()
        .map(|&(z, density)| {
            let energy = interp_table(&model.energy_deposition, z);
            vec![fmt_f64(z), fmt_f64(density), fmt_f64(energy)]
        })
        .collect();
    write_csv(
        &out.join("depth_profile.csv"),
        "z_nm,stopping_density_per_nm,deposited_energy_ev_per_ion_nm",
        &depth_rows,
    )?;

    println!(
        "dose: pattern {} at fwhm {} nm -> fraction range [{:.4}, {:.4}] over [{}, {}] nm; wrote {} lateral and {} depth rows",
        dose.pattern, dose.fwhm_nm, min, max, dose.x_min_nm, dose.x_max_nm,
        rows.len(),
        depth_rows.len()
    );
    Ok(())
}
