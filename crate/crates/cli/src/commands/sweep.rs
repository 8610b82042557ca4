//! `snspd sweep` — the fluence curve evaluated over a list of values,
//! concurrently but with deterministic, input-ordered output.

use std::path::Path;

use rayon::prelude::*;

use snspd_core::film::{
    retrapping_current_analytic, sheet_resistance_at_fluence, tc_from_sheet_resistance, FilmState,
};
use snspd_core::thermal::find_retrapping_current;
use snspd_core::units::a_to_ua;

use crate::commands::{load_config, require_out};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, write_csv};

struct Row {
    r_sheet: f64,
    tc: f64,
    sigma: f64,
    ir_analytic: f64,
    ir_pde: Option<f64>,
}

pub fn run(config: Option<&Path>, out: Option<&Path>, workers: Option<usize>) -> CliResult<()> {
    let config = load_config(config)?;
    let material = config.material()?;
    let film0 = material.film()?;
    let curve = material.fluence_curve()?.params();
    let sigma_model = match &material.sigma_curve {
        Some(section) => Some(section.model()?),
        None => None,
    };
    let geom = config.geometry()?.wire()?;
    let solver = config.solver()?;
    let sweep = config.sweep()?;
    let out = require_out(out)?;

    let evaluate = |fluence: f64| -> CliResult<Row> {
        let r_sheet = sheet_resistance_at_fluence(&curve, fluence)?;
        let tc = tc_from_sheet_resistance(&curve, r_sheet, film0.thickness)?;
        let sigma = sigma_model
            .as_ref()
            .map_or(film0.coupling_sigma, |m| m.eval(fluence));
        let film = FilmState { tc, sheet_resistance: r_sheet, coupling_sigma: sigma, ..film0.clone() };
        let ir_analytic = retrapping_current_analytic(&film, &geom)?;
        let ir_pde = if sweep.include_pde {
            Some(find_retrapping_current(&film, &geom, &solver)?)
        } else {
            None
        };
        Ok(Row { r_sheet, tc, sigma, ir_analytic, ir_pde })
    };

    // A scoped pool keeps --workers local to this run; par_iter + collect
    // preserves input order regardless of completion order.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("worker pool: {e}")))?;
    let results: Vec<CliResult<Row>> =
        pool.install(|| sweep.values.par_iter().map(|&f| evaluate(f)).collect());

    let mut rows = Vec::with_capacity(results.len());
    for (&fluence, result) in sweep.values.iter().zip(&results) {
        match result {
            Ok(row) => {
                println!(
                    "sweep: fluence {fluence} -> R {:.2} ohm/sq, Tc {:.4} K, I_r {:.4} uA",
                    row.r_sheet,
                    row.tc,
                    a_to_ua(row.ir_analytic)
                );
                rows.push(vec![
                    fmt_f64(fluence),
                    fmt_f64(row.r_sheet),
                    fmt_f64(row.tc),
                    fmt_f64(row.sigma),
                    fmt_f64(a_to_ua(row.ir_analytic)),
                    row.ir_pde.map(|i| fmt_f64(a_to_ua(i))).unwrap_or_default(),
                    "ok".to_owned(),
                ]);
            }
            Err(err) => {
                println!("sweep: fluence {fluence} -> failed: {err}");
                rows.push(vec![
                    fmt_f64(fluence),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "failed".to_owned(),
                ]);
            }
        }
    }
    write_csv(
        &out.join("sweep.csv"),
        "fluence_ions_per_nm2,r_sheet_ohm_per_sq,tc_k,sigma_w_per_m2_k4,ir_analytic_ua,ir_pde_ua,status",
        &rows,
    )?;
    Ok(())
}
