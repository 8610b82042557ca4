//! `snspd extract-sigma` — thermal coupling from a measured retrapping
//! current.

use std::path::Path;

use serde::Serialize;

use snspd_core::film::sigma_from_retrapping;
use snspd_core::units::{m_to_nm, ua_to_a};

use crate::commands::load_config;
use crate::error::CliResult;
use crate::output::{ensure_dir, print_json, write_json};

#[derive(Debug, Serialize)]
struct SigmaRecord {
    measured_retrapping_ua: f64,
    sigma_w_per_m2_k4: f64,
    tc_k: f64,
    substrate_temperature_k: f64,
    sheet_resistance_ohm_per_sq: f64,
    thickness_nm: f64,
}

pub fn run(config: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let config = load_config(config)?;
    let film = config.material()?.film()?;
    let geom = config.geometry()?.wire()?;
    let section = config.sigma_extraction()?;

    let i_r = ua_to_a(section.measured_retrapping_ua);
    let sigma = sigma_from_retrapping(i_r, &film, &geom)?;
    let record = SigmaRecord {
        measured_retrapping_ua: section.measured_retrapping_ua,
        sigma_w_per_m2_k4: sigma,
        tc_k: film.tc,
        substrate_temperature_k: geom.substrate_temperature,
        sheet_resistance_ohm_per_sq: film.sheet_resistance,
        thickness_nm: m_to_nm(film.thickness),
    };
    print_json(&record)?;
    eprintln!(
        "extract-sigma: I_r {} uA -> sigma {:.4} W/m^2 K^4",
        section.measured_retrapping_ua, sigma
    );
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join("sigma.json"), &record)?;
    }
    Ok(())
}
