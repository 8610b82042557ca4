//! `snspd simulate` — one hotspot transient plus the retrapping search.

use std::path::Path;

use snspd_core::film::retrapping_current_analytic;
use snspd_core::thermal::{find_retrapping_current, step, ThermalSimState};
use snspd_core::units::{a_to_ua, m_to_um, s_to_ns};

use crate::commands::{load_config, require_out};
use crate::error::CliResult;
use crate::output::{fmt_f64, write_csv};

pub fn run(config: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let config = load_config(config)?;
    let film = config.material()?.film()?;
    let geom = config.geometry()?.wire()?;
    let solver = config.solver()?;
    let sim = config.simulate()?;
    let out = require_out(out)?;

    let bias = sim.bias();
    let seed_energy = sim.seed_energy();
    let mut state =
        ThermalSimState::with_gaussian_bump(&film, &geom, &solver, bias, seed_energy, 0.5)?;

    let record = |s: &ThermalSimState| {
        vec![
            fmt_f64(s_to_ns(s.time)),
            fmt_f64(s.max_temperature()),
            fmt_f64(m_to_um(s.normal_domain_length())),
        ]
    };
    let mut trace = vec![record(&state)];
    // Mirror the lifetime probe: run until the normal domain dies, the
    // field is steady, or the step budget runs out.
    let mut outcome = "sustained";
    let mut lifetime = f64::INFINITY;
    if state.normal_node_count() == 0 {
        outcome = "decayed";
        lifetime = 0.0;
    } else {
        for step_index in 1..=solver.max_steps {
            let next = step(&state, &film, &geom, &solver)?;
            let dt = next.time - state.time;
            let max_delta = state
                .temperatures
                .iter()
                .zip(&next.temperatures)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            state = next;
            let done_decayed = state.normal_node_count() == 0;
            let done_steady = max_delta < solver.steady_tolerance * dt;
            if step_index % sim.record_every == 0 || done_decayed || done_steady {
                trace.push(record(&state));
            }
            if done_decayed {
                outcome = "decayed";
                lifetime = state.time;
                break;
            }
            if done_steady {
                break;
            }
        }
    }
    write_csv(&out.join("trace.csv"), "time_ns,max_t_k,normal_length_um", &trace)?;

    let ir_analytic = retrapping_current_analytic(&film, &geom)?;
    let ir_pde = find_retrapping_current(&film, &geom, &solver)?;
    let lifetime_cell =
        if lifetime.is_finite() { fmt_f64(s_to_ns(lifetime)) } else { String::new() };
    write_csv(
        &out.join("summary.csv"),
        "bias_ua,seed_energy_aj,ir_analytic_ua,ir_pde_ua,hotspot_lifetime_ns,outcome",
        &[vec![
            fmt_f64(sim.bias_ua),
            fmt_f64(sim.seed_energy_aj),
            fmt_f64(a_to_ua(ir_analytic)),
            fmt_f64(a_to_ua(ir_pde)),
            lifetime_cell,
            outcome.to_owned(),
        ]],
    )?;

    println!(
        "simulate: bias {} uA, seed {} aJ -> {} (I_r analytic {:.4} uA, solver {:.4} uA)",
        sim.bias_ua,
        sim.seed_energy_aj,
        outcome,
        a_to_ua(ir_analytic),
        a_to_ua(ir_pde)
    );
    Ok(())
}
