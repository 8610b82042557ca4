//! 1D finite-difference solver of the nanowire heat-flow balance
//! J²ρ + κ·∂²T/∂x² − (σ/d)·(T⁴ − T_sub⁴) = C·∂T/∂t
//! with a normal/superconducting phase field: steady states, hotspot
//! transients, and the self-sustaining-domain (retrapping) threshold.
//!
//! Joule heating acts only on normal-phase nodes; a node is normal iff
//! T > T_c after the temperature update (no current-driven criterion —
//! switching currents are inputs, not outputs, of this model).

use crate::error::{Error, Result};
use crate::film::{retrapping_current_analytic, FilmState, WireGeometry};

/// Node phase. Stored per node alongside the temperature field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Superconducting,
    Normal,
}

/// Time integration scheme. Implicit is backward-Euler in the diffusion
/// term (unconditionally stable, larger steps); sources stay explicit in
/// both schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Explicit,
    Implicit,
}

/// End condition at the wire terminations: heat-sinking contact pads
/// (`Dirichlet`, T = T_sub) or insulated ends (`Neumann`, zero flux).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// Solver knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Number of grid nodes over the wire length (>= 3).
    pub node_count: usize,
    /// Time step [s]; `None` derives it from the diffusive CFL limit
    /// 0.5·C·dx²/κ (0.4× the limit when explicit, 10× when implicit).
    pub dt: Option<f64>,
    /// Step budget per relaxation.
    pub max_steps: usize,
    /// Steady-state declaration: max temperature rate |ΔT|/dt below this
    /// [K/s], so the verdict does not depend on the step size.
    pub steady_tolerance: f64,
    pub scheme: Scheme,
    pub boundary: Boundary,
    /// Bisection termination for the retrapping search, as a fraction of
    /// the bracket top [dimensionless].
    pub current_tolerance: f64,
}

impl SolverConfig {
    /// Defaults sized for the standard 25.8 µm wire: 10 nm node spacing,
    /// implicit stepping, and a step budget that lets the slowest cooling
    /// transients (weak substrate coupling) settle to `steady_tolerance`.
    pub fn standard() -> SolverConfig {
        SolverConfig {
            node_count: 2581,
            dt: None,
            max_steps: 60_000,
            steady_tolerance: 100.0,
            scheme: Scheme::Implicit,
            boundary: Boundary::Dirichlet,
            current_tolerance: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 3 {
            return Err(Error::domain(format!(
                "node_count must be >= 3, got {}",
                self.node_count
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::domain("max_steps must be >= 1"));
        }
        if !(self.steady_tolerance > 0.0) || !self.steady_tolerance.is_finite() {
            return Err(Error::domain(format!(
                "steady_tolerance must be > 0, got {}",
                self.steady_tolerance
            )));
        }
        if !(self.current_tolerance > 0.0 && self.current_tolerance < 1.0) {
            return Err(Error::domain(format!(
                "current_tolerance must be in (0, 1), got {}",
                self.current_tolerance
            )));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::domain(format!("dt must be > 0, got {dt}")));
            }
        }
        Ok(())
    }
}

/// The evolving simulation state: temperature and phase per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSimState {
    /// Node temperatures [K].
    pub temperatures: Vec<f64>,
    /// Node phases; Joule heating acts where `Normal`.
    pub phase: Vec<Phase>,
    /// Bias current [A].
    pub bias_current: f64,
    /// Node spacing [m].
    pub grid_spacing: f64,
    /// Elapsed simulation time [s].
    pub time: f64,
}

impl ThermalSimState {
    fn phases_from_temperatures(temps: &[f64], tc: f64) -> Vec<Phase> {
        temps
            .iter()
            .map(|&t| if t > tc { Phase::Normal } else { Phase::Superconducting })
            .collect()
    }

    /// Uniform-temperature state on the configured grid.
    pub fn uniform(
        film: &FilmState,
        geom: &WireGeometry,
        config: &SolverConfig,
        bias_current: f64,
        temperature: f64,
    ) -> Result<ThermalSimState> {
        config.validate()?;
        geom.check_film(film)?;
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::domain(format!(
                "temperature must be >= 0 K, got {temperature}"
            )));
        }
        if !(bias_current >= 0.0) || !bias_current.is_finite() {
            return Err(Error::domain(format!(
                "bias current must be >= 0 A, got {bias_current}"
            )));
        }
        let n = config.node_count;
        let temperatures = vec![temperature; n];
        let phase = Self::phases_from_temperatures(&temperatures, film.tc);
        Ok(ThermalSimState {
            temperatures,
            phase,
            bias_current,
            grid_spacing: geom.length / (n - 1) as f64,
            time: 0.0,
        })
    }

    /// Bath-temperature state with the central 5 % of nodes forced normal
    /// at 2·T_c — the nucleation seed for retrapping searches.
    pub fn with_seeded_domain(
        film: &FilmState,
        geom: &WireGeometry,
        config: &SolverConfig,
        bias_current: f64,
    ) -> Result<ThermalSimState> {
        let mut state =
            Self::uniform(film, geom, config, bias_current, geom.substrate_temperature)?;
        let n = state.temperatures.len();
        let seed = ((n as f64 * 0.05).round() as usize).clamp(1, n - 2);
        let start = (n - seed) / 2;
        for t in &mut state.temperatures[start..start + seed] {
            *t = 2.0 * film.tc;
        }
        state.phase = Self::phases_from_temperatures(&state.temperatures, film.tc);
        Ok(state)
    }

    /// Bath-temperature state plus a Gaussian temperature bump carrying
    /// `seed_energy` joules, centered at `center_fraction` of the wire
    /// length with spatial width equal to the wire width.
    pub fn with_gaussian_bump(
        film: &FilmState,
        geom: &WireGeometry,
        config: &SolverConfig,
        bias_current: f64,
        seed_energy: f64,
        center_fraction: f64,
    ) -> Result<ThermalSimState> {
        let mut state =
            Self::uniform(film, geom, config, bias_current, geom.substrate_temperature)?;
        if !(seed_energy >= 0.0) || !seed_energy.is_finite() {
            return Err(Error::domain(format!(
                "seed energy must be >= 0 J, got {seed_energy}"
            )));
        }
        if !(0.0..=1.0).contains(&center_fraction) {
            return Err(Error::domain(format!(
                "center fraction must be in [0, 1], got {center_fraction}"
            )));
        }
        // E = integral of C·dT·A dx with dT = dT0·exp(-(x-x0)^2/(2 w^2))
        // gives dT0 = E / (C·A·sqrt(2 pi)·w).
        let w = geom.width;
        let dt0 = seed_energy
            / (film.specific_heat * geom.cross_section() * (2.0 * std::f64::consts::PI).sqrt() * w);
        let x0 = center_fraction * geom.length;
        let dx = state.grid_spacing;
        for (i, t) in state.temperatures.iter_mut().enumerate() {
            let x = i as f64 * dx;
            *t += dt0 * (-(x - x0) * (x - x0) / (2.0 * w * w)).exp();
        }
        state.phase = Self::phases_from_temperatures(&state.temperatures, film.tc);
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.temperatures.len();
        if n < 3 {
            return Err(Error::domain(format!("state needs >= 3 nodes, got {n}")));
        }
        if self.phase.len() != n {
            return Err(Error::domain("phase and temperature arrays must match"));
        }
        if !(self.grid_spacing > 0.0) {
            return Err(Error::domain("grid spacing must be > 0"));
        }
        if self.temperatures.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::domain("temperatures must be finite and >= 0"));
        }
        if !(self.bias_current >= 0.0) || !self.bias_current.is_finite() {
            return Err(Error::domain("bias current must be finite and >= 0"));
        }
        Ok(())
    }

    /// Number of normal-phase nodes.
    pub fn normal_node_count(&self) -> usize {
        self.phase.iter().filter(|p| **p == Phase::Normal).count()
    }

    /// Total normal-domain extent [m].
    pub fn normal_domain_length(&self) -> f64 {
        self.normal_node_count() as f64 * self.grid_spacing
    }

    /// Peak temperature [K].
    pub fn max_temperature(&self) -> f64 {
        self.temperatures.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-step energy bookkeeping [J]. For Dirichlet ends the stored change is
/// counted over interior nodes (the clamped ends are the reservoir); for
/// Neumann over all nodes. In both cases
/// `stored_delta = joule_input − substrate_loss − boundary_loss`
/// holds to round-off by construction of the update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    /// Joule heat deposited on normal nodes this step.
    pub joule_input: f64,
    /// Heat radiated into the substrate through the T⁴ channel.
    pub substrate_loss: f64,
    /// Net heat conducted out through the wire ends.
    pub boundary_loss: f64,
    /// Change of Σ C·T·A·dx over the counted nodes.
    pub stored_delta: f64,
}

impl EnergyBudget {
    /// Bookkeeping residual: zero up to floating-point cancellation.
    pub fn residual(&self) -> f64 {
        self.stored_delta - (self.joule_input - self.substrate_loss - self.boundary_loss)
    }
}

struct StepStats {
    budget: EnergyBudget,
    max_delta: f64,
    min_temp: f64,
}

/// Precomputed per-run quantities plus scratch buffers, so stepping inside
/// search loops does not allocate.
struct Engine {
    dt: f64,
    tc: f64,
    tsub: f64,
    /// κ/(C dx²) [1/s]
    diffusion_rate: f64,
    /// J²ρ/C on normal nodes [K/s]
    joule_rate: f64,
    /// σ/(d C) [1/(s K³)] times (T⁴−T_sub⁴) gives the cooling rate
    cooling_coeff: f64,
    /// C·A·dx [J/K] per node
    node_heat_capacity: f64,
    /// κ·A/dx [W/K]
    end_conductance: f64,
    scheme: Scheme,
    boundary: Boundary,
    // Backward-Euler factorization (constant in time): modified
    // super-diagonal and inverse pivots of the Thomas elimination.
    sup: Vec<f64>,
    inv_pivot: Vec<f64>,
    sub: Vec<f64>,
    rhs: Vec<f64>,
    next: Vec<f64>,
}

/// Fraction of node i's grid cell where the piecewise-linear temperature
/// field exceeds `tc`. Gating the Joule term per whole node quantizes wall
/// motion in units of dx and degrades grid convergence of threshold
/// currents to ~sqrt(dx); the subcell fill keeps the model (dissipation
/// strictly where T > tc) while letting the wall move smoothly.
fn joule_fill(temps: &[f64], i: usize, tc: f64) -> f64 {
    // Measure of {s in [s0, s1] : a + (b - a)s > tc} relative to s1 - s0.
    fn above(a: f64, b: f64, tc: f64, s0: f64, s1: f64) -> f64 {
        if a == b {
            return if a > tc { 1.0 } else { 0.0 };
        }
        let crossing = (tc - a) / (b - a);
        if b > a {
            let lo = crossing.clamp(s0, s1);
            (s1 - lo) / (s1 - s0)
        } else {
            let hi = crossing.clamp(s0, s1);
            (hi - s0) / (s1 - s0)
        }
    }
    let n = temps.len();
    let half = |inner: f64| if inner > tc { 1.0 } else { 0.0 };
    let left = if i == 0 {
        half(temps[0])
    } else {
        above(temps[i - 1], temps[i], tc, 0.5, 1.0)
    };
    let right = if i == n - 1 {
        half(temps[n - 1])
    } else {
        above(temps[i], temps[i + 1], tc, 0.0, 0.5)
    };
    0.5 * (left + right)
}

impl Engine {
    fn new(
        film: &FilmState,
        geom: &WireGeometry,
        config: &SolverConfig,
        state: &ThermalSimState,
    ) -> Result<Engine> {
        config.validate()?;
        geom.check_film(film)?;
        state.validate()?;
        let n = state.temperatures.len();
        let dx = state.grid_spacing;
        let wire_span = dx * (n - 1) as f64;
        if ((wire_span - geom.length) / geom.length).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "grid span {wire_span} m does not match wire length {} m",
                geom.length
            )));
        }
        let c = film.specific_heat;
        let kappa = film.thermal_conductivity;
        let cfl_limit = if kappa > 0.0 { 0.5 * c * dx * dx / kappa } else { f64::INFINITY };
        let dt = match config.dt {
            Some(dt) => {
                if config.scheme == Scheme::Explicit && dt > cfl_limit {
                    return Err(Error::domain(format!(
                        "explicit dt {dt} s exceeds the CFL limit {cfl_limit} s"
                    )));
                }
                dt
            }
            None => {
                if !cfl_limit.is_finite() {
                    return Err(Error::domain(
                        "dt cannot be auto-derived with zero thermal conductivity; set dt",
                    ));
                }
                match config.scheme {
                    Scheme::Explicit => 0.4 * cfl_limit,
                    Scheme::Implicit => {
                        // Diffusion is unconditionally stable, but the damped
                        // source term is only first-order accurate, so the
                        // step must still resolve the substrate relaxation
                        // time C d / (4 sigma T^3) near the transition.
                        let source_time = if film.coupling_sigma > 0.0 {
                            c * film.thickness
                                / (4.0 * film.coupling_sigma * film.tc.powi(3))
                        } else {
                            f64::INFINITY
                        };
                        (10.0 * cfl_limit).min(0.125 * source_time)
                    }
                }
            }
        };
        let area = geom.cross_section();
        let j = state.bias_current / area;
        let mut engine = Engine {
            dt,
            tc: film.tc,
            tsub: geom.substrate_temperature,
            diffusion_rate: kappa / (c * dx * dx),
            joule_rate: j * j * film.resistivity() / c,
            cooling_coeff: film.coupling_sigma / (film.thickness * c),
            node_heat_capacity: c * area * dx,
            end_conductance: kappa * area / dx,
            scheme: config.scheme,
            boundary: config.boundary,
            sup: Vec::new(),
            inv_pivot: Vec::new(),
            sub: Vec::new(),
            rhs: vec![0.0; n],
            next: vec![0.0; n],
        };
        if engine.scheme == Scheme::Implicit {
            engine.factorize(n);
        }
        Ok(engine)
    }

    /// Thomas-eliminates the constant backward-Euler matrix once: interior
    /// rows (−α, 1+2α, −α); boundary rows are identity for Dirichlet or
    /// mirror-ghost (1+2α, −2α) for Neumann.
    fn factorize(&mut self, n: usize) {
        let alpha = self.dt * self.diffusion_rate;
        let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        match self.boundary {
            Boundary::Dirichlet => {
                diag[0] = 1.0;
                diag[n - 1] = 1.0;
            }
            Boundary::Neumann => {
                diag[0] = 1.0 + 2.0 * alpha;
                sup[0] = -2.0 * alpha;
                diag[n - 1] = 1.0 + 2.0 * alpha;
                sub[n - 1] = -2.0 * alpha;
            }
        }
        for i in 1..n - 1 {
            sub[i] = -alpha;
            diag[i] = 1.0 + 2.0 * alpha;
            sup[i] = -alpha;
        }
        // Forward elimination with stored multipliers.
        let mut inv_pivot = vec![0.0; n];
        let mut pivot = diag[0];
        inv_pivot[0] = 1.0 / pivot;
        for i in 1..n {
            let m = sub[i] * inv_pivot[i - 1];
            sub[i] = m;
            pivot = diag[i] - m * sup[i - 1];
            inv_pivot[i] = 1.0 / pivot;
        }
        self.sup = sup;
        self.inv_pivot = inv_pivot;
        self.sub = sub;
    }

    /// Advances temperatures and phases by one step in place, returning the
    /// per-step statistics. Does not allocate.
    fn advance(&mut self, temps: &mut Vec<f64>, phase: &mut [Phase]) -> StepStats {
        let n = temps.len();
        let dt = self.dt;
        let tsub = self.tsub;
        let tsub4 = tsub * tsub * tsub * tsub;
        let mut joule = 0.0;
        let mut substrate = 0.0;
        // Source terms at the old time level, on evolving nodes only.
        let evolving = match self.boundary {
            Boundary::Dirichlet => 1..n - 1,
            Boundary::Neumann => 0..n,
        };
        for i in evolving.clone() {
            let t = temps[i];
            let q = self.joule_rate * joule_fill(temps, i, self.tc);
            let cool = self.cooling_coeff * (t * t * t * t - tsub4);
            self.rhs[i] = match self.scheme {
                // Explicit also applies diffusion from the old field here.
                Scheme::Explicit => {
                    let left = if i == 0 { temps[1] } else { temps[i - 1] };
                    let right = if i == n - 1 { temps[n - 2] } else { temps[i + 1] };
                    joule += q;
                    substrate += cool;
                    t + dt * (self.diffusion_rate * (left - 2.0 * t + right) + q - cool)
                }
                Scheme::Implicit => {
                    // The implicit steps can exceed the substrate term's
                    // explicit stability limit on hot nodes, so damp the net
                    // source by its own linearization 1 + dt |d(net)/dT|.
                    // Zeros of the net source stay exact fixed points, and a
                    // cooling step can never undershoot the bath at any dt.
                    let damping = 1.0 + dt * 4.0 * self.cooling_coeff * t * t * t;
                    joule += q / damping;
                    substrate += cool / damping;
                    t + dt * (q - cool) / damping
                }
            };
        }
        let energy_scale = dt * self.node_heat_capacity;
        let joule_input = joule * energy_scale;
        let substrate_loss = substrate * energy_scale;

        match self.scheme {
            Scheme::Explicit => {
                self.next.clear();
                self.next.extend_from_slice(temps);
                if self.boundary == Boundary::Dirichlet {
                    self.next[0] = tsub;
                    self.next[n - 1] = tsub;
                }
                for i in evolving {
                    self.next[i] = self.rhs[i];
                }
            }
            Scheme::Implicit => {
                if self.boundary == Boundary::Dirichlet {
                    self.rhs[0] = tsub;
                    self.rhs[n - 1] = tsub;
                }
                // Substitution passes of the prefactored Thomas elimination.
                self.next[0] = self.rhs[0];
                for i in 1..n {
                    self.next[i] = self.rhs[i] - self.sub[i] * self.next[i - 1];
                }
                let last = n - 1;
                self.next[last] *= self.inv_pivot[last];
                for i in (0..last).rev() {
                    self.next[i] = (self.next[i] - self.sup[i] * self.next[i + 1]) * self.inv_pivot[i];
                }
            }
        }

        // Boundary flux and stored-heat change, with the field the diffusion
        // operator actually used (old for explicit, new for implicit).
        let flux_field: &[f64] = match self.scheme {
            Scheme::Explicit => &temps[..],
            Scheme::Implicit => &self.next[..],
        };
        let boundary_loss = match self.boundary {
            Boundary::Dirichlet => {
                self.end_conductance
                    * dt
                    * ((flux_field[1] - flux_field[0]) + (flux_field[n - 2] - flux_field[n - 1]))
            }
            // Mirror-ghost ends leak only the discretization imbalance.
            Boundary::Neumann => {
                self.end_conductance
                    * dt
                    * ((flux_field[0] - flux_field[1]) + (flux_field[n - 1] - flux_field[n - 2]))
            }
        };
        let counted = match self.boundary {
            Boundary::Dirichlet => 1..n - 1,
            Boundary::Neumann => 0..n,
        };
        let mut stored = 0.0;
        let mut max_delta = 0.0f64;
        let mut min_temp = f64::INFINITY;
        for i in counted {
            stored += self.next[i] - temps[i];
        }
        for i in 0..n {
            let d = (self.next[i] - temps[i]).abs();
            if d > max_delta {
                max_delta = d;
            }
            if self.next[i] < min_temp {
                min_temp = self.next[i];
            }
        }
        let stored_delta = stored * self.node_heat_capacity;

        std::mem::swap(temps, &mut self.next);
        for i in 0..n {
            phase[i] = if temps[i] > self.tc { Phase::Normal } else { Phase::Superconducting };
        }
        StepStats {
            budget: EnergyBudget { joule_input, substrate_loss, boundary_loss, stored_delta },
            max_delta,
            min_temp,
        }
    }
}

fn check_stability(stats: &StepStats, time: f64) -> Result<()> {
    if !stats.max_delta.is_finite() || !(stats.min_temp >= 0.0) {
        return Err(Error::stability(format!(
            "temperature field left [0, inf) at t = {time} s; reduce dt"
        )));
    }
    Ok(())
}

/// Advances the state by one time step, returning the new state and the
/// step's energy budget.
pub fn step_with_budget(
    state: &ThermalSimState,
    film: &FilmState,
    geom: &WireGeometry,
    config: &SolverConfig,
) -> Result<(ThermalSimState, EnergyBudget)> {
    let mut engine = Engine::new(film, geom, config, state)?;
    let mut out = state.clone();
    let stats = engine.advance(&mut out.temperatures, &mut out.phase);
    out.time += engine.dt;
    check_stability(&stats, out.time)?;
    Ok((out, stats.budget))
}

/// Advances the state by one time step.
pub fn step(
    state: &ThermalSimState,
    film: &FilmState,
    geom: &WireGeometry,
    config: &SolverConfig,
) -> Result<ThermalSimState> {
    step_with_budget(state, film, geom, config).map(|(s, _)| s)
}

/// Result of [`relax_to_steady`].
#[derive(Debug, Clone)]
pub struct RelaxOutcome {
    pub state: ThermalSimState,
    /// True when the max temperature rate fell below `steady_tolerance`
    /// within the step budget; false is non-convergence, never silent.
    pub converged: bool,
    /// Steps actually taken.
    pub steps: usize,
    /// Final per-step max |ΔT| [K].
    pub last_delta: f64,
}

/// Iterates [`step`] until the field is steady (max rate |ΔT|/dt below
/// `config.steady_tolerance`) or the step budget runs out.
pub fn relax_to_steady(
    state: &ThermalSimState,
    film: &FilmState,
    geom: &WireGeometry,
    config: &SolverConfig,
) -> Result<RelaxOutcome> {
    let mut engine = Engine::new(film, geom, config, state)?;
    let mut out = state.clone();
    let mut last_delta = f64::INFINITY;
    for steps in 1..=config.max_steps {
        let stats = engine.advance(&mut out.temperatures, &mut out.phase);
        out.time += engine.dt;
        check_stability(&stats, out.time)?;
        last_delta = stats.max_delta;
        if last_delta < config.steady_tolerance * engine.dt {
            return Ok(RelaxOutcome { state: out, converged: true, steps, last_delta });
        }
    }
    Ok(RelaxOutcome { state: out, converged: false, steps: config.max_steps, last_delta })
}

/// Survival probe for the retrapping search: does a seeded normal domain
/// still exist once the field is steady? Exits early the moment the domain
/// collapses; a steady field with a domain (or an exhausted step budget
/// with the domain alive) counts as surviving.
fn seeded_domain_survives(
    film: &FilmState,
    geom: &WireGeometry,
    config: &SolverConfig,
    bias: f64,
) -> Result<bool> {
    let state = ThermalSimState::with_seeded_domain(film, geom, config, bias)?;
    let mut engine = Engine::new(film, geom, config, &state)?;
    let mut temps = state.temperatures;
    let mut phase = state.phase;
    let mut time = 0.0;
    for _ in 0..config.max_steps {
        let stats = engine.advance(&mut temps, &mut phase);
        time += engine.dt;
        check_stability(&stats, time)?;
        if !phase.contains(&Phase::Normal) {
            return Ok(false);
        }
        if stats.max_delta < config.steady_tolerance * engine.dt {
            return Ok(true);
        }
    }
    Ok(true)
}

/// Maximum bracket growth in the retrapping search: the radiative-balance
/// estimate sets the scale, but the full balance with conduction sustains
/// domains only at a multiple of it, so the initial 2× top is widened (at
/// most to 16×) until it survives.
const BRACKET_DOUBLINGS: u32 = 3;

/// Finds the smallest bias current at which a seeded normal domain
/// self-sustains, by bisection on [`seeded_domain_survives`].
///
/// The search starts on [0, 2 × the radiative-balance closed form] and
/// doubles the top (keeping the failed top as the new bottom — survival is
/// monotone in current) until the top survives. Returns the bracket
/// midpoint once the bracket is narrower than
/// `config.current_tolerance × top`.
pub fn find_retrapping_current(
    film: &FilmState,
    geom: &WireGeometry,
    config: &SolverConfig,
) -> Result<f64> {
    config.validate()?;
    let analytic = retrapping_current_analytic(film, geom)?;
    let mut lo = 0.0;
    let mut hi = 2.0 * analytic;
    let mut expansions = 0;
    while !seeded_domain_survives(film, geom, config, hi)? {
        if expansions == BRACKET_DOUBLINGS {
            return Err(Error::bracket(format!(
                "no self-sustaining domain up to {hi} A ({}x the radiative-balance estimate)",
                2u32 << BRACKET_DOUBLINGS
            )));
        }
        lo = hi;
        hi *= 2.0;
        expansions += 1;
    }
    let tol = config.current_tolerance * hi;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if seeded_domain_survives(film, geom, config, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evolves a Gaussian hotspot of `seed_energy` joules at the wire center
/// under `bias` and returns the time until the normal domain vanishes [s].
/// Returns +∞ when the domain self-sustains instead of decaying (steady
/// field, or step budget exhausted, with the domain alive).
pub fn hotspot_lifetime(
    film: &FilmState,
    geom: &WireGeometry,
    config: &SolverConfig,
    seed_energy: f64,
    bias: f64,
) -> Result<f64> {
    let state = ThermalSimState::with_gaussian_bump(film, geom, config, bias, seed_energy, 0.5)?;
    if state.normal_node_count() == 0 {
        return Ok(0.0);
    }
    let mut engine = Engine::new(film, geom, config, &state)?;
    let mut temps = state.temperatures;
    let mut phase = state.phase;
    let mut time = 0.0;
    for _ in 0..config.max_steps {
        let stats = engine.advance(&mut temps, &mut phase);
        time += engine.dt;
        check_stability(&stats, time)?;
        if !phase.contains(&Phase::Normal) {
            return Ok(time);
        }
        if stats.max_delta < config.steady_tolerance * engine.dt {
            return Ok(f64::INFINITY);
        }
    }
    Ok(f64::INFINITY)
}

/// The two currents of the hysteretic I–V loop. Switching is measured, not
/// modeled (the heat balance contains no depairing physics); retrapping
/// comes from the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HysteresisCurrents {
    /// Externally supplied switching current [A].
    pub switching: f64,
    /// Computed retrapping current [A].
    pub retrapping: f64,
}

/// Pairs a supplied switching current with the computed retrapping current,
/// insisting on the hysteretic ordering I_r < I_sw.
pub fn iv_hysteresis(
    film: &FilmState,
    geom: &WireGeometry,
    config: &SolverConfig,
    i_switch: f64,
) -> Result<HysteresisCurrents> {
    if !(i_switch > 0.0) || !i_switch.is_finite() {
        return Err(Error::domain(format!("switching current must be > 0, got {i_switch}")));
    }
    let retrapping = find_retrapping_current(film, geom, config)?;
    if retrapping >= i_switch {
        return Err(Error::domain(format!(
            "retrapping current {retrapping} A is not below the switching current {i_switch} A"
        )));
    }
    Ok(HysteresisCurrents { switching: i_switch, retrapping })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Shared delta-from-reference tolerances for this module's tests.
    const STEP_IDENTITY_TOL: f64 = 1e-13;
    const BUDGET_REL_TOL: f64 = 1e-6;

    fn film() -> FilmState {
        FilmState {
            tc: 8.0,
            sheet_resistance: 300.0,
            thickness: 8e-9,
            coupling_sigma: 210.0,
            thermal_conductivity: 0.08,
            specific_heat: 2400.0,
        }
    }

    // Short wire keeps search-loop tests fast; thresholds scale the same.
    fn short_geom() -> WireGeometry {
        WireGeometry {
            length: 6e-6,
            width: 250e-9,
            thickness: 8e-9,
            substrate_temperature: 1.0,
        }
    }

    fn short_config() -> SolverConfig {
        SolverConfig { node_count: 601, ..SolverConfig::standard() }
    }

    #[test]
    fn equilibrium_state_is_a_fixed_point() {
        let film = film();
        let geom = short_geom();
        for scheme in [Scheme::Explicit, Scheme::Implicit] {
            let config = SolverConfig { scheme, ..short_config() };
            let state = ThermalSimState::uniform(&film, &geom, &config, 0.0, 1.0).unwrap();
            let (next, budget) = step_with_budget(&state, &film, &geom, &config).unwrap();
            let worst = next
                .temperatures
                .iter()
                .zip(&state.temperatures)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(
                worst < STEP_IDENTITY_TOL,
                "bath equilibrium must be stationary ({scheme:?}), drifted {worst}"
            );
            assert!(budget.joule_input == 0.0 && budget.substrate_loss.abs() < 1e-30);
        }
    }

    #[test]
    fn isolated_joule_heating_matches_exact_rate() {
        // kappa = 0 and sigma = 0 reduce the balance on a normal node to
        // dT = dt J^2 rho / C exactly.
        let film = FilmState {
            coupling_sigma: 0.0,
            thermal_conductivity: 0.0,
            ..film()
        };
        let geom = short_geom();
        let dt = 1e-12;
        let config = SolverConfig {
            node_count: 3,
            dt: Some(dt),
            scheme: Scheme::Explicit,
            ..short_config()
        };
        let bias = 20e-6;
        let mut state = ThermalSimState::uniform(&film, &geom, &config, bias, 1.0).unwrap();
        state.temperatures[1] = 2.0 * film.tc;
        state.phase[1] = Phase::Normal;
        let next = step(&state, &film, &geom, &config).unwrap();
        let j = bias / geom.cross_section();
        let expected = 2.0 * film.tc + dt * j * j * film.resistivity() / film.specific_heat;
        assert_eq!(
            next.temperatures[1], expected,
            "isolated Joule node must heat at exactly J^2 rho / C"
        );
        assert_eq!(next.temperatures[0], 1.0, "end stays clamped");
    }

    #[test]
    fn auto_dt_requires_conductivity() {
        let film = FilmState { thermal_conductivity: 0.0, ..film() };
        let geom = short_geom();
        let config = SolverConfig { dt: None, ..short_config() };
        let state = ThermalSimState::uniform(&film, &geom, &config, 0.0, 1.0).unwrap();
        assert!(step(&state, &film, &geom, &config).is_err(), "auto dt needs kappa > 0");
    }

    #[test]
    fn explicit_dt_above_cfl_is_rejected() {
        let film = film();
        let geom = short_geom();
        let dx = geom.length / 600.0;
        let cfl = 0.5 * film.specific_heat * dx * dx / film.thermal_conductivity;
        let config = SolverConfig {
            dt: Some(2.0 * cfl),
            scheme: Scheme::Explicit,
            ..short_config()
        };
        let state = ThermalSimState::uniform(&film, &geom, &config, 0.0, 1.0).unwrap();
        assert!(step(&state, &film, &geom, &config).is_err(), "dt beyond CFL must fail");
        let implicit = SolverConfig { scheme: Scheme::Implicit, ..config };
        assert!(
            step(&state, &film, &geom, &implicit).is_ok(),
            "implicit scheme has no CFL restriction"
        );
    }

    #[test]
    fn hot_wire_with_no_bias_cools_to_bath() {
        let film = film();
        let geom = short_geom();
        for scheme in [Scheme::Explicit, Scheme::Implicit] {
            // The explicit step is CFL-sized, far below the settling time,
            // so that leg needs a generous step budget.
            let config = SolverConfig { scheme, max_steps: 500_000, ..short_config() };
            let state = ThermalSimState::uniform(&film, &geom, &config, 0.0, 6.0).unwrap();
            let out = relax_to_steady(&state, &film, &geom, &config).unwrap();
            assert!(out.converged, "cooling must reach steady state ({scheme:?})");
            let worst = out
                .state
                .temperatures
                .iter()
                .map(|t| (t - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-5, "steady field must be the bath ({scheme:?}), off by {worst}");
            assert_eq!(out.state.normal_node_count(), 0);
        }
    }

    #[test]
    fn unbiased_maximum_is_nonincreasing() {
        let film = film();
        let geom = short_geom();
        let config = SolverConfig { scheme: Scheme::Explicit, ..short_config() };
        let mut state =
            ThermalSimState::with_gaussian_bump(&film, &geom, &config, 0.0, 3e-17, 0.5).unwrap();
        let mut prev_max = state.max_temperature();
        for _ in 0..200 {
            state = step(&state, &film, &geom, &config).unwrap();
            let m = state.max_temperature();
            assert!(
                m <= prev_max + 1e-12,
                "maximum principle violated: {m} K after {prev_max} K"
            );
            prev_max = m;
        }
    }

    #[test]
    fn neumann_ends_keep_uniform_field_uniform() {
        let film = film();
        let geom = short_geom();
        let config = SolverConfig { boundary: Boundary::Neumann, ..short_config() };
        let state = ThermalSimState::uniform(&film, &geom, &config, 0.0, 5.0).unwrap();
        let (next, budget) = step_with_budget(&state, &film, &geom, &config).unwrap();
        let spread = next.max_temperature()
            - next.temperatures.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-12, "insulated uniform field must stay uniform, spread {spread}");
        assert!(budget.boundary_loss.abs() < 1e-30, "no flux through insulated ends");
        // It cools toward the bath as a whole.
        assert!(next.temperatures[1] < 5.0);
    }

    #[test]
    fn energy_budget_closes_for_both_schemes() {
        let film = film();
        let geom = short_geom();
        let analytic = retrapping_current_analytic(&film, &geom).unwrap();
        for scheme in [Scheme::Explicit, Scheme::Implicit] {
            let config = SolverConfig { scheme, ..short_config() };
            let mut state =
                ThermalSimState::with_seeded_domain(&film, &geom, &config, 4.0 * analytic)
                    .unwrap();
            for step_no in 0..50 {
                let (next, budget) = step_with_budget(&state, &film, &geom, &config).unwrap();
                let scale = budget.joule_input.abs()
                    + budget.substrate_loss.abs()
                    + budget.boundary_loss.abs()
                    + budget.stored_delta.abs();
                assert!(
                    budget.residual().abs() <= BUDGET_REL_TOL * scale,
                    "step {step_no} ({scheme:?}): residual {} vs scale {scale}",
                    budget.residual()
                );
                state = next;
            }
        }
    }

    #[test]
    fn domain_survives_above_threshold_and_collapses_below() {
        let film = film();
        let geom = short_geom();
        let config = short_config();
        let analytic = retrapping_current_analytic(&film, &geom).unwrap();
        // The full balance sustains domains only well above the radiative
        // closed form (conduction into the superconducting banks); 1.5x is
        // below the threshold, 4x above.
        let low = ThermalSimState::with_seeded_domain(&film, &geom, &config, 1.5 * analytic).unwrap();
        let out = relax_to_steady(&low, &film, &geom, &config).unwrap();
        assert!(out.converged);
        assert_eq!(out.state.normal_node_count(), 0, "weak bias must let the domain die");
        let high = ThermalSimState::with_seeded_domain(&film, &geom, &config, 4.0 * analytic).unwrap();
        let out = relax_to_steady(&high, &film, &geom, &config).unwrap();
        assert!(out.converged);
        assert!(
            out.state.normal_domain_length() > 0.0,
            "strong bias must sustain a finite domain"
        );
        // The clamped cold ends always pin a superconducting margin.
        assert!(out.state.normal_node_count() < config.node_count);
        assert_eq!(out.state.phase[0], Phase::Superconducting);
        assert_eq!(out.state.phase[config.node_count - 1], Phase::Superconducting);
    }

    #[test]
    fn retrapping_search_brackets_the_transition() {
        let film = film();
        let geom = short_geom();
        let config = short_config();
        let analytic = retrapping_current_analytic(&film, &geom).unwrap();
        let found = find_retrapping_current(&film, &geom, &config).unwrap();
        assert!(
            found > 1.5 * analytic && found < 8.0 * analytic,
            "threshold {found} A should sit a few multiples above the radiative estimate {analytic} A"
        );
        // The bracket endpoints behave as claimed.
        assert!(seeded_domain_survives(&film, &geom, &config, found * 1.01).unwrap());
        assert!(!seeded_domain_survives(&film, &geom, &config, found * 0.99).unwrap());
    }

    #[test]
    fn retrapping_grows_with_coupling_and_scales_as_sqrt() {
        let geom = short_geom();
        let config = short_config();
        let mut prev = 0.0;
        for &sigma in &[100.0, 210.0, 400.0] {
            let film = FilmState { coupling_sigma: sigma, ..film() };
            let ir = find_retrapping_current(&film, &geom, &config).unwrap();
            assert!(ir > prev, "I_r must grow with coupling sigma ({ir} after {prev})");
            prev = ir;
        }
        // 4x the coupling doubles the threshold, by the homogeneity of the
        // heat balance. The cold clamped ends add a sigma-independent loss,
        // so the identity needs a wire much longer than the healing length;
        // a coarse grid keeps it fast and cancels out of the ratio.
        let long = WireGeometry { length: 25.8e-6, ..geom };
        let coarse = SolverConfig { node_count: 861, ..config };
        let film1 = FilmState { coupling_sigma: 100.0, ..film() };
        let film4 = FilmState { coupling_sigma: 400.0, ..film() };
        let ir1 = find_retrapping_current(&film1, &long, &coarse).unwrap();
        let ir4 = find_retrapping_current(&film4, &long, &coarse).unwrap();
        let ratio = ir4 / ir1;
        assert!(
            (ratio - 2.0).abs() < 0.06,
            "sqrt homogeneity: I_r(4 sigma)/I_r(sigma) = {ratio}, want 2"
        );
    }

    #[test]
    fn bracket_error_when_no_domain_survives() {
        // Conduction so strong the healing length exceeds the wire: the
        // seeded domain always touches the cold ends and dies, at any
        // current the bracket growth reaches.
        let film = FilmState { thermal_conductivity: 1000.0, ..film() };
        let geom = short_geom();
        let config = short_config();
        let err = find_retrapping_current(&film, &geom, &config).unwrap_err();
        assert!(
            matches!(err, Error::Bracket(_)),
            "expected a bracket failure, got {err}"
        );
    }

    #[test]
    fn hotspot_lifetime_trivial_and_monotone_in_coupling() {
        let geom = short_geom();
        let config = short_config();
        let base = film();
        let analytic = retrapping_current_analytic(&base, &geom).unwrap();
        let bias = 0.5 * analytic;
        assert_eq!(
            hotspot_lifetime(&base, &geom, &config, 0.0, bias).unwrap(),
            0.0,
            "no seed energy, no hotspot"
        );
        // A bump too weak to cross T_c never nucleates a domain.
        assert_eq!(hotspot_lifetime(&base, &geom, &config, 1e-20, bias).unwrap(), 0.0);
        let mut prev = f64::INFINITY;
        for &sigma in &[100.0, 210.0, 400.0] {
            let film = FilmState { coupling_sigma: sigma, ..base.clone() };
            let tau = hotspot_lifetime(&film, &geom, &config, 3e-17, bias).unwrap();
            assert!(tau.is_finite() && tau > 0.0, "subcritical bias must decay ({tau})");
            assert!(
                tau < prev,
                "stronger substrate coupling must shorten the hotspot ({tau} after {prev})"
            );
            prev = tau;
        }
    }

    #[test]
    fn hotspot_self_sustains_far_above_threshold() {
        let film = film();
        let geom = short_geom();
        let config = short_config();
        let analytic = retrapping_current_analytic(&film, &geom).unwrap();
        let tau = hotspot_lifetime(&film, &geom, &config, 3e-17, 5.0 * analytic).unwrap();
        assert!(tau.is_infinite(), "strong bias must sustain the hotspot, got {tau}");
    }

    #[test]
    fn hysteresis_orders_currents_and_rejects_degenerate_switching() {
        let film = film();
        let geom = short_geom();
        let config = short_config();
        let h = iv_hysteresis(&film, &geom, &config, 79.1e-6).unwrap();
        assert!(
            h.retrapping < h.switching,
            "retrapping {} must sit below switching {}",
            h.retrapping,
            h.switching
        );
        let err = iv_hysteresis(&film, &geom, &config, 1e-6).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "I_sw at or below I_r must fail, got {err}");
    }

    #[test]
    fn stability_error_on_stiff_cooling_blowup() {
        // Enormous coupling makes the explicit cooling term overshoot
        // below absolute zero or diverge; the step must say so.
        let film = FilmState { coupling_sigma: 1e8, ..film() };
        let geom = short_geom();
        let config = SolverConfig { scheme: Scheme::Explicit, ..short_config() };
        let mut state =
            ThermalSimState::with_seeded_domain(&film, &geom, &config, 10e-6).unwrap();
        let mut saw_error = false;
        for _ in 0..200 {
            match step(&state, &film, &geom, &config) {
                Ok(next) => state = next,
                Err(Error::Stability(_)) => {
                    saw_error = true;
                    break;
                }
                Err(other) => panic!("expected a stability error, got {other}"),
            }
        }
        assert!(saw_error, "stiff cooling at huge sigma must trip the stability check");
    }

    // Frozen after a first run of the fine-grid comparison below; guards
    // the discretization against silent drift.
    const PULSE_CENTER_T: f64 = 10.932841256737973;

    #[test]
    fn short_pulse_evolution_matches_fine_grid_reference() {
        // 2 um wire, hot Gaussian seed, bias above the self-sustaining
        // threshold: after 0.6 ns the center rides the growing plateau.
        let film = film();
        let geom = WireGeometry { length: 2e-6, ..short_geom() };
        let coarse_cfg = SolverConfig {
            node_count: 201, // dx = 10 nm
            scheme: Scheme::Explicit,
            dt: None, // auto: 0.4 x CFL = 0.6 ps
            ..short_config()
        };
        let bias = 25e-6;
        let energy = 3e-17;
        let mut coarse =
            ThermalSimState::with_gaussian_bump(&film, &geom, &coarse_cfg, bias, energy, 0.5)
                .unwrap();
        for _ in 0..1000 {
            coarse = step(&coarse, &film, &geom, &coarse_cfg).unwrap();
        }
        let center_coarse = coarse.temperatures[100];

        // Reference at dx/4 (auto dt scales with dx^2, so 16x the steps
        // reach the same physical time).
        let fine_cfg = SolverConfig { node_count: 801, ..coarse_cfg.clone() };
        let mut fine =
            ThermalSimState::with_gaussian_bump(&film, &geom, &fine_cfg, bias, energy, 0.5)
                .unwrap();
        for _ in 0..16000 {
            fine = step(&fine, &film, &geom, &fine_cfg).unwrap();
        }
        let center_fine = fine.temperatures[400];
        assert!(
            ((coarse.time - fine.time) / fine.time).abs() < 1e-9,
            "both runs must reach the same instant ({} vs {})",
            coarse.time,
            fine.time
        );
        assert!(
            (center_coarse - center_fine).abs() < 0.05,
            "coarse center {center_coarse} K vs dx/4 reference {center_fine} K"
        );
        assert!(
            (center_coarse - PULSE_CENTER_T).abs() < 1e-9,
            "pinned coarse center temperature drifted: {center_coarse} K"
        );
    }

    #[test]
    fn seeded_state_has_central_domain_of_expected_size() {
        let film = film();
        let geom = short_geom();
        let config = short_config();
        let state = ThermalSimState::with_seeded_domain(&film, &geom, &config, 1e-6).unwrap();
        let n = config.node_count;
        let expected = ((n as f64) * 0.05).round() as usize;
        assert_eq!(state.normal_node_count(), expected, "5 % of nodes seeded");
        // Centered: first and last fifths untouched.
        assert!(state.temperatures[..n / 5].iter().all(|&t| t == 1.0));
        assert!(state.temperatures[n - n / 5..].iter().all(|&t| t == 1.0));
    }

    #[test]
    fn gaussian_bump_carries_the_requested_energy() {
        let film = film();
        let geom = short_geom();
        let config = short_config();
        let energy = 3e-17;
        let state =
            ThermalSimState::with_gaussian_bump(&film, &geom, &config, 0.0, energy, 0.5).unwrap();
        let dx = state.grid_spacing;
        let stored: f64 = state
            .temperatures
            .iter()
            .map(|&t| film.specific_heat * (t - 1.0) * geom.cross_section() * dx)
            .sum();
        assert!(
            ((stored - energy) / energy).abs() < 1e-6,
            "discrete bump energy {stored} J vs requested {energy} J"
        );
    }
}
