//! Scenario configuration: strict TOML with units encoded in key names.
//!
//! Unknown keys are rejected, every referenced file must exist at parse
//! time, and all values convert to SI core types through exact decimal
//! scaling. Sections are optional; each subcommand demands the sections it
//! needs and exits 2 when one is missing.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use snspd_core::dose::{DoseModel, IrradiationMask, IrradiationPattern};
use snspd_core::film::{FilmState, FluenceCurveParams, SigmaFluenceModel, WireGeometry};
use snspd_core::io::read_xy_csv;
use snspd_core::math::integrate_table;
use snspd_core::thermal::{Boundary, Scheme, SolverConfig};
use snspd_core::units::{nm_to_m, ua_to_a, um_to_m};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Reserved for synthetic-noise fixtures; no shipped subcommand draws
    /// random numbers, but the key is part of the accepted schema.
    #[serde(default)]
    #[allow(dead_code)]
    pub seed: u64,
    pub material: Option<MaterialSection>,
    pub geometry: Option<GeometrySection>,
    pub dose: Option<DoseSection>,
    pub solver: Option<SolverSection>,
    pub simulate: Option<SimulateSection>,
    pub sigma_extraction: Option<SigmaExtractionSection>,
    pub sweep: Option<SweepSection>,
}

impl ScenarioConfig {
    /// Parses `path`, resolves referenced files against its directory, and
    /// validates every present section eagerly — a bad config never
    /// reaches the numerics.
    pub fn load(path: &Path) -> CliResult<ScenarioConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let mut config: ScenarioConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if let Some(dose) = &mut config.dose {
            dose.resolve_and_check(base)?;
        }
        // Eager validation: constructing the core types runs their own
        // invariant checks.
        if let Some(material) = &config.material {
            material.film()?;
            if let Some(curve) = &material.fluence_curve {
                curve.params().validate()?;
            }
            if let Some(curve) = &material.sigma_curve {
                curve.model()?;
            }
        }
        if let Some(geometry) = &config.geometry {
            geometry.wire()?;
        }
        config.solver()?;
        if let Some(sweep) = &config.sweep {
            sweep.check()?;
        }
        Ok(config)
    }

    /// The section, or exit-2 material for the subcommand that needs it.
    pub fn material(&self) -> CliResult<&MaterialSection> {
        self.material
            .as_ref()
            .ok_or_else(|| CliError::config("config needs a [material] section"))
    }

    pub fn geometry(&self) -> CliResult<&GeometrySection> {
        self.geometry
            .as_ref()
            .ok_or_else(|| CliError::config("config needs a [geometry] section"))
    }

    pub fn dose(&self) -> CliResult<&DoseSection> {
        self.dose
            .as_ref()
            .ok_or_else(|| CliError::config("config needs a [dose] section"))
    }

    pub fn simulate(&self) -> CliResult<&SimulateSection> {
        self.simulate
            .as_ref()
            .ok_or_else(|| CliError::config("config needs a [simulate] section"))
    }

    pub fn sigma_extraction(&self) -> CliResult<&SigmaExtractionSection> {
        self.sigma_extraction
            .as_ref()
            .ok_or_else(|| CliError::config("config needs a [sigma_extraction] section"))
    }

    pub fn sweep(&self) -> CliResult<&SweepSection> {
        self.sweep
            .as_ref()
            .ok_or_else(|| CliError::config("config needs a [sweep] section"))
    }

    /// Solver knobs; every field defaults to the standard configuration,
    /// and an absent [solver] section means all defaults.
    pub fn solver(&self) -> CliResult<SolverConfig> {
        match &self.solver {
            Some(section) => section.solver(),
            None => Ok(SolverConfig::standard()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub tc_k: f64,
    pub sheet_resistance_ohm_per_sq: f64,
    pub thickness_nm: f64,
    pub coupling_sigma_w_per_m2_k4: f64,
    pub thermal_conductivity_w_per_m_k: f64,
    pub specific_heat_j_per_m3_k: f64,
    pub fluence_curve: Option<FluenceCurveSection>,
    pub sigma_curve: Option<SigmaCurveSection>,
}

impl MaterialSection {
    pub fn film(&self) -> CliResult<FilmState> {
        let film = FilmState {
            tc: self.tc_k,
            sheet_resistance: self.sheet_resistance_ohm_per_sq,
            thickness: nm_to_m(self.thickness_nm),
            coupling_sigma: self.coupling_sigma_w_per_m2_k4,
            thermal_conductivity: self.thermal_conductivity_w_per_m_k,
            specific_heat: self.specific_heat_j_per_m3_k,
        };
        film.validate()?;
        Ok(film)
    }

    pub fn fluence_curve(&self) -> CliResult<&FluenceCurveSection> {
        self.fluence_curve.as_ref().ok_or_else(|| {
            CliError::config("config needs a [material.fluence_curve] section")
        })
    }
}

/// Defect-accumulation curve R(Φ) plus the T_c scaling constants of
/// d·T_c = a·R^(−b); `tc_scaling_a` is in m·K·Ω^b.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluenceCurveSection {
    pub r0_ohm_per_sq: f64,
    pub defect_rate_per_ion_nm2: f64,
    pub saturation_fluence_ions_per_nm2: f64,
    pub tc_scaling_a: f64,
    pub tc_scaling_b: f64,
}

impl FluenceCurveSection {
    pub fn params(&self) -> FluenceCurveParams {
        FluenceCurveParams {
            r0: self.r0_ohm_per_sq,
            defect_rate: self.defect_rate_per_ion_nm2,
            saturation_fluence: self.saturation_fluence_ions_per_nm2,
            tc_scaling_a: self.tc_scaling_a,
            tc_scaling_b: self.tc_scaling_b,
        }
    }
}

/// Thermal-coupling interpolation through two measured anchors.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaCurveSection {
    pub pristine_w_per_m2_k4: f64,
    pub anchor_w_per_m2_k4: f64,
    pub anchor_fluence_ions_per_nm2: f64,
    pub decay_fluence_ions_per_nm2: f64,
}

impl SigmaCurveSection {
    pub fn model(&self) -> CliResult<SigmaFluenceModel> {
        Ok(SigmaFluenceModel::through_endpoints(
            self.pristine_w_per_m2_k4,
            self.anchor_w_per_m2_k4,
            self.anchor_fluence_ions_per_nm2,
            self.decay_fluence_ions_per_nm2,
        )?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub length_um: f64,
    pub width_nm: f64,
    pub thickness_nm: f64,
    pub substrate_temperature_k: f64,
}

impl GeometrySection {
    pub fn wire(&self) -> CliResult<WireGeometry> {
        let wire = WireGeometry {
            length: um_to_m(self.length_um),
            width: nm_to_m(self.width_nm),
            thickness: nm_to_m(self.thickness_nm),
            substrate_temperature: self.substrate_temperature_k,
        };
        wire.validate()?;
        Ok(wire)
    }
}

fn default_profile() -> String {
    "default".to_owned()
}

fn default_x_min() -> f64 {
    -400.0
}

fn default_x_max() -> f64 {
    400.0
}

fn default_x_step() -> f64 {
    5.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoseSection {
    /// "full" or "standoff".
    pub pattern: String,
    /// Width of the unirradiated gap; required for "standoff".
    pub w_unirr_nm: Option<f64>,
    pub fluence_ions_per_nm2: f64,
    /// Lateral straggle FWHM used for the emitted fraction profile.
    pub fwhm_nm: f64,
    /// "default" for the shipped stopping model, or a two-column CSV path
    /// (z_nm, density) resolved against the config file; the imported
    /// density is renormalized to unit area.
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_x_min")]
    pub x_min_nm: f64,
    #[serde(default = "default_x_max")]
    pub x_max_nm: f64,
    #[serde(default = "default_x_step")]
    pub x_step_nm: f64,
    #[serde(skip)]
    resolved_profile: Option<PathBuf>,
}

impl DoseSection {
    fn resolve_and_check(&mut self, base: &Path) -> CliResult<()> {
        if !(self.x_step_nm > 0.0) || !(self.x_max_nm > self.x_min_nm) {
            return Err(CliError::config(format!(
                "dose grid needs x_min < x_max and x_step > 0, got [{}, {}] step {}",
                self.x_min_nm, self.x_max_nm, self.x_step_nm
            )));
        }
        self.pattern_and_fwhm()?;
        if self.profile != "default" {
            let path = base.join(&self.profile);
            if !path.is_file() {
                return Err(CliError::config(format!(
                    "dose profile {} does not exist",
                    path.display()
                )));
            }
            self.resolved_profile = Some(path);
        }
        Ok(())
    }

    /// The irradiation pattern plus the straggle FWHM, both validated.
    pub fn pattern_and_fwhm(&self) -> CliResult<(IrradiationPattern, f64)> {
        let mask = match self.pattern.as_str() {
            "full" => IrradiationMask::Full,
            "standoff" => IrradiationMask::Standoff {
                w_unirr_nm: self.w_unirr_nm.ok_or_else(|| {
                    CliError::config("standoff pattern needs w_unirr_nm")
                })?,
            },
            other => {
                return Err(CliError::config(format!(
                    "unknown dose pattern {other:?}; use \"full\" or \"standoff\""
                )))
            }
        };
        let pattern = IrradiationPattern { mask, fluence: self.fluence_ions_per_nm2 };
        pattern.validate()?;
        if !(self.fwhm_nm > 0.0) {
            return Err(CliError::config(format!(
                "fwhm_nm must be > 0, got {}",
                self.fwhm_nm
            )));
        }
        Ok((pattern, self.fwhm_nm))
    }

    /// The transverse sample grid [nm].
    pub fn x_grid(&self) -> Vec<f64> {
        let n = ((self.x_max_nm - self.x_min_nm) / self.x_step_nm).round() as usize;
        (0..=n).map(|k| self.x_min_nm + k as f64 * self.x_step_nm).collect()
    }

    /// The shipped stopping model, or the configured table with the
    /// shipped straggle/energy/layer tables around it.
    pub fn model(&self) -> CliResult<DoseModel> {
        let standard = DoseModel::standard();
        match &self.resolved_profile {
            None => Ok(standard),
            Some(path) => {
                let table = read_xy_csv(path)?;
                let mut depth_pdf = table.rows;
                let norm = integrate_table(&depth_pdf);
                if !(norm > 0.0) || !norm.is_finite() {
                    return Err(CliError::config(format!(
                        "{}: imported profile has non-normalizable area {norm}",
                        path.display()
                    )));
                }
                for point in &mut depth_pdf {
                    point.1 /= norm;
                }
                Ok(DoseModel::new(
                    depth_pdf,
                    standard.lateral_fwhm_by_depth,
                    standard.energy_deposition,
                    standard.layer_boundaries,
                )?)
            }
        }
    }
}

fn default_scheme() -> String {
    "implicit".to_owned()
}

fn default_boundary() -> String {
    "dirichlet".to_owned()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub node_count: Option<usize>,
    /// Omit for the automatic step size.
    pub dt_ps: Option<f64>,
    pub max_steps: Option<usize>,
    pub steady_tolerance_k_per_s: Option<f64>,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "default_boundary")]
    pub boundary: String,
    pub current_tolerance: Option<f64>,
}

impl SolverSection {
    pub fn solver(&self) -> CliResult<SolverConfig> {
        let standard = SolverConfig::standard();
        let scheme = match self.scheme.as_str() {
            "explicit" => Scheme::Explicit,
            "implicit" => Scheme::Implicit,
            other => {
                return Err(CliError::config(format!(
                    "unknown scheme {other:?}; use \"explicit\" or \"implicit\""
                )))
            }
        };
        let boundary = match self.boundary.as_str() {
            "dirichlet" => Boundary::Dirichlet,
            "neumann" => Boundary::Neumann,
            other => {
                return Err(CliError::config(format!(
                    "unknown boundary {other:?}; use \"dirichlet\" or \"neumann\""
                )))
            }
        };
        let config = SolverConfig {
            node_count: self.node_count.unwrap_or(standard.node_count),
            dt: self.dt_ps.map(|ps| ps / 1e12),
            max_steps: self.max_steps.unwrap_or(standard.max_steps),
            steady_tolerance: self
                .steady_tolerance_k_per_s
                .unwrap_or(standard.steady_tolerance),
            scheme,
            boundary,
            current_tolerance: self.current_tolerance.unwrap_or(standard.current_tolerance),
        };
        config.validate()?;
        Ok(config)
    }
}

fn default_record_every() -> usize {
    20
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub bias_ua: f64,
    /// Gaussian hotspot seed energy [aJ].
    pub seed_energy_aj: f64,
    /// Trace sampling stride in steps.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

impl SimulateSection {
    pub fn bias(&self) -> f64 {
        ua_to_a(self.bias_ua)
    }

    pub fn seed_energy(&self) -> f64 {
        self.seed_energy_aj / 1e18
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaExtractionSection {
    pub measured_retrapping_ua: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// The swept quantity; "fluence_ions_per_nm2" is the only supported
    /// parameter.
    pub parameter: String,
    pub values: Vec<f64>,
    /// Run the retrapping search per point (slow) in addition to the
    /// closed form.
    #[serde(default)]
    pub include_pde: bool,
}

impl SweepSection {
    fn check(&self) -> CliResult<()> {
        if self.parameter != "fluence_ions_per_nm2" {
            return Err(CliError::config(format!(
                "unsupported sweep parameter {:?}; only \"fluence_ions_per_nm2\" is addressable",
                self.parameter
            )));
        }
        if let Some(bad) = self.values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(CliError::config(format!(
                "sweep values must be finite and >= 0, got {bad}"
            )));
        }
        Ok(())
    }
}
