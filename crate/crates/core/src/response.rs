//! Count-rate curves: error-function (sigmoid) fitting, normalization to
//! the fit asymptote, saturation-plateau metrics, and the three-scheme
//! comparison table.

use crate::error::{Error, Result};
use crate::math;

/// Measured count rate versus bias current for one device.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRateCurve {
    /// Bias points [A], strictly increasing.
    pub bias_points: Vec<f64>,
    /// Count rates [1/s], same length, each >= 0.
    pub counts: Vec<f64>,
    /// Critical current of the device [A].
    pub critical_current: f64,
}

impl CountRateCurve {
    pub fn validate(&self) -> Result<()> {
        if self.bias_points.len() != self.counts.len() {
            return Err(Error::domain(format!(
                "bias and count lengths differ: {} vs {}",
                self.bias_points.len(),
                self.counts.len()
            )));
        }
        if self.bias_points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("bias points must be strictly increasing"));
        }
        if self.bias_points.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain("bias points must be finite"));
        }
        if self.counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::domain("counts must be finite and >= 0"));
        }
        if !(self.critical_current > 0.0) || !self.critical_current.is_finite() {
            return Err(Error::domain(format!(
                "critical current must be > 0, got {}",
                self.critical_current
            )));
        }
        Ok(())
    }
}

/// Fitted sigmoid CR(I) = offset + (asymptote/2)·(1 + erf((I − center)/(√2·width))).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidFit {
    /// Saturation count rate [1/s].
    pub asymptote: f64,
    /// Inflection bias [A].
    pub center: f64,
    /// Transition width [A].
    pub width: f64,
    /// Constant dark floor [1/s]; zero for the standard fit.
    pub offset: f64,
    /// RMS residual over the asymptote [dimensionless].
    pub residual_rms: f64,
}

impl SigmoidFit {
    pub fn validate(&self) -> Result<()> {
        if !(self.asymptote > 0.0) || !(self.width > 0.0) {
            return Err(Error::domain(format!(
                "fit needs asymptote > 0 and width > 0, got {} and {}",
                self.asymptote, self.width
            )));
        }
        if ![self.center, self.offset, self.residual_rms].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("fit parameters must be finite"));
        }
        Ok(())
    }

    /// Model value at bias `i` [1/s].
    pub fn eval(&self, i: f64) -> f64 {
        let u = (i - self.center) / self.width;
        self.offset + 0.5 * self.asymptote * (1.0 + math::erf(u / std::f64::consts::SQRT_2))
    }
}

// Levenberg–Marquardt schedule; fixed so fits are bit-deterministic.
const LM_INITIAL_LAMBDA: f64 = 1e-3;
const LM_MAX_OUTER: usize = 200;
const LM_MAX_INNER: usize = 20;
const LM_STEP_TOL: f64 = 1e-12;
const LM_COST_TOL: f64 = 1e-14;

/// Residuals and cost for the current parameter vector.
fn cost_of(params: &[f64], curve: &CountRateCurve, with_offset: bool) -> f64 {
    let fit = SigmoidFit {
        asymptote: params[0],
        center: params[1],
        width: params[2],
        offset: if with_offset { params[3] } else { 0.0 },
        residual_rms: 0.0,
    };
    curve
        .bias_points
        .iter()
        .zip(&curve.counts)
        .map(|(&i, &c)| {
            let r = fit.eval(i) - c;
            r * r
        })
        .sum()
}

fn fit_impl(curve: &CountRateCurve, with_offset: bool) -> Result<SigmoidFit> {
    curve.validate()?;
    let n = curve.bias_points.len();
    if n < 5 {
        return Err(Error::domain(format!("sigmoid fit needs >= 5 points, got {n}")));
    }
    let max_c = curve.counts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_c = curve.counts.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_c == min_c {
        return Err(Error::domain("sigmoid fit needs non-constant counts"));
    }

    // Documented deterministic initializer: asymptote from the count span,
    // center at the first half-maximum crossing, width a third of the
    // remaining run-up to the critical current.
    let floor = if with_offset { min_c } else { 0.0 };
    let amp0 = max_c - floor;
    let half = floor + 0.5 * amp0;
    let center0 = curve
        .bias_points
        .iter()
        .zip(&curve.counts)
        .find(|(_, &c)| c >= half)
        .map(|(&b, _)| b)
        .unwrap_or(curve.bias_points[n / 2]);
    let mut width0 = (curve.critical_current - center0) / 3.0;
    if !(width0 > 0.0) {
        width0 = (curve.bias_points[n - 1] - curve.bias_points[0]) / 6.0;
    }
    let mut params = if with_offset {
        vec![amp0, center0, width0, floor]
    } else {
        vec![amp0, center0, width0]
    };
    let dim = params.len();

    let mut lambda = LM_INITIAL_LAMBDA;
    let mut cost = cost_of(&params, curve, with_offset);
    for _outer in 0..LM_MAX_OUTER {
        // Assemble J^T J and J^T r at the current point.
        let mut jtj = vec![0.0; dim * dim];
        let mut jtr = vec![0.0; dim];
        for (&i, &c) in curve.bias_points.iter().zip(&curve.counts) {
            let (a, i0, w) = (params[0], params[1], params[2]);
            let u = (i - i0) / w;
            let phi = math::normal_pdf(u);
            let erf_term = 0.5 * (1.0 + math::erf(u / std::f64::consts::SQRT_2));
            let model = if with_offset { params[3] } else { 0.0 } + a * erf_term;
            let r = model - c;
            let mut grad = [0.0; 4];
            grad[0] = erf_term;
            grad[1] = -a * phi / w;
            grad[2] = -a * u * phi / w;
            if with_offset {
                grad[3] = 1.0;
            }
            for p in 0..dim {
                jtr[p] += grad[p] * r;
                for q in 0..dim {
                    jtj[p * dim + q] += grad[p] * grad[q];
                }
            }
        }

        let mut accepted = false;
        let mut last_step_rel = f64::INFINITY;
        for _inner in 0..LM_MAX_INNER {
            // Damped normal equations (J^T J + lambda diag) delta = -J^T r.
            let mut damped = jtj.clone();
            for p in 0..dim {
                damped[p * dim + p] += lambda * jtj[p * dim + p].max(1e-300);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(delta) = math::solve_dense_small(&damped, &rhs) else {
                lambda *= 10.0;
                continue;
            };
            let candidate: Vec<f64> =
                params.iter().zip(&delta).map(|(p, d)| p + d).collect();
            // A sign-flipped or dead width is a rejected step, not a model.
            if !(candidate[0] > 0.0) || !(candidate[2] > 0.0) {
                lambda *= 10.0;
                continue;
            }
            let new_cost = cost_of(&candidate, curve, with_offset);
            if new_cost.is_finite() && new_cost <= cost {
                last_step_rel = params
                    .iter()
                    .zip(&delta)
                    .map(|(p, d)| (d / p.abs().max(1e-300)).abs())
                    .fold(0.0, f64::max);
                let cost_drop = cost - new_cost;
                params = candidate;
                cost = new_cost;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if last_step_rel < LM_STEP_TOL || cost_drop < LM_COST_TOL * cost.max(1e-300) {
                    // Converged; fall through to the final packaging.
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            return Err(Error::fit(format!(
                "no descending step found after {LM_MAX_INNER} damping increases (cost {cost})"
            )));
        }
        if last_step_rel < LM_STEP_TOL {
            break;
        }
    }

    let asymptote = params[0];
    let width = params[2];
    if !(asymptote > 0.0) || !(width > 0.0) {
        return Err(Error::fit(format!(
            "fit ended with non-physical parameters: asymptote {asymptote}, width {width}"
        )));
    }
    let rms = (cost / n as f64).sqrt() / asymptote;
    let fit = SigmoidFit {
        asymptote,
        center: params[1],
        width,
        offset: if with_offset { params[3] } else { 0.0 },
        residual_rms: rms,
    };
    fit.validate().map_err(|e| Error::fit(format!("fit left the valid region: {e}")))?;
    Ok(fit)
}

/// Least-squares error-function fit CR(I) = (A/2)·(1 + erf((I−I₀)/(√2·w)))
/// with the deterministic initializer documented on the implementation.
pub fn fit_error_function(curve: &CountRateCurve) -> Result<SigmoidFit> {
    fit_impl(curve, false)
}

/// [`fit_error_function`] plus a constant dark-count floor as a fourth
/// parameter.
pub fn fit_error_function_with_offset(curve: &CountRateCurve) -> Result<SigmoidFit> {
    fit_impl(curve, true)
}

/// Counts divided by the fit asymptote; plateau values sit near 1.
pub fn normalize_counts(curve: &CountRateCurve, fit: &SigmoidFit) -> Vec<f64> {
    curve.counts.iter().map(|&c| c / fit.asymptote).collect()
}

/// Saturation-plateau extent between the threshold crossing and the
/// critical current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauWidth {
    /// I_c − I_threshold [A].
    pub absolute: f64,
    /// absolute / I_c [dimensionless].
    pub relative: f64,
}

/// Width of the saturation plateau: the fitted curve crosses
/// `threshold × asymptote` at I_th = center + √2·width·erf⁻¹(2·threshold − 1)
/// (closed form), and the plateau runs from there to `critical_current`.
pub fn plateau_width(
    fit: &SigmoidFit,
    critical_current: f64,
    threshold: f64,
) -> Result<PlateauWidth> {
    fit.validate()?;
    if !(critical_current > 0.0) || !critical_current.is_finite() {
        return Err(Error::domain(format!(
            "critical current must be > 0, got {critical_current}"
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::domain(format!(
            "threshold must be in (0, 1), got {threshold}"
        )));
    }
    let i_threshold =
        fit.center + std::f64::consts::SQRT_2 * fit.width * math::erf_inv(2.0 * threshold - 1.0);
    if i_threshold >= critical_current {
        return Err(Error::domain(format!(
            "no plateau: threshold crossing {i_threshold} A is not below I_c {critical_current} A"
        )));
    }
    let absolute = critical_current - i_threshold;
    Ok(PlateauWidth { absolute, relative: absolute / critical_current })
}

/// Default plateau edge: 99 % of the asymptote. The edge definition is a
/// convention, so every entry point takes the threshold explicitly and this
/// is only the documented default.
pub const PLATEAU_THRESHOLD_DEFAULT: f64 = 0.99;

/// Input row for [`compare_schemes`]: one irradiation scheme's measured
/// currents plus its fitted response. An unirradiated reference carries
/// equal before/after switching currents.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeRecord {
    pub label: String,
    /// Switching current before irradiation [A].
    pub switching_before: f64,
    /// Switching current after irradiation [A].
    pub switching_after: f64,
    /// Critical current after irradiation [A].
    pub critical_after: f64,
    pub fit: SigmoidFit,
}

/// One output row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeComparison {
    pub label: String,
    pub switching_before: f64,
    pub switching_after: f64,
    pub critical_after: f64,
    /// 1 − I_sw,after / I_sw,before.
    pub switching_reduction: f64,
    /// 1 − I_c,after / I_sw,before.
    pub critical_reduction: f64,
    pub plateau: PlateauWidth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<SchemeComparison>,
}

/// Builds the comparison table across irradiation schemes: current
/// reductions relative to the pre-irradiation switching current and
/// plateau widths at the given threshold.
pub fn compare_schemes(records: &[SchemeRecord], threshold: f64) -> Result<ComparisonReport> {
    if records.is_empty() {
        return Err(Error::domain("comparison needs at least one scheme record"));
    }
    let mut rows = Vec::with_capacity(records.len());
    for rec in records {
        for (name, v) in [
            ("switching_before", rec.switching_before),
            ("switching_after", rec.switching_after),
            ("critical_after", rec.critical_after),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!(
                    "{}: {name} must be > 0, got {v}",
                    rec.label
                )));
            }
        }
        if rec.switching_after > rec.switching_before {
            return Err(Error::domain(format!(
                "{}: switching current cannot grow under irradiation ({} to {})",
                rec.label, rec.switching_before, rec.switching_after
            )));
        }
        let plateau = plateau_width(&rec.fit, rec.critical_after, threshold)?;
        rows.push(SchemeComparison {
            label: rec.label.clone(),
            switching_before: rec.switching_before,
            switching_after: rec.switching_after,
            critical_after: rec.critical_after,
            switching_reduction: 1.0 - rec.switching_after / rec.switching_before,
            critical_reduction: 1.0 - rec.critical_after / rec.switching_before,
            plateau,
        });
    }
    Ok(ComparisonReport { rows })
}
