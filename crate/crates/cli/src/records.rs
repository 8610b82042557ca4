//! The fit record exchanged between `fit-counts` and `compare`.

use serde::{Deserialize, Serialize};

/// One device's count-rate characterization: the sigmoid fit, the derived
/// plateau, and the currents needed for cross-device comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRecord {
    pub label: String,
    /// Depairing critical current [µA].
    pub critical_current_ua: f64,
    /// Switching current before treatment [µA]; needed by `compare`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switching_before_ua: Option<f64>,
    /// Switching current after treatment [µA]; needed by `compare`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switching_after_ua: Option<f64>,
    /// Saturation threshold the plateau was evaluated at.
    pub threshold: f64,
    pub fit: FitParams,
    /// Absent when the curve never reaches the threshold below the
    /// critical current.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plateau: Option<PlateauMetrics>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitParams {
    pub asymptote_per_s: f64,
    pub center_ua: f64,
    pub width_ua: f64,
    pub offset_per_s: f64,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateauMetrics {
    pub absolute_ua: f64,
    pub relative: f64,
}
