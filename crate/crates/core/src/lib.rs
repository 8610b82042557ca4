//! Numerical core for modeling helium-ion-irradiated superconducting
//! nanowire single-photon detectors (SNSPDs).
//!
//! The library covers four concerns that together describe how focused ion
//! irradiation changes a nanowire detector:
//!
//! * [`film`] — material relations of the superconducting film: the
//!   radiative-cooling retrapping-current formula and its inverse, sheet
//!   resistance versus ion fluence, and the thickness–T_c–sheet-resistance
//!   scaling of strongly disordered films.
//! * [`dose`] — irradiation geometry: stopping-depth profiles, depth-resolved
//!   lateral straggle, and the closed-form convolution of a Gaussian beam
//!   spread with a 1D irradiation mask.
//! * [`thermal`] — a 1D finite-difference solver of the nanowire heat-flow
//!   equation with a normal/superconducting phase field, used to find
//!   self-sustaining normal domains, retrapping currents, and hotspot
//!   lifetimes.
//! * [`response`] — count-rate-curve fitting (error-function sigmoid) and
//!   saturation-plateau metrics for comparing irradiation schemes.
//! * [`surface`] — AFM/TEM analysis procedures: strip-averaged profiles, RMS
//!   roughness, elevation-onset fits, wrinkling amplitude, and dark-contrast
//!   depth segmentation.
//!
//! All physics is carried in SI units internally; [`units`] provides exact
//! decimal conversions for the bench units (µA, nm, ions/nm²) used in data
//! files and reports. Everything is pure functions over immutable value
//! objects and safe to evaluate concurrently.

pub mod dose;
pub mod error;
pub mod film;
pub mod io;
pub mod math;
pub mod response;
pub mod surface;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
