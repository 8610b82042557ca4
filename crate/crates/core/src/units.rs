//! Exact decimal conversions between internal SI units and bench units.
//!
//! All physics in this crate is carried in SI (m, s, K, A, W). Data files and
//! reports use the bench units of the lab: nanometers, micrometers,
//! microamperes, and ions per square nanometer. The scalings here are exact
//! powers of ten, so converting in and out is lossless up to one rounding.

/// Nanometers to meters. Divides by the exactly representable 1e9 so the
/// result is the correctly rounded quotient.
#[inline]
pub fn nm_to_m(x: f64) -> f64 {
    x / 1e9
}

/// Meters to nanometers.
#[inline]
pub fn m_to_nm(x: f64) -> f64 {
    x * 1e9
}

/// Micrometers to meters.
#[inline]
pub fn um_to_m(x: f64) -> f64 {
    x / 1e6
}

/// Meters to micrometers.
#[inline]
pub fn m_to_um(x: f64) -> f64 {
    x * 1e6
}

/// Microamperes to amperes.
#[inline]
pub fn ua_to_a(x: f64) -> f64 {
    x / 1e6
}

/// Amperes to microamperes.
#[inline]
pub fn a_to_ua(x: f64) -> f64 {
    x * 1e6
}

/// Nanoseconds to seconds.
#[inline]
pub fn ns_to_s(x: f64) -> f64 {
    x / 1e9
}

/// Seconds to nanoseconds.
#[inline]
pub fn s_to_ns(x: f64) -> f64 {
    x * 1e9
}
