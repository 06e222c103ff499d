//! Physical constants (CODATA 2018) and unit helpers.
//!
//! All angular frequencies in this crate are in rad/s. Conversion from
//! ordinary frequency happens once, at the input boundary.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Reduced Planck constant ħ (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant k_B (J/K), exact.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity ε₀ (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Bohr radius a₀ (m).
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Elementary charge e (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// The constant set as a value, for code that wants to pass it around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub kb: f64,
    pub c: f64,
    pub epsilon0: f64,
    pub a0: f64,
    pub e: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        kb: K_B,
        c: C,
        epsilon0: EPSILON_0,
        a0: BOHR_RADIUS,
        e: ELEMENTARY_CHARGE,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Transition dipole moment in C·m from a multiple of a₀·e.
pub fn dipole_from_a0e(multiple: f64) -> Result<f64> {
    if !(multiple.is_finite() && multiple > 0.0) {
        return Err(domain(format!(
            "dipole multiple must be positive and finite, got {multiple}"
        )));
    }
    Ok(multiple * BOHR_RADIUS * ELEMENTARY_CHARGE)
}

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn hz_to_rad_per_s(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
pub fn rad_per_s_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Angular frequency of light with the given vacuum wavelength (m).
pub fn omega_from_wavelength(wavelength_m: f64) -> Result<f64> {
    if !(wavelength_m.is_finite() && wavelength_m > 0.0) {
        return Err(domain(format!(
            "wavelength must be positive and finite, got {wavelength_m}"
        )));
    }
    Ok(2.0 * PI * C / wavelength_m)
}
