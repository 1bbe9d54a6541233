//! Physical constants (SI, CODATA 2018 exact values where defined).

use std::f64::consts::PI;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Rubidium D2 line, m. Reference photon for ħk momentum units.
pub const RUBIDIUM_D2_WAVELENGTH: f64 = 780.241e-9;
/// Gravitational acceleration used for the beamline, m/s².
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Bundle of constants handed to calculations that let the reference
/// photon wavelength be overridden.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub h: f64,
    pub hbar: f64,
    pub k_b: f64,
    pub reference_wavelength: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        h: PLANCK,
        hbar: HBAR,
        k_b: BOLTZMANN,
        reference_wavelength: RUBIDIUM_D2_WAVELENGTH,
    };

    pub fn with_reference_wavelength(self, wavelength: f64) -> Self {
        PhysicalConstants {
            reference_wavelength: wavelength,
            ..self
        }
    }

    /// Momentum ħk of one reference photon.
    pub fn photon_momentum(&self) -> f64 {
        self.hbar * 2.0 * PI / self.reference_wavelength
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hbar_is_h_over_two_pi() {
        assert_eq!(HBAR, PLANCK / (2.0 * PI));
        let c = PhysicalConstants::default();
        assert!((c.hbar * 2.0 * PI - c.h).abs() <= 1e-15 * c.h);
    }

    #[test]
    fn reference_wavelength_override() {
        let c = PhysicalConstants::CODATA.with_reference_wavelength(589e-9);
        assert_eq!(c.reference_wavelength, 589e-9);
        assert_eq!(c.h, PLANCK);
    }
}
