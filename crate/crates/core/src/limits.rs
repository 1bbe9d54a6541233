//! Recoil budget of a grating bar: can a diffracted molecule leave
//! which-path information in the grating?
//!
//! The single-slit envelope imposes a momentum spread Δp_diff = 0.89·h/s on
//! the molecule. A bar localised to σ carries an intrinsic uncertainty
//! Δp_grat = ħ/(2σ). Diffraction stays coherent while Δp_grat > Δp_diff,
//! i.e. s > 3.56π·σ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR, PLANCK};
use crate::error::{Error, Result};

/// FWHM factor of the single-slit envelope, Δx·Δp ≥ 0.89 h.
pub const ENVELOPE_FWHM_FACTOR: f64 = 0.89;
/// Young's modulus of a single-wall carbon nanotube, Pa.
pub const NANOTUBE_YOUNGS_MODULUS: f64 = 1e12;
/// Footprint of one adsorbed PcH₂ molecule, m².
pub const DEFAULT_MOLECULE_FOOTPRINT: f64 = 1.7e-18;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

/// Δp_diff = 0.89·h/s.
pub fn diffraction_momentum_spread(slit_width: f64) -> Result<f64> {
    positive("slit width", slit_width)?;
    Ok(ENVELOPE_FWHM_FACTOR * PLANCK / slit_width)
}

/// Δp_grat = ħ/(2σ).
pub fn grating_momentum_uncertainty(sigma: f64) -> Result<f64> {
    positive("position uncertainty", sigma)?;
    Ok(HBAR / (2.0 * sigma))
}

/// Thermal rms displacement of a doubly clamped rod of length `length` and
/// diameter `diameter`: √(k_B·T·L³ / (192·Y·I)) with I = π·d⁴/64.
pub fn thermal_scroll_amplitude(
    length: f64,
    diameter: f64,
    temperature: f64,
    youngs_modulus: f64,
) -> Result<f64> {
    positive("rod length", length)?;
    positive("rod diameter", diameter)?;
    positive("Young's modulus", youngs_modulus)?;
    if !(temperature >= 0.0) {
        return Err(Error::domain(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    let moment = PI * diameter.powi(4) / 64.0;
    Ok((BOLTZMANN * temperature * length.powi(3) / (192.0 * youngs_modulus * moment)).sqrt())
}

/// Smallest slit that keeps the recoil inside the grating's uncertainty,
/// 3.56π·σ.
pub fn min_coherent_slit(sigma: f64) -> f64 {
    2.0 * 2.0 * ENVELOPE_FWHM_FACTOR * PI * sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceCheck {
    pub coherent: bool,
    /// Δp_grat / Δp_diff.
    pub margin: f64,
}

pub fn coherence_check(sigma: f64, slit_width: f64) -> Result<CoherenceCheck> {
    let grat = grating_momentum_uncertainty(sigma)?;
    let diff = diffraction_momentum_spread(slit_width)?;
    Ok(CoherenceCheck {
        coherent: grat > diff,
        margin: grat / diff,
    })
}

/// Momentum split between orders ±n_max, in photon recoils ħk_ref:
/// 2·n_max·(h/d) / (h/λ_ref) = 2·n_max·λ_ref/d.
pub fn momentum_transfer_hk(period: f64, n_max: u32, reference_wavelength: f64) -> Result<f64> {
    positive("grating period", period)?;
    positive("reference wavelength", reference_wavelength)?;
    Ok(2.0 * f64::from(n_max) * reference_wavelength / period)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdsorptionCoverage {
    /// Molecules per cm².
    pub density_per_cm2: f64,
    /// Covered fraction of the surface.
    pub surface_fraction: f64,
}

pub fn adsorption_coverage(
    molecule_count: f64,
    open_area: f64,
    footprint: f64,
) -> Result<AdsorptionCoverage> {
    positive("open area", open_area)?;
    if !(molecule_count >= 0.0) || !(footprint >= 0.0) {
        return Err(Error::domain("molecule count and footprint must be non-negative"));
    }
    let per_m2 = molecule_count / open_area;
    Ok(AdsorptionCoverage {
        density_per_cm2: per_m2 * 1e-4,
        surface_fraction: per_m2 * footprint,
    })
}

/// Inputs of the recoil budget. Lengths in m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitsInput {
    pub slit_width: f64,
    pub sigma: f64,
    pub period: f64,
    pub n_max: u32,
    pub reference_wavelength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitsReport {
    pub dp_diff: f64,
    pub sigma: f64,
    pub dp_grating: f64,
    pub s_min: f64,
    pub coherent: bool,
    pub margin: f64,
    pub momentum_transfer_hk: f64,
}

impl LimitsReport {
    pub fn compute(input: &LimitsInput) -> Result<Self> {
        let dp_diff = diffraction_momentum_spread(input.slit_width)?;
        // a motionless grating (σ = 0) has unbounded momentum uncertainty
        let check = if input.sigma == 0.0 {
            CoherenceCheck {
                coherent: true,
                margin: f64::INFINITY,
            }
        } else {
            coherence_check(input.sigma, input.slit_width)?
        };
        let dp_grating = if input.sigma == 0.0 {
            f64::INFINITY
        } else {
            grating_momentum_uncertainty(input.sigma)?
        };
        Ok(LimitsReport {
            dp_diff,
            sigma: input.sigma,
            dp_grating,
            s_min: min_coherent_slit(input.sigma),
            coherent: check.coherent,
            margin: check.margin,
            momentum_transfer_hk: momentum_transfer_hk(
                input.period,
                input.n_max,
                input.reference_wavelength,
            )?,
        })
    }

    /// (key, value) pairs in report order, SI units.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("dp_diff_kg_m_s", format!("{:e}", self.dp_diff)),
            ("sigma_m", format!("{:e}", self.sigma)),
            ("dp_grating_kg_m_s", format!("{:e}", self.dp_grating)),
            ("s_min_m", format!("{:e}", self.s_min)),
            ("coherent", self.coherent.to_string()),
            ("margin", format!("{:.6}", self.margin)),
            ("momentum_transfer_hk", format!("{:.6}", self.momentum_transfer_hk)),
        ]
    }
}
