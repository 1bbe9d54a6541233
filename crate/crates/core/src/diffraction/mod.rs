//! Forward model of the monochromatic diffraction pattern.
//!
//! [`kirchhoff_pattern`] sums the Fresnel-Kirchhoff amplitude of N
//! coherently illuminated slits on a detector grid. [`SimulationSetup`]
//! wraps it with the coherence estimate, velocity band averaging and the
//! detector point-spread function to produce what a camera would record.

mod far_field;
mod kirchhoff;
mod psf;
mod simulate;
mod trace;

pub use far_field::{far_field_orders, DiffractionOrder, FarFieldOrders};
pub use kirchhoff::{kirchhoff_pattern, Illumination, KirchhoffParams, PhaseEvaluation};
pub use psf::detector_convolve;
pub(crate) use psf::blur_samples;
pub use simulate::{SimulationSetup, VelocityBand, DEFAULT_PIXEL_PITCH, DEFAULT_WINDOW_ORDERS};
pub use trace::{Normalization, Trace};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::{BeamlineGeometry, Molecule, SourceModel};
use crate::error::{Error, Result};

/// Default Gaussian detector blur, m.
pub const DEFAULT_PSF_SIGMA: f64 = 3.5e-6;
/// Default prefactor C in θ_coh = C·λ/w.
pub const DEFAULT_COHERENCE_PREFACTOR: f64 = 1.5;

/// Wave number 2π/λ of a molecule at speed `velocity`.
pub fn wave_number(molecule: &Molecule, velocity: f64) -> Result<f64> {
    Ok(2.0 * PI / molecule.de_broglie_wavelength(velocity)?)
}

/// Transverse coherence of the beam at the grating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceResult {
    /// rad
    pub coherence_angle: f64,
    /// Coherence width at the grating, m.
    pub coherence_width: f64,
    /// Number of slits inside the coherence width, at least one.
    pub n_coherent_slits: usize,
}

/// Van Cittert-Zernike estimate: θ = C·λ/w, width = θ·L1, N = ⌊width/d⌋ ≥ 1.
pub fn coherence(
    source: &SourceModel,
    geometry: &BeamlineGeometry,
    wavelength: f64,
    period: f64,
    prefactor: f64,
) -> CoherenceResult {
    let angle = prefactor * wavelength / source.source_width;
    let width = angle * geometry.source_to_grating;
    let slits = (width / period).floor();
    let n = if slits.is_finite() && slits >= 1.0 {
        slits as usize
    } else {
        1
    };
    CoherenceResult {
        coherence_angle: angle,
        coherence_width: width,
        n_coherent_slits: n,
    }
}

/// Uniform detector sampling window plus the Gaussian blur of the detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub pixel_pitch: f64,
    pub psf_sigma: f64,
}

impl DetectorGrid {
    pub fn new(x_min: f64, x_max: f64, pixel_pitch: f64, psf_sigma: f64) -> Result<Self> {
        let g = DetectorGrid {
            x_min,
            x_max,
            pixel_pitch,
            psf_sigma,
        };
        g.validate()?;
        Ok(g)
    }

    /// Window [-half_width, half_width] with a pixel centred on x = 0.
    pub fn symmetric(half_width: f64, pixel_pitch: f64, psf_sigma: f64) -> Result<Self> {
        let half_pixels = (half_width / pixel_pitch).floor();
        Self::new(
            -half_pixels * pixel_pitch,
            half_pixels * pixel_pitch,
            pixel_pitch,
            psf_sigma,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max) {
            return Err(Error::domain(format!(
                "detector window needs x_min < x_max, got [{:e}, {:e}]",
                self.x_min, self.x_max
            )));
        }
        if !(self.pixel_pitch > 0.0) {
            return Err(Error::domain("pixel pitch must be positive"));
        }
        if !(self.psf_sigma >= 0.0) {
            return Err(Error::domain("detector sigma must be non-negative"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.x_max - self.x_min) / self.pixel_pitch + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.pixel_pitch
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    /// Same window sampled `factor` times more finely; every `factor`-th
    /// fine sample coincides with a pixel centre.
    pub fn oversampled(&self, factor: usize) -> DetectorGrid {
        let factor = factor.max(1);
        let n = self.len();
        DetectorGrid {
            x_min: self.x_min,
            x_max: self.position(n - 1),
            pixel_pitch: self.pixel_pitch / factor as f64,
            psf_sigma: self.psf_sigma,
        }
    }

    /// Same pitch and blur, shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> DetectorGrid {
        DetectorGrid {
            x_min: self.x_min + offset,
            x_max: self.x_max + offset,
            ..*self
        }
    }
}
