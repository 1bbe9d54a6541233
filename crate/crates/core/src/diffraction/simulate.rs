use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    coherence, detector_convolve, kirchhoff_pattern, CoherenceResult, DetectorGrid,
    Illumination, KirchhoffParams, Normalization, Trace, DEFAULT_COHERENCE_PREFACTOR,
    DEFAULT_PSF_SIGMA,
};
use crate::domain::{BeamlineGeometry, Grating, Molecule, SourceModel};
use crate::error::{Error, Result};

/// Default detector pixel pitch, m.
pub const DEFAULT_PIXEL_PITCH: f64 = 0.5e-6;
/// Diffraction orders covered by the default detector window.
pub const DEFAULT_WINDOW_ORDERS: f64 = 12.0;

/// Narrow velocity band averaged incoherently, equal weight per class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityBand {
    pub center: f64,
    pub half_width: f64,
    pub classes: usize,
}

impl VelocityBand {
    pub fn new(center: f64, half_width: f64, classes: usize) -> Result<Self> {
        let b = VelocityBand {
            center,
            half_width,
            classes,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn monochromatic(velocity: f64) -> Self {
        VelocityBand {
            center: velocity,
            half_width: 0.0,
            classes: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center > 0.0) {
            return Err(Error::domain("band centre velocity must be positive"));
        }
        if !(self.half_width >= 0.0 && self.half_width < self.center) {
            return Err(Error::domain("band half width must lie in [0, centre)"));
        }
        if self.classes == 0 {
            return Err(Error::domain("band needs at least one velocity class"));
        }
        Ok(())
    }

    /// Class midpoints across [centre − half_width, centre + half_width].
    pub fn velocities(&self) -> Vec<f64> {
        if self.classes == 1 || self.half_width == 0.0 {
            return vec![self.center];
        }
        let lo = self.center - self.half_width;
        let step = 2.0 * self.half_width / self.classes as f64;
        (0..self.classes)
            .map(|i| lo + (i as f64 + 0.5) * step)
            .collect()
    }

    pub fn slowest(&self) -> f64 {
        self.velocities()[0]
    }
}

impl Default for VelocityBand {
    /// 220 ± 10 m/s in five classes.
    fn default() -> Self {
        VelocityBand {
            center: 220.0,
            half_width: 10.0,
            classes: 5,
        }
    }
}

/// Everything needed to turn a grating into a detector trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSetup {
    pub molecule: Molecule,
    pub grating: Grating,
    pub geometry: BeamlineGeometry,
    pub source: SourceModel,
    pub coherence_prefactor: f64,
    /// Overrides the coherence estimate when set.
    pub n_slits: Option<usize>,
    pub illumination: Illumination,
    pub band: VelocityBand,
    pub grid: DetectorGrid,
    pub max_phase_step: f64,
}

impl SimulationSetup {
    /// Default beamline, 1.5 μm source, uniform illumination and a detector
    /// window covering twelve orders at the slowest band velocity.
    pub fn new(molecule: Molecule, grating: Grating, band: VelocityBand) -> Result<Self> {
        band.validate()?;
        let geometry = BeamlineGeometry::default();
        let grid = Self::default_grid(&molecule, &grating, &geometry, &band)?;
        Ok(SimulationSetup {
            molecule,
            grating,
            geometry,
            source: SourceModel::default(),
            coherence_prefactor: DEFAULT_COHERENCE_PREFACTOR,
            n_slits: None,
            illumination: Illumination::Uniform,
            band,
            grid,
            max_phase_step: 0.2,
        })
    }

    pub fn default_grid(
        molecule: &Molecule,
        grating: &Grating,
        geometry: &BeamlineGeometry,
        band: &VelocityBand,
    ) -> Result<DetectorGrid> {
        let lambda = molecule.de_broglie_wavelength(band.slowest())?;
        let fringe = lambda * geometry.grating_to_detector() / grating.period;
        DetectorGrid::symmetric(
            (DEFAULT_WINDOW_ORDERS + 0.5) * fringe,
            DEFAULT_PIXEL_PITCH,
            DEFAULT_PSF_SIGMA,
        )
    }

    pub fn with_effective_slit_width(&self, s_eff: f64) -> Self {
        SimulationSetup {
            grating: self.grating.with_effective_slit_width(s_eff),
            ..self.clone()
        }
    }

    pub fn with_grid(&self, grid: DetectorGrid) -> Self {
        SimulationSetup {
            grid,
            ..self.clone()
        }
    }

    pub fn with_band(&self, band: VelocityBand) -> Self {
        SimulationSetup {
            band,
            ..self.clone()
        }
    }

    pub fn coherence_at(&self, velocity: f64) -> Result<CoherenceResult> {
        let lambda = self.molecule.de_broglie_wavelength(velocity)?;
        Ok(coherence(
            &self.source,
            &self.geometry,
            lambda,
            self.grating.period,
            self.coherence_prefactor,
        ))
    }

    pub fn kirchhoff_params(&self, velocity: f64) -> Result<KirchhoffParams> {
        let k = super::wave_number(&self.molecule, velocity)?;
        let n = match self.n_slits {
            Some(n) => n,
            None => self.coherence_at(velocity)?.n_coherent_slits,
        };
        Ok(KirchhoffParams {
            illumination: self.illumination,
            max_phase_step: self.max_phase_step,
            ..KirchhoffParams::new(k, self.geometry.grating_to_detector(), n)
        })
    }

    /// Fringe period λL2/d at `velocity`.
    pub fn fringe_period(&self, velocity: f64) -> Result<f64> {
        Ok(self.molecule.de_broglie_wavelength(velocity)? * self.geometry.grating_to_detector()
            / self.grating.period)
    }

    /// Sampling factor that keeps the unblurred pattern sampled finer than
    /// its band limit λL2/W, with W the illuminated aperture.
    pub fn oversampling(&self, velocity: f64) -> Result<usize> {
        if self.grid.psf_sigma == 0.0 {
            return Ok(1);
        }
        let p = self.kirchhoff_params(velocity)?;
        let aperture = p.n_slits as f64 * self.grating.period + self.grating.effective_slit_width;
        let limit = 0.75 * p.wavelength() * p.distance / aperture;
        Ok((self.grid.pixel_pitch / limit).ceil().max(1.0) as usize)
    }

    /// Unblurred Kirchhoff intensity on the detector grid.
    pub fn raw_trace(&self, velocity: f64) -> Result<Trace> {
        kirchhoff_pattern(&self.grating, &self.kirchhoff_params(velocity)?, &self.grid)
    }

    /// Blurred intensity of one velocity class at the pixel centres, per
    /// unit transmitted flux (N·s_eff).
    pub fn class_trace(&self, velocity: f64) -> Result<Trace> {
        let params = self.kirchhoff_params(velocity)?;
        let factor = self.oversampling(velocity)?;
        let fine_grid = self.grid.oversampled(factor);
        let fine = kirchhoff_pattern(&self.grating, &params, &fine_grid)?;
        let blurred = detector_convolve(&fine, self.grid.psf_sigma)?;
        let flux = params.n_slits as f64 * self.grating.effective_slit_width;
        let positions = self.grid.positions();
        let intensities = (0..positions.len())
            .map(|i| blurred.intensities[i * factor] / flux)
            .collect();
        Trace::new(positions, intensities, Normalization::Raw)
    }

    /// Band-averaged detector trace with peak value 1.
    pub fn detector_trace(&self) -> Result<Trace> {
        let velocities = self.band.velocities();
        let classes: Vec<Trace> = velocities
            .par_iter()
            .map(|&v| self.class_trace(v))
            .collect::<Result<_>>()?;
        let mut sum = vec![0.0; self.grid.len()];
        for t in &classes {
            for (acc, v) in sum.iter_mut().zip(&t.intensities) {
                *acc += v;
            }
        }
        Ok(Trace::new(self.grid.positions(), sum, Normalization::Raw)?.normalized(Normalization::Max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn band_velocities() {
        let b = VelocityBand::new(220.0, 10.0, 5).unwrap();
        assert_eq!(b.velocities(), vec![212.0, 216.0, 220.0, 224.0, 228.0]);
        assert_eq!(VelocityBand::monochromatic(200.0).velocities(), vec![200.0]);
        assert!(VelocityBand::new(220.0, 230.0, 3).is_err());
        assert!(VelocityBand::new(220.0, 1.0, 0).is_err());
    }

    #[test]
    fn default_window_covers_twelve_orders() {
        let setup = SimulationSetup::new(
            presets::pch2(),
            presets::grating("sinx").unwrap(),
            VelocityBand::monochromatic(220.0),
        )
        .unwrap();
        let fringe = setup.fringe_period(220.0).unwrap();
        assert!(setup.grid.x_max > 12.0 * fringe);
        assert_eq!(setup.kirchhoff_params(220.0).unwrap().n_slits, 52);
        assert!(setup.oversampling(220.0).unwrap() >= 2);
    }

    #[test]
    fn detector_trace_is_peak_normalised_and_deterministic() {
        let mut setup = SimulationSetup::new(
            presets::pch2(),
            presets::grating("slg").unwrap(),
            VelocityBand::new(220.0, 10.0, 2).unwrap(),
        )
        .unwrap();
        setup.grid = DetectorGrid::symmetric(60e-6, 0.5e-6, DEFAULT_PSF_SIGMA).unwrap();
        let a = setup.detector_trace().unwrap();
        let b = setup.detector_trace().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.max(), 1.0);
        assert_eq!(a.normalization, Normalization::Max);
    }
}
