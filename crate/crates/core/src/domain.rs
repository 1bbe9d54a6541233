//! Molecules, gratings and the beamline they sit in.
//!
//! Every quantity is stored in SI base units. Conversions from nm, μm or
//! atomic mass units happen where the values are read in.

use serde::{Deserialize, Serialize};

use crate::constants::PLANCK;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub name: String,
    /// kg
    pub mass: f64,
    /// Principal static polarizability values in Å³. Carried as metadata.
    #[serde(default)]
    pub polarizability: Option<[f64; 3]>,
}

impl Molecule {
    pub fn new(name: impl Into<String>, mass: f64) -> Result<Self> {
        let m = Molecule {
            name: name.into(),
            mass,
            polarizability: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_polarizability(mut self, values: [f64; 3]) -> Result<Self> {
        self.polarizability = Some(values);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::domain(format!(
                "molecule {} must have positive mass, got {}",
                self.name, self.mass
            )));
        }
        if let Some(p) = self.polarizability {
            if p.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::domain("polarizability values must be non-negative"));
            }
        }
        Ok(())
    }

    /// de Broglie wavelength h/(mv) at speed `velocity` (m/s).
    pub fn de_broglie_wavelength(&self, velocity: f64) -> Result<f64> {
        if !(velocity > 0.0 && velocity.is_finite()) {
            return Err(Error::domain(format!(
                "velocity must be positive, got {velocity}"
            )));
        }
        Ok(PLANCK / (self.mass * velocity))
    }

    /// Speed whose de Broglie wavelength is `wavelength`.
    pub fn velocity_for_wavelength(&self, wavelength: f64) -> Result<f64> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::domain(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(PLANCK / (self.mass * wavelength))
    }
}

/// A binary transmission grating.
///
/// `slit_width` is the geometric opening; `effective_slit_width` is the
/// narrower opening that stands in for the attractive molecule-wall
/// interaction in the diffraction model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grating {
    pub label: String,
    pub period: f64,
    pub slit_width: f64,
    pub effective_slit_width: f64,
    pub bar_length: f64,
    pub bar_width: f64,
    /// Width of the membrane strip the bar was cut from, when it differs
    /// from `bar_width` (a rolled-up nanoscroll keeps its ribbon mass).
    #[serde(default)]
    pub ribbon_width: Option<f64>,
    pub layers: u32,
    /// kg/m² per layer.
    #[serde(default)]
    pub areal_density: Option<f64>,
    /// Allowed mismatch between `bar_width` and `period - slit_width`.
    pub tolerance: f64,
    /// Opening fraction as quoted by the measurement, which need not equal
    /// `slit_width / period`.
    #[serde(default)]
    pub quoted_opening_fraction: Option<f64>,
    /// Known in-plane vibration amplitude of a bar, m.
    #[serde(default)]
    pub vibration_amplitude: Option<f64>,
    /// Diameter of a rolled bar, m.
    #[serde(default)]
    pub scroll_diameter: Option<f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Grating {
    /// A grating with no bar or material data. Bars fill the rest of the
    /// period.
    pub fn new(
        label: impl Into<String>,
        period: f64,
        slit_width: f64,
        effective_slit_width: f64,
    ) -> Result<Self> {
        let g = Grating {
            label: label.into(),
            period,
            slit_width,
            effective_slit_width,
            bar_length: 0.0,
            bar_width: period - slit_width,
            ribbon_width: None,
            layers: 1,
            areal_density: None,
            tolerance: 1e-9,
            quoted_opening_fraction: None,
            vibration_amplitude: None,
            scroll_diameter: None,
            notes: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::domain(format!("grating {}: {msg}", self.label)));
        if !(self.slit_width > 0.0 && self.slit_width < self.period) {
            return bad(format!(
                "need 0 < slit width < period, got s = {:e}, d = {:e}",
                self.slit_width, self.period
            ));
        }
        if !(self.effective_slit_width > 0.0 && self.effective_slit_width <= self.slit_width) {
            return bad(format!(
                "need 0 < effective slit width <= slit width, got {:e} vs {:e}",
                self.effective_slit_width, self.slit_width
            ));
        }
        if self.bar_length < 0.0 || self.bar_width < 0.0 {
            return bad("bar dimensions must be non-negative".into());
        }
        let mismatch = (self.bar_width - (self.period - self.slit_width)).abs();
        if mismatch > self.tolerance {
            return bad(format!(
                "bar width {:e} differs from period - slit width by {:e} (tolerance {:e})",
                self.bar_width, mismatch, self.tolerance
            ));
        }
        if let Some(rho) = self.areal_density {
            if !(rho > 0.0) {
                return bad("areal density must be positive".into());
            }
        }
        Ok(())
    }

    pub fn opening_fraction(&self) -> f64 {
        self.slit_width / self.period
    }

    /// Copy with a different effective slit width. Not validated.
    pub fn with_effective_slit_width(&self, s_eff: f64) -> Self {
        Grating {
            effective_slit_width: s_eff,
            ..self.clone()
        }
    }

    /// Mass of one bar: layers × areal density × length × width.
    pub fn bar_mass(&self) -> Result<f64> {
        let density = self.areal_density.ok_or_else(|| {
            Error::config(format!("grating {} has no areal density", self.label))
        })?;
        let width = self.ribbon_width.unwrap_or(self.bar_width);
        Ok(f64::from(self.layers) * density * self.bar_length * width)
    }

    /// True when the quoted opening fraction disagrees with s/d by more
    /// than `slack` (absolute).
    pub fn opening_fraction_inconsistent(&self, slack: f64) -> bool {
        self.quoted_opening_fraction
            .is_some_and(|q| (q - self.opening_fraction()).abs() > slack)
    }
}

/// Source, grating and detector positions along the beam, plus the vertical
/// coordinates used by the free-fall relation (up-positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamlineGeometry {
    /// Source to grating, m.
    pub source_to_grating: f64,
    /// Source to detector, m.
    pub source_to_detector: f64,
    /// m/s²
    pub gravity: f64,
    /// Source height, m.
    pub y0: f64,
    /// Grating height, m.
    pub y1: f64,
}

impl BeamlineGeometry {
    pub fn new(source_to_grating: f64, source_to_detector: f64, gravity: f64) -> Result<Self> {
        let g = BeamlineGeometry {
            source_to_grating,
            source_to_detector,
            gravity,
            y0: 0.0,
            y1: 0.0,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_heights(mut self, y0: f64, y1: f64) -> Self {
        self.y0 = y0;
        self.y1 = y1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.source_to_grating > 0.0 && self.source_to_grating < self.source_to_detector) {
            return Err(Error::domain(format!(
                "need 0 < L1 < L, got L1 = {}, L = {}",
                self.source_to_grating, self.source_to_detector
            )));
        }
        if !(self.gravity > 0.0) {
            return Err(Error::domain("gravitational acceleration must be positive"));
        }
        Ok(())
    }

    /// Grating to detector distance L2 = L − L1.
    pub fn grating_to_detector(&self) -> f64 {
        self.source_to_detector - self.source_to_grating
    }
}

impl Default for BeamlineGeometry {
    /// L = 2140 mm, L1 = 1554 mm, g = 9.81 m/s², level beam.
    fn default() -> Self {
        BeamlineGeometry {
            source_to_grating: 1.554,
            source_to_detector: 2.140,
            gravity: crate::constants::STANDARD_GRAVITY,
            y0: 0.0,
            y1: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    /// Width of the evaporation spot, m.
    pub source_width: f64,
    /// Most probable velocity v_p of the beam distribution, m/s.
    pub most_probable_velocity: f64,
}

impl SourceModel {
    pub fn new(source_width: f64, most_probable_velocity: f64) -> Result<Self> {
        let s = SourceModel {
            source_width,
            most_probable_velocity,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.source_width > 0.0) {
            return Err(Error::domain("source width must be positive"));
        }
        if !(self.most_probable_velocity > 0.0) {
            return Err(Error::domain("most probable velocity must be positive"));
        }
        Ok(())
    }
}

impl Default for SourceModel {
    /// 1.5 μm laser focus; v_p = 180 m/s puts the flux maximum
    /// v_p·√(3/2) at 220 m/s.
    fn default() -> Self {
        SourceModel {
            source_width: 1.5e-6,
            most_probable_velocity: 180.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ATOMIC_MASS_UNIT;

    fn pch2() -> Molecule {
        Molecule::new("PcH2", 8.5e-25).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn de_broglie_examples() {
        let m = pch2();
        let l220 = m.de_broglie_wavelength(220.0).unwrap();
        assert!(rel(l220, 3.54e-12) < 2e-3, "{l220}");
        let l260 = m.de_broglie_wavelength(260.0).unwrap();
        assert!(rel(l260, 3.00e-12) < 2e-3, "{l260}");
        assert_eq!(m.de_broglie_wavelength(440.0).unwrap(), l220 / 2.0);
    }

    #[test]
    fn de_broglie_rejects_non_positive_velocity() {
        let m = pch2();
        assert!(matches!(m.de_broglie_wavelength(0.0), Err(Error::Domain(_))));
        assert!(matches!(m.de_broglie_wavelength(-3.0), Err(Error::Domain(_))));
        assert!(m.de_broglie_wavelength(f64::NAN).is_err());
    }

    #[test]
    fn molecule_invariants() {
        assert!(Molecule::new("x", 0.0).is_err());
        assert!(Molecule::new("x", 514.0 * ATOMIC_MASS_UNIT)
            .unwrap()
            .with_polarizability([1.0, -1.0, 0.0])
            .is_err());
    }

    #[test]
    fn opening_fraction_examples() {
        let g = Grating::new("slg", 101e-9, 59e-9, 35e-9).unwrap();
        assert!((g.opening_fraction() - 0.58).abs() < 0.005);
        let g = Grating::new("scroll-flat", 87e-9, 23e-9, 23e-9).unwrap();
        assert!((g.opening_fraction() - 0.26).abs() < 0.005);
        let g = Grating::new("half", 100e-9, 50e-9, 50e-9).unwrap();
        assert_eq!(g.opening_fraction(), 0.5);
    }

    #[test]
    fn grating_invariants() {
        assert!(Grating::new("a", 100e-9, 100e-9, 50e-9).is_err());
        assert!(Grating::new("b", 100e-9, 50e-9, 60e-9).is_err());
        assert!(Grating::new("c", 100e-9, 50e-9, 0.0).is_err());
        let mut g = Grating::new("d", 100e-9, 50e-9, 50e-9).unwrap();
        g.bar_width = 30e-9;
        g.tolerance = 5e-9;
        assert!(g.validate().is_err());
    }

    #[test]
    fn bar_mass_needs_density() {
        let g = Grating::new("g", 100e-9, 50e-9, 50e-9).unwrap();
        assert!(matches!(g.bar_mass(), Err(Error::Config(_))));
    }

    #[test]
    fn bar_mass_single_layer_graphene() {
        let mut g = Grating::new("slg", 101e-9, 59e-9, 35e-9).unwrap();
        g.bar_length = 247e-9;
        g.bar_width = 41e-9;
        g.tolerance = 2e-9;
        g.areal_density = Some(7.6e-7);
        assert!(rel(g.bar_mass().unwrap(), 7.7e-21) < 0.05);
        g.bar_width = 0.0;
        assert_eq!(g.bar_mass().unwrap(), 0.0);
    }

    #[test]
    fn geometry_invariants() {
        let g = BeamlineGeometry::default();
        assert!((g.grating_to_detector() - 0.586).abs() < 1e-12);
        assert!(BeamlineGeometry::new(2.2, 2.14, 9.81).is_err());
        assert!(BeamlineGeometry::new(1.0, 2.14, 0.0).is_err());
        assert!(SourceModel::new(0.0, 200.0).is_err());
    }
}
