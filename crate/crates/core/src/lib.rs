//! Simulation and analysis of far-field molecular diffraction at ultra-thin
//! nanomechanical gratings.
//!
//! The crate is organised by task:
//!
//! * [`domain`] and [`constants`]: molecules, gratings, beamline geometry.
//! * [`presets`]: the five measured gratings and the PcH₂ molecule.
//! * [`diffraction`]: Fresnel-Kirchhoff forward model, coherence estimate,
//!   far-field order positions and the detector point-spread function.
//! * [`gravity`]: free fall through the beamline, velocity inversion and
//!   2D interferogram synthesis from a velocity ensemble.
//! * [`vdwfit`]: effective slit width fitting and order populations.
//! * [`limits`]: recoil and thermal-vibration budget of the grating bars.
//! * [`imaging`]: background subtraction, band extraction and the "Hot"
//!   colormap renderer.
//! * [`io`]: trace CSV, raw interferogram files and key=value reports.

pub mod constants;
pub mod diffraction;
pub mod domain;
pub mod error;
pub mod gravity;
pub mod imaging;
pub mod io;
pub mod limits;
pub mod optimize;
pub mod presets;
pub mod vdwfit;

pub use constants::PhysicalConstants;
pub use diffraction::{
    CoherenceResult, DetectorGrid, Illumination, Normalization, SimulationSetup, Trace,
    VelocityBand,
};
pub use domain::{BeamlineGeometry, Grating, Molecule, SourceModel};
pub use error::{Error, Result};
pub use gravity::{ImageGrid, Interferogram, VelocityDistribution};
pub use limits::LimitsReport;
pub use vdwfit::SlitFitResult;
