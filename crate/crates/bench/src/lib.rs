//! Fixtures shared by the benchmarks.

use nanograting::diffraction::{DetectorGrid, SimulationSetup, VelocityBand};
use nanograting::{presets, Trace};

/// PcH₂ at 220 m/s through a preset grating, default detector.
pub fn preset_setup(grating: &str) -> SimulationSetup {
    SimulationSetup::new(
        presets::pch2(),
        presets::grating(grating).expect("known preset"),
        VelocityBand::monochromatic(220.0),
    )
    .expect("valid preset setup")
}

/// Smaller setup used for the fit benchmark: 16 coherent slits and a
/// ±80 μm window.
pub fn fit_setup(grating: &str) -> SimulationSetup {
    let mut s = preset_setup(grating);
    s.n_slits = Some(16);
    s.grid = DetectorGrid::symmetric(80e-6, 0.5e-6, 3.5e-6).expect("valid grid");
    s
}

/// Synthetic measurement at `s_eff`.
pub fn target(setup: &SimulationSetup, s_eff: f64) -> Trace {
    setup
        .with_effective_slit_width(s_eff)
        .detector_trace()
        .expect("simulation succeeds")
}
