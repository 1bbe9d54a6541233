//! Free fall through the beamline.
//!
//! A molecule that reaches the detector passed through both the source
//! (height y0, z = 0) and the grating (height y1, z = L1). Its parabola
//! then meets the detector plane (z = L) at
//!
//! ```text
//! y2 = y0 + (y1 − y0)·L/L1 − g·L·(L − L1) / (2v²)
//! ```
//!
//! which inverts to the velocity formula implemented by [`fit_velocity`].

mod ensemble;
mod image;
mod stripes;

pub use ensemble::{VelocityDistribution, DEFAULT_BEAM_CLASSES};
pub use image::{synthesize_image, ClipReport, ImageGrid, Interferogram, Synthesis};
pub use stripes::{
    stripe_velocity_profile, BallisticFit, SkippedStripe, StripeProfile, StripeVelocity,
    STRIPE_COUNT,
};

use crate::domain::BeamlineGeometry;
use crate::error::{Error, Result};

/// Height at which a molecule of speed `velocity` hits the detector.
pub fn fall_position(velocity: f64, geometry: &BeamlineGeometry) -> Result<f64> {
    if !(velocity > 0.0 && velocity.is_finite()) {
        return Err(Error::domain(format!(
            "velocity must be positive, got {velocity}"
        )));
    }
    let l = geometry.source_to_detector;
    let l1 = geometry.source_to_grating;
    Ok(ballistic_line(geometry.y0, geometry.y1, geometry)
        - geometry.gravity * l * (l - l1) / (2.0 * velocity * velocity))
}

/// Height of the straight source-grating line at the detector, the
/// infinite-velocity limit of [`fall_position`].
pub fn ballistic_line(y0: f64, y1: f64, geometry: &BeamlineGeometry) -> f64 {
    y0 + (y1 - y0) * geometry.source_to_detector / geometry.source_to_grating
}

/// Velocity from observed detector height `y2` given source and grating
/// heights:
///
/// ```text
/// v = √[ g(L·L1 − L²)/2 / (y2 − y0 − (y1 − y0)·L/L1) ]
/// ```
pub fn fit_velocity(y2: f64, y0: f64, y1: f64, geometry: &BeamlineGeometry) -> Result<f64> {
    let l = geometry.source_to_detector;
    let l1 = geometry.source_to_grating;
    let numerator = geometry.gravity * (l * l1 - l * l) / 2.0;
    let denominator = y2 - y0 - (y1 - y0) * l / l1;
    if !(denominator < 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "detector height {y2:e} is not below the source-grating line ({:e})",
            ballistic_line(y0, y1, geometry)
        )));
    }
    Ok((numerator / denominator).sqrt())
}
