use serde::{Deserialize, Serialize};

use super::Interferogram;
use crate::domain::{BeamlineGeometry, Molecule};
use crate::error::{Error, Result};
use crate::optimize::golden_section;

/// Horizontal stripes the image is divided into.
pub const STRIPE_COUNT: usize = 20;
/// Stripes dimmer than this fraction of the brightest one are skipped.
const MIN_STRIPE_FRACTION: f64 = 0.01;
/// Largest allowed |x_R − x_L − 2·x0| / (x_R − x_L) for a usable stripe.
const MAX_ASYMMETRY: f64 = 0.1;
/// Velocities spread less than this (relative) cannot pin the fall curve.
const MIN_VELOCITY_SPREAD: f64 = 0.02;
/// Minimum number of usable stripes for the global fit.
const MIN_FIT_STRIPES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripeVelocity {
    pub index: usize,
    /// Intensity-weighted mean height of the stripe.
    pub y: f64,
    pub velocity: f64,
    /// Half distance between the two first-order peaks.
    pub first_order_offset: f64,
    pub asymmetry: f64,
    /// (v − v_fit)/v_fit once the global fit exists.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedStripe {
    pub index: usize,
    pub reason: String,
}

/// Free-fall curve v(y) = √(K / (c − y)), K = g·L·(L − L1)/2, with the
/// ballistic-line height c at the detector as the only free parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallisticFit {
    pub line_height: f64,
    pub curvature: f64,
    /// RMS relative velocity residual.
    pub rms: f64,
}

impl BallisticFit {
    pub fn velocity_at(&self, y: f64) -> Result<f64> {
        let drop = self.line_height - y;
        if !(drop > 0.0) {
            return Err(Error::DegenerateGeometry(format!(
                "height {y:e} is not below the fitted line {:e}",
                self.line_height
            )));
        }
        Ok((self.curvature / drop).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripeProfile {
    pub stripes: Vec<StripeVelocity>,
    pub skipped: Vec<SkippedStripe>,
    /// `None` when too few usable stripes, or too little velocity spread,
    /// to determine the fall curve.
    pub fit: Option<BallisticFit>,
    pub under_determined: Option<String>,
}

impl StripeProfile {
    /// True when velocities fall strictly with decreasing height.
    pub fn is_monotone(&self) -> bool {
        let mut s: Vec<&StripeVelocity> = self.stripes.iter().collect();
        s.sort_by(|a, b| a.y.total_cmp(&b.y));
        s.windows(2).all(|w| w[1].velocity > w[0].velocity)
    }
}

/// Row ranges of the stripes, bottom first. Leftover rows go to the lowest
/// stripes.
fn stripe_rows(ny: usize) -> Vec<std::ops::Range<usize>> {
    let base = ny / STRIPE_COUNT;
    let extra = ny % STRIPE_COUNT;
    let mut start = 0;
    (0..STRIPE_COUNT)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

fn refine(values: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= values.len() {
        return i as f64;
    }
    let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom < 0.0 {
        i as f64 + (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        i as f64
    }
}

/// Index of the first local maximum past the first local minimum, walking
/// from `start` in direction `step`.
fn first_side_peak(values: &[f64], start: usize, step: isize) -> Option<usize> {
    let n = values.len() as isize;
    let mut i = start as isize;
    let next = |i: isize| i + step;
    // descend to the first minimum
    while next(i) >= 0 && next(i) < n && values[next(i) as usize] <= values[i as usize] {
        i = next(i);
    }
    if next(i) < 0 || next(i) >= n {
        return None;
    }
    // climb to the next maximum
    while next(i) >= 0 && next(i) < n && values[next(i) as usize] >= values[i as usize] {
        i = next(i);
    }
    if next(i) < 0 || next(i) >= n {
        return None;
    }
    Some(i as usize)
}

/// Per-stripe velocities from the first-order spacing, followed by a
/// global fit of the free-fall curve.
pub fn stripe_velocity_profile(
    image: &Interferogram,
    geometry: &BeamlineGeometry,
    period: f64,
    molecule: &Molecule,
) -> Result<StripeProfile> {
    geometry.validate()?;
    if !(period > 0.0) {
        return Err(Error::domain("grating period must be positive"));
    }
    let grid = image.grid;
    if grid.ny < STRIPE_COUNT {
        return Err(Error::DimensionMismatch(format!(
            "image has {} rows, fewer than {STRIPE_COUNT} stripes",
            grid.ny
        )));
    }
    if grid.nx < 5 {
        return Err(Error::DimensionMismatch(format!(
            "image has only {} columns",
            grid.nx
        )));
    }
    let l2 = geometry.grating_to_detector();

    let sums: Vec<(Vec<f64>, f64, f64)> = stripe_rows(grid.ny)
        .into_iter()
        .map(|rows| {
            let mut trace = vec![0.0; grid.nx];
            let mut weight = 0.0;
            let mut moment = 0.0;
            for iy in rows.clone() {
                let row = image.row(iy);
                let s: f64 = row.iter().sum();
                weight += s;
                moment += s * grid.y(iy);
                for (t, v) in trace.iter_mut().zip(row) {
                    *t += v;
                }
            }
            let mid = 0.5 * (grid.y(rows.start) + grid.y(rows.end - 1));
            let y = if weight > 0.0 { moment / weight } else { mid };
            (trace, weight, y)
        })
        .collect();
    let brightest = sums.iter().map(|s| s.1).fold(0.0, f64::max);
    if !(brightest > 0.0) {
        return Err(Error::FitImpossible("image is empty".into()));
    }

    let mut stripes = Vec::new();
    let mut skipped = Vec::new();
    for (index, (trace, weight, y)) in sums.into_iter().enumerate() {
        let mut skip = |reason: String| skipped.push(SkippedStripe { index, reason });
        if weight < MIN_STRIPE_FRACTION * brightest {
            skip(format!(
                "intensity {:.2e} of the brightest stripe",
                weight / brightest
            ));
            continue;
        }
        let i0 = trace
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (Some(il), Some(ir)) = (
            first_side_peak(&trace, i0, -1),
            first_side_peak(&trace, i0, 1),
        ) else {
            skip("no first-order peak on both sides".into());
            continue;
        };
        let x0 = refine(&trace, i0);
        let xl = refine(&trace, il);
        let xr = refine(&trace, ir);
        let half = 0.5 * (xr - xl);
        let asymmetry = ((xr - x0) - (x0 - xl)).abs() / (xr - xl);
        if asymmetry >= MAX_ASYMMETRY {
            skip(format!("first orders asymmetric by {:.1}%", 100.0 * asymmetry));
            continue;
        }
        let x1 = half * grid.pitch_x;
        let lambda = period * (x1 / l2).atan().sin();
        let velocity = molecule.velocity_for_wavelength(lambda)?;
        stripes.push(StripeVelocity {
            index,
            y,
            velocity,
            first_order_offset: x1,
            asymmetry,
            residual: None,
        });
    }

    let (fit, under_determined) = match fit_fall_curve(&stripes, geometry) {
        Ok(fit) => {
            for s in &mut stripes {
                let v_fit = fit.velocity_at(s.y)?;
                s.residual = Some((s.velocity - v_fit) / v_fit);
            }
            (Some(fit), None)
        }
        Err(reason) => (None, Some(reason)),
    };
    Ok(StripeProfile {
        stripes,
        skipped,
        fit,
        under_determined,
    })
}

fn fit_fall_curve(
    stripes: &[StripeVelocity],
    geometry: &BeamlineGeometry,
) -> std::result::Result<BallisticFit, String> {
    if stripes.len() < MIN_FIT_STRIPES {
        return Err(format!(
            "{} usable stripes, at least {MIN_FIT_STRIPES} needed",
            stripes.len()
        ));
    }
    let (v_lo, v_hi) = stripes.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), s| {
        (a.min(s.velocity), b.max(s.velocity))
    });
    let spread = (v_hi - v_lo) / (0.5 * (v_hi + v_lo));
    if spread < MIN_VELOCITY_SPREAD {
        return Err(format!(
            "velocity spread {:.2}% too small to fix the fall curve",
            100.0 * spread
        ));
    }

    let l = geometry.source_to_detector;
    let l1 = geometry.source_to_grating;
    let k = geometry.gravity * l * (l - l1) / 2.0;
    let intercepts: Vec<f64> = stripes
        .iter()
        .map(|s| s.y + k / (s.velocity * s.velocity))
        .collect();
    let c0 = intercepts.iter().sum::<f64>() / intercepts.len() as f64;
    let scatter = intercepts
        .iter()
        .map(|c| (c - c0).abs())
        .fold(0.0, f64::max);
    let y_top = stripes.iter().map(|s| s.y).fold(f64::NEG_INFINITY, f64::max);
    let width = 3.0 * scatter + 1e-6;
    let lo = (c0 - width).max(y_top + 1e-9);
    let hi = (c0 + width).max(lo + 1e-9);

    let cost = |c: f64| -> f64 {
        let ss: f64 = stripes
            .iter()
            .map(|s| {
                let v_fit = (k / (c - s.y)).sqrt();
                ((s.velocity - v_fit) / v_fit).powi(2)
            })
            .sum();
        (ss / stripes.len() as f64).sqrt()
    };
    let m = golden_section(cost, lo, hi, 1e-11);
    Ok(BallisticFit {
        line_height: m.x,
        curvature: k,
        rms: m.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gravity::{fall_position, ImageGrid};

    #[test]
    fn stripe_rows_cover_the_image() {
        let r = stripe_rows(45);
        assert_eq!(r.len(), STRIPE_COUNT);
        assert_eq!(r[0], 0..3);
        assert_eq!(r[4], 12..15);
        assert_eq!(r[5], 15..17);
        assert_eq!(r.last().unwrap().end, 45);
    }

    #[test]
    fn side_peaks_of_a_comb() {
        let v = [0.1, 0.5, 0.2, 0.0, 1.0, 0.0, 0.3, 0.6, 0.2];
        assert_eq!(first_side_peak(&v, 4, 1), Some(7));
        assert_eq!(first_side_peak(&v, 4, -1), Some(1));
        assert_eq!(first_side_peak(&[0.0, 1.0, 0.5, 0.2], 1, 1), None);
    }

    #[test]
    fn empty_image_cannot_be_fitted() {
        let g = ImageGrid::new(11, 40, 1e-6, 1e-6, -5e-6, 0.0).unwrap();
        let img = Interferogram::zeros(g);
        let r = stripe_velocity_profile(
            &img,
            &BeamlineGeometry::default(),
            100e-9,
            &crate::presets::pch2(),
        );
        assert!(matches!(r, Err(Error::FitImpossible(_))));
    }

    #[test]
    fn fall_curve_fit_recovers_exact_points() {
        let geom = BeamlineGeometry::default();
        let stripes: Vec<StripeVelocity> = [150.0, 180.0, 220.0, 260.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| StripeVelocity {
                index: i,
                y: fall_position(v, &geom).unwrap(),
                velocity: v,
                first_order_offset: 0.0,
                asymmetry: 0.0,
                residual: None,
            })
            .collect();
        let fit = fit_fall_curve(&stripes, &geom).unwrap();
        assert!(fit.line_height.abs() < 1e-9, "{}", fit.line_height);
        assert!(fit.rms < 1e-5);
        assert!(fit_fall_curve(&stripes[..2], &geom).is_err());
    }
}
