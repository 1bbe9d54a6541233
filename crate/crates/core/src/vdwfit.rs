//! Effective slit width from a measured diffraction trace.
//!
//! Van der Waals attraction to the bars removes molecules near the slit
//! walls, so a grating of geometric width s diffracts like one of width
//! s_eff < s. The fit scans s_eff on a coarse grid and refines the best
//! cell by golden-section search.

use serde::{Deserialize, Serialize};

use crate::diffraction::{far_field_orders, DetectorGrid, Normalization, SimulationSetup, Trace};
use crate::error::{Error, Result};
use crate::optimize::scan_then_golden;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Smallest s_eff tried, m.
    pub lower: f64,
    /// Coarse scan step, m.
    pub step: f64,
    /// Final bracket width, m.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            lower: 1e-9,
            step: 1e-9,
            tolerance: 0.1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlitFitResult {
    pub s_eff: f64,
    /// RMS difference of the peak-normalised traces.
    pub residual: f64,
    /// s / s_eff.
    pub suppression_ratio: f64,
    pub evaluations: usize,
    /// Interval refined by the golden-section stage.
    pub bracket: (f64, f64),
    pub bracket_residuals: (f64, f64),
    /// Position of the measured zeroth order.
    pub zero_order_offset: f64,
    /// Simulation at the best s_eff, on the measured positions.
    pub best_trace: Trace,
}

/// s / s_eff.
pub fn suppression_ratio(slit_width: f64, effective_slit_width: f64) -> Result<f64> {
    if !(effective_slit_width > 0.0 && effective_slit_width <= slit_width) {
        return Err(Error::domain(format!(
            "need 0 < s_eff <= s, got s_eff = {effective_slit_width:e}, s = {slit_width:e}"
        )));
    }
    Ok(slit_width / effective_slit_width)
}

/// Measured samples aligned with a simulation window.
struct Alignment {
    x0: f64,
    range: std::ops::Range<usize>,
    grid: DetectorGrid,
    measured: Vec<f64>,
}

fn align(measured: &Trace, setup: &SimulationSetup) -> Result<Alignment> {
    if !measured.is_uniform(1e-6) {
        return Err(Error::domain("measured trace must be on a uniform grid"));
    }
    let max = measured.max();
    let min = measured.intensities.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || max - min <= 1e-12 * max {
        return Err(Error::FitImpossible("measured trace is flat".into()));
    }
    let peaks = measured.local_maxima();
    if peaks.is_empty() {
        return Err(Error::FitImpossible("measured trace has no peaks".into()));
    }
    let norm = measured.normalized(Normalization::Max);
    let x0 = norm.refine_peak(norm.argmax());

    let window = &setup.grid;
    let slack = 1e-9 * window.pixel_pitch;
    let inside: Vec<usize> = (0..norm.len())
        .filter(|&i| {
            let x = norm.positions[i] - x0;
            x >= window.x_min - slack && x <= window.x_max + slack
        })
        .collect();
    if inside.len() < 2 {
        return Err(Error::NonOverlapping(format!(
            "measured trace [{:e}, {:e}] around its peak does not overlap the window [{:e}, {:e}]",
            norm.positions[0] - x0,
            norm.positions[norm.len() - 1] - x0,
            window.x_min,
            window.x_max
        )));
    }
    let range = inside[0]..inside[inside.len() - 1] + 1;
    let pitch = measured.pitch();
    let start = norm.positions[range.start] - x0;
    let grid = DetectorGrid {
        x_min: start,
        x_max: start + (range.len() - 1) as f64 * pitch,
        pixel_pitch: pitch,
        psf_sigma: window.psf_sigma,
    };
    grid.validate()?;
    Ok(Alignment {
        x0,
        measured: norm.intensities[range.clone()].to_vec(),
        range,
        grid,
    })
}

fn simulate(setup: &SimulationSetup, grid: DetectorGrid, s_eff: f64) -> Result<Trace> {
    setup
        .with_effective_slit_width(s_eff)
        .with_grid(grid)
        .detector_trace()
}

fn rms(a: &[f64], b: &[f64]) -> f64 {
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (ss / a.len() as f64).sqrt()
}

/// Best s_eff in [lower, s] for `measured`, simulated with `setup`.
///
/// The measured trace is peak-normalised and shifted so its zeroth order
/// sits at x = 0; only samples inside `setup.grid` enter the residual.
pub fn fit_effective_slit(
    measured: &Trace,
    setup: &SimulationSetup,
    options: &FitOptions,
) -> Result<SlitFitResult> {
    let s = setup.grating.slit_width;
    if !(options.lower > 0.0 && options.lower < s && options.step > 0.0 && options.tolerance > 0.0)
    {
        return Err(Error::domain(
            "fit needs 0 < lower < s and positive step and tolerance",
        ));
    }
    let aligned = align(measured, setup)?;
    // surfaces configuration errors before the scan hides them
    simulate(setup, aligned.grid, s)?;

    let objective = |s_eff: f64| match simulate(setup, aligned.grid, s_eff) {
        Ok(t) => rms(&t.intensities, &aligned.measured),
        Err(_) => f64::INFINITY,
    };
    let scan = scan_then_golden(objective, options.lower, s, options.step, options.tolerance);
    let s_eff = scan.minimum.x;
    if !scan.minimum.value.is_finite() {
        return Err(Error::FitImpossible("no s_eff produced a finite residual".into()));
    }

    let sim = simulate(setup, aligned.grid, s_eff)?;
    let positions = measured.positions[aligned.range.clone()].to_vec();
    let best_trace = Trace::new(positions, sim.intensities, Normalization::Max)?;
    Ok(SlitFitResult {
        s_eff,
        residual: scan.minimum.value,
        suppression_ratio: suppression_ratio(s, s_eff)?,
        evaluations: scan.minimum.evaluations,
        bracket: scan.bracket,
        bracket_residuals: scan.bracket_values,
        zero_order_offset: aligned.x0,
        best_trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderPopulation {
    pub n: u32,
    /// Grating-equation position x_n.
    pub expected: f64,
    /// Refined peak position and height relative to order 0, if a local
    /// maximum lies within a quarter fringe of x_n.
    pub peak: Option<(f64, f64)>,
}

/// Peak heights of orders 0..=n_max on the positive side of the trace,
/// relative to order 0. The zeroth order is searched around the origin.
pub fn order_population(
    trace: &Trace,
    period: f64,
    wavelength: f64,
    distance: f64,
    n_max: u32,
) -> Result<Vec<OrderPopulation>> {
    if !(period > 0.0 && wavelength > 0.0 && distance > 0.0) {
        return Err(Error::domain("period, wavelength and distance must be positive"));
    }
    let fringe = wavelength * distance / period;
    if trace.pitch() > fringe / 4.0 {
        return Err(Error::Resolution {
            pitch: trace.pitch(),
            period: fringe,
        });
    }
    let maxima = trace.local_maxima();
    let find = |x: f64| -> Option<(f64, f64)> {
        maxima
            .iter()
            .filter(|&&i| (trace.positions[i] - x).abs() <= fringe / 4.0)
            .max_by(|a, b| trace.intensities[**a].total_cmp(&trace.intensities[**b]))
            .map(|&i| (trace.refine_peak(i), trace.intensities[i]))
    };
    let orders = far_field_orders(wavelength, period, distance, n_max);
    let zero = find(0.0)
        .ok_or_else(|| Error::FitImpossible("zeroth order not resolved".into()))?
        .1;
    Ok(orders
        .orders
        .iter()
        .map(|o| OrderPopulation {
            n: o.n,
            expected: o.position,
            peak: find(o.position).map(|(x, h)| (x, h / zero)),
        })
        .collect())
}
