//! Independent reference formulas shared by the integration tests. Nothing
//! here calls into the library's numerics; constants are typed in again.
#![allow(dead_code)]

use std::f64::consts::PI;

pub const H: f64 = 6.626_070_15e-34;
pub const KB: f64 = 1.380_649e-23;
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Far-field intensity of `n` slits of width `s` and period `d`, peak 1:
/// [sin(Nφ/2) / (N sin(φ/2))]² · sinc²(π s x/(λ L)), φ = 2π d x/(λ L).
pub fn fraunhofer(x: f64, n: usize, d: f64, s: f64, lambda: f64, l: f64) -> f64 {
    let phi = 2.0 * PI * d * x / (lambda * l);
    let half = 0.5 * phi;
    let grating = if half.sin().abs() < 1e-12 {
        1.0
    } else {
        let r = (n as f64 * half).sin() / (n as f64 * half.sin());
        r * r
    };
    let beta = PI * s * x / (lambda * l);
    let envelope = if beta.abs() < 1e-12 {
        1.0
    } else {
        (beta.sin() / beta).powi(2)
    };
    grating * envelope
}

/// Relative order intensity sinc²(π n s/d).
pub fn order_envelope(n: u32, s: f64, d: f64) -> f64 {
    let beta = PI * n as f64 * s / d;
    if n == 0 {
        1.0
    } else {
        (beta.sin() / beta).powi(2)
    }
}

/// Detector position of order n from the grating equation.
pub fn order_position(n: u32, lambda: f64, d: f64, l2: f64) -> f64 {
    l2 * (n as f64 * lambda / d).asin().tan()
}

/// PcH₂ wavelength at speed v.
pub fn pch2_wavelength(v: f64) -> f64 {
    H / (514.0 * AMU * v)
}

/// Thermal RMS amplitude of a doubly clamped rod of diameter `dia`.
pub fn clamped_rod_amplitude(length: f64, dia: f64, t: f64, young: f64) -> f64 {
    let inertia = PI * dia.powi(4) / 64.0;
    (KB * t * length.powi(3) / (192.0 * young * inertia)).sqrt()
}

/// Detector height for horizontal launch at the source.
pub fn horizontal_drop(v: f64, g: f64, l: f64) -> f64 {
    -g * l * l / (2.0 * v * v)
}

pub fn rms(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (ss / a.len() as f64).sqrt()
}

pub fn normalise_max(v: &[f64]) -> Vec<f64> {
    let m = v.iter().copied().fold(0.0, f64::max);
    v.iter().map(|x| x / m).collect()
}
