use super::{Normalization, Trace};
use crate::error::{Error, Result};

/// Number of σ at which the Gaussian kernel is truncated.
pub const KERNEL_HALF_WIDTH_SIGMAS: f64 = 5.0;

/// Gaussian blur of a uniformly sampled trace.
///
/// Each sample spreads its intensity over a unit-area Gaussian kernel cut at
/// ±5σ. Near the window edges the kernel is renormalised over the samples
/// that exist, so the total integral is unchanged; away from the edges this
/// is ordinary discrete convolution.
pub fn detector_convolve(trace: &Trace, sigma: f64) -> Result<Trace> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!(
            "detector sigma must be non-negative, got {sigma}"
        )));
    }
    if !trace.is_uniform(1e-6) {
        return Err(Error::domain("detector convolution needs a uniform grid"));
    }
    if sigma == 0.0 {
        return Ok(trace.clone());
    }
    let out = blur_samples(&trace.intensities, sigma / trace.pitch());

    let normalization = match trace.normalization {
        Normalization::Max => Normalization::Raw,
        other => other,
    };
    Trace::new(trace.positions.clone(), out, normalization)
}

/// Mass-conserving Gaussian blur of uniformly spaced samples, with the
/// width given in samples.
pub(crate) fn blur_samples(values: &[f64], sigma_samples: f64) -> Vec<f64> {
    let reach = (KERNEL_HALF_WIDTH_SIGMAS * sigma_samples).floor() as usize;
    if sigma_samples == 0.0 || reach == 0 {
        return values.to_vec();
    }

    let kernel: Vec<f64> = (0..=reach)
        .map(|k| {
            let t = k as f64 / sigma_samples;
            (-0.5 * t * t).exp()
        })
        .collect();
    // prefix[m + 1] = one-sided kernel sum over offsets 0..=m
    let mut prefix = vec![0.0; reach + 2];
    for k in 0..=reach {
        prefix[k + 1] = prefix[k] + kernel[k];
    }

    let n = values.len();
    let mut out = vec![0.0; n];
    for (i, &v) in values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let left = i.min(reach);
        let right = (n - 1 - i).min(reach);
        let norm = prefix[left + 1] + prefix[right + 1] - kernel[0];
        let scale = v / norm;
        for k in 0..=left {
            out[i - k] += scale * kernel[k];
        }
        for k in 1..=right {
            out[i + k] += scale * kernel[k];
        }
    }
    out
}
