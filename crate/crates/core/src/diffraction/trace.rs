use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Raw,
    /// Peak value 1.
    Max,
    /// ∫ I dx = 1.
    UnitArea,
}

impl Normalization {
    pub fn tag(self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::Max => "max-1",
            Normalization::UnitArea => "unit-area",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "raw" => Some(Normalization::Raw),
            "max-1" => Some(Normalization::Max),
            "unit-area" => Some(Normalization::UnitArea),
            _ => None,
        }
    }
}

/// Intensity sampled on a uniform grid of detector positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub positions: Vec<f64>,
    pub intensities: Vec<f64>,
    pub normalization: Normalization,
}

impl Trace {
    pub fn new(
        positions: Vec<f64>,
        intensities: Vec<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        if positions.len() != intensities.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} positions but {} intensities",
                positions.len(),
                intensities.len()
            )));
        }
        if positions.len() < 2 {
            return Err(Error::domain("a trace needs at least two samples"));
        }
        if let Some(bad) = intensities.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(format!("negative or non-finite intensity {bad}")));
        }
        Ok(Trace {
            positions,
            intensities,
            normalization,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Mean sample spacing.
    pub fn pitch(&self) -> f64 {
        let n = self.positions.len();
        (self.positions[n - 1] - self.positions[0]) / (n - 1) as f64
    }

    /// Whether every spacing matches the mean within `rel_tol`.
    pub fn is_uniform(&self, rel_tol: f64) -> bool {
        let p = self.pitch();
        p > 0.0
            && self
                .positions
                .windows(2)
                .all(|w| ((w[1] - w[0]) - p).abs() <= rel_tol * p)
    }

    pub fn max(&self) -> f64 {
        self.intensities.iter().copied().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.intensities.iter().enumerate() {
            if *v > self.intensities[best] {
                best = i;
            }
        }
        best
    }

    /// Riemann sum Σ I·Δx.
    pub fn integral(&self) -> f64 {
        self.intensities.iter().sum::<f64>() * self.pitch()
    }

    pub fn normalized(&self, to: Normalization) -> Trace {
        let scale = match to {
            Normalization::Raw => 1.0,
            Normalization::Max => self.max(),
            Normalization::UnitArea => self.integral(),
        };
        let scale = if scale > 0.0 { scale } else { 1.0 };
        Trace {
            positions: self.positions.clone(),
            intensities: self.intensities.iter().map(|v| v / scale).collect(),
            normalization: to,
        }
    }

    /// Root-mean-square difference of intensities sampled at the same points.
    pub fn rms_difference(&self, other: &Trace) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "traces have {} and {} samples",
                self.len(),
                other.len()
            )));
        }
        let ss: f64 = self
            .intensities
            .iter()
            .zip(&other.intensities)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        Ok((ss / self.len() as f64).sqrt())
    }

    /// Linear interpolation, zero outside the sampled range.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.len();
        let x0 = self.positions[0];
        let p = self.pitch();
        let t = (x - x0) / p;
        if t < 0.0 || t > (n - 1) as f64 {
            return 0.0;
        }
        let i = (t.floor() as usize).min(n - 2);
        let f = t - i as f64;
        self.intensities[i] * (1.0 - f) + self.intensities[i + 1] * f
    }

    /// Indices of strict interior local maxima (plateaus count once, at
    /// their first sample).
    pub fn local_maxima(&self) -> Vec<usize> {
        let v = &self.intensities;
        let mut out = Vec::new();
        let mut i = 1;
        while i + 1 < v.len() {
            if v[i] > v[i - 1] {
                let mut j = i;
                while j + 1 < v.len() && v[j + 1] == v[i] {
                    j += 1;
                }
                if j + 1 < v.len() && v[j + 1] < v[i] {
                    out.push(i);
                }
                i = j + 1;
            } else {
                i += 1;
            }
        }
        out
    }

    /// Sub-sample peak position from a parabola through the maximum and its
    /// neighbours.
    pub fn refine_peak(&self, i: usize) -> f64 {
        let v = &self.intensities;
        if i == 0 || i + 1 >= v.len() {
            return self.positions[i];
        }
        let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
        let denom = a - 2.0 * b + c;
        let shift = if denom < 0.0 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        self.positions[i] + shift * self.pitch()
    }

    /// Multiply each sample by (1 + level·ε), ε ~ N(0, 1), clamped at zero.
    pub fn with_multiplicative_noise(&self, level: f64, seed: u64) -> Result<Trace> {
        if !(level >= 0.0) {
            return Err(Error::domain("noise level must be non-negative"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let intensities = self
            .intensities
            .iter()
            .map(|v| (v * (1.0 + level * normal.sample(&mut rng))).max(0.0))
            .collect();
        Ok(Trace {
            positions: self.positions.clone(),
            intensities,
            normalization: self.normalization,
        })
    }
}
