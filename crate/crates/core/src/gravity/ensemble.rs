use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Velocity classes used to discretise a beam distribution.
pub const DEFAULT_BEAM_CLASSES: usize = 200;

/// Velocity distribution of the molecular beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VelocityDistribution {
    /// Effusive beam flux, w(v) ∝ v³·exp(−v²/v_p²), sampled with `classes`
    /// uniform classes over [lo, hi].
    Beam {
        most_probable: f64,
        lo: f64,
        hi: f64,
        classes: usize,
    },
    /// Flat weight over [lo, hi].
    UniformBand { lo: f64, hi: f64, classes: usize },
    /// Explicit (velocity, weight) pairs.
    Discrete(Vec<(f64, f64)>),
}

impl VelocityDistribution {
    /// Beam distribution over [v_p/3, 3·v_p] with 200 classes.
    pub fn beam(most_probable: f64) -> Self {
        VelocityDistribution::Beam {
            most_probable,
            lo: most_probable / 3.0,
            hi: 3.0 * most_probable,
            classes: DEFAULT_BEAM_CLASSES,
        }
    }

    pub fn single(velocity: f64) -> Self {
        VelocityDistribution::Discrete(vec![(velocity, 1.0)])
    }

    /// Unnormalised weight density.
    pub fn weight(&self, v: f64) -> f64 {
        match self {
            VelocityDistribution::Beam {
                most_probable,
                lo,
                hi,
                ..
            } => {
                if v < *lo || v > *hi {
                    0.0
                } else {
                    let u = v / most_probable;
                    u * u * u * (-u * u).exp()
                }
            }
            VelocityDistribution::UniformBand { lo, hi, .. } => {
                if v >= *lo && v <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            VelocityDistribution::Discrete(points) => points
                .iter()
                .filter(|(pv, _)| *pv == v)
                .map(|(_, w)| *w)
                .sum(),
        }
    }

    /// Lowest and highest velocity with non-zero weight.
    pub fn support(&self) -> (f64, f64) {
        match self {
            VelocityDistribution::Beam { lo, hi, .. }
            | VelocityDistribution::UniformBand { lo, hi, .. } => (*lo, *hi),
            VelocityDistribution::Discrete(points) => points
                .iter()
                .filter(|(_, w)| *w > 0.0)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (v, _)| {
                    (a.min(*v), b.max(*v))
                }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            VelocityDistribution::Beam {
                most_probable,
                lo,
                hi,
                classes,
            } => {
                if !(*most_probable > 0.0 && *lo > 0.0 && lo < hi && *classes > 0) {
                    return Err(Error::domain(
                        "beam distribution needs v_p > 0, 0 < lo < hi and at least one class",
                    ));
                }
            }
            VelocityDistribution::UniformBand { lo, hi, classes } => {
                if !(*lo > 0.0 && lo <= hi && *classes > 0) {
                    return Err(Error::domain(
                        "uniform band needs 0 < lo <= hi and at least one class",
                    ));
                }
            }
            VelocityDistribution::Discrete(points) => {
                if points.is_empty() {
                    return Err(Error::domain("discrete distribution is empty"));
                }
                if points.iter().any(|(v, w)| !(*v > 0.0) || !(*w >= 0.0)) {
                    return Err(Error::domain(
                        "discrete velocities must be positive and weights non-negative",
                    ));
                }
                if points.iter().all(|(_, w)| *w == 0.0) {
                    return Err(Error::domain("discrete weights sum to zero"));
                }
            }
        }
        Ok(())
    }

    /// Class velocities with weights summing to one.
    pub fn classes(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let raw: Vec<(f64, f64)> = match self {
            VelocityDistribution::Beam { lo, hi, classes, .. }
            | VelocityDistribution::UniformBand { lo, hi, classes } => {
                let step = (hi - lo) / *classes as f64;
                (0..*classes)
                    .map(|i| {
                        let v = lo + (i as f64 + 0.5) * step;
                        (v, self.weight(v))
                    })
                    .collect()
            }
            VelocityDistribution::Discrete(points) => points.clone(),
        };
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::domain("velocity distribution has no weight"));
        }
        Ok(raw.into_iter().map(|(v, w)| (v, w / total)).collect())
    }
}
