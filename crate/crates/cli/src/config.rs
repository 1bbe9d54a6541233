//! Flat `section.name_unit = value` configuration.
//!
//! Every quantity key carries a unit suffix that is checked against the
//! quantity's dimension and converted to SI on parse, so
//! `grating.period_nm = 105` and `grating.period_um = 0.105` are the same
//! setting. Dimensionless and text keys have no suffix.

use std::collections::BTreeMap;
use std::path::Path;

use nanograting::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Length,
    Velocity,
    Acceleration,
    Mass,
    Temperature,
    Pressure,
    Area,
    ArealDensity,
    Number,
    Count,
    Text,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)],
            Dimension::Velocity => &[("m_s", 1.0)],
            Dimension::Acceleration => &[("m_s2", 1.0)],
            Dimension::Mass => &[("kg", 1.0), ("u", nanograting::constants::ATOMIC_MASS_UNIT)],
            Dimension::Temperature => &[("k", 1.0)],
            Dimension::Pressure => &[("pa", 1.0)],
            Dimension::Area => &[("m2", 1.0), ("um2", 1e-12), ("nm2", 1e-18)],
            Dimension::ArealDensity => &[("kg_m2", 1.0)],
            Dimension::Number | Dimension::Count | Dimension::Text => &[],
        }
    }
}

/// Recognised settings and their dimensions.
const KEYS: &[(&str, Dimension)] = &[
    ("molecule.preset", Dimension::Text),
    ("molecule.mass", Dimension::Mass),
    ("grating.preset", Dimension::Text),
    ("grating.period", Dimension::Length),
    ("grating.slit_width", Dimension::Length),
    ("grating.effective_slit_width", Dimension::Length),
    ("grating.bar_length", Dimension::Length),
    ("grating.layers", Dimension::Count),
    ("grating.areal_density", Dimension::ArealDensity),
    ("grating.vibration_amplitude", Dimension::Length),
    ("geometry.source_to_grating", Dimension::Length),
    ("geometry.source_to_detector", Dimension::Length),
    ("geometry.gravity", Dimension::Acceleration),
    ("geometry.y0", Dimension::Length),
    ("geometry.y1", Dimension::Length),
    ("source.width", Dimension::Length),
    ("coherence.prefactor", Dimension::Number),
    ("coherence.n_slits", Dimension::Count),
    ("coherence.taper_slits", Dimension::Number),
    ("beam.velocity", Dimension::Velocity),
    ("beam.half_width", Dimension::Velocity),
    ("beam.classes", Dimension::Count),
    ("distribution.kind", Dimension::Text),
    ("distribution.most_probable", Dimension::Velocity),
    ("distribution.lo", Dimension::Velocity),
    ("distribution.hi", Dimension::Velocity),
    ("distribution.classes", Dimension::Count),
    ("detector.pitch", Dimension::Length),
    ("detector.sigma", Dimension::Length),
    ("detector.half_width", Dimension::Length),
    ("image.half_width", Dimension::Length),
    ("image.pitch_x", Dimension::Length),
    ("image.pitch_y", Dimension::Length),
    ("image.v_min", Dimension::Velocity),
    ("image.v_max", Dimension::Velocity),
    ("fit.lower", Dimension::Length),
    ("fit.step", Dimension::Length),
    ("fit.tolerance", Dimension::Length),
    ("limits.sigma", Dimension::Length),
    ("limits.n_max", Dimension::Count),
    ("limits.reference_wavelength", Dimension::Length),
    ("limits.temperature", Dimension::Temperature),
    ("limits.youngs_modulus", Dimension::Pressure),
    ("limits.molecule_count", Dimension::Number),
    ("limits.open_area", Dimension::Area),
    ("limits.footprint", Dimension::Area),
    ("render.stretch", Dimension::Number),
    ("simulate.noise", Dimension::Number),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Count(u64),
    Text(String),
}

/// Parsed settings keyed by canonical name (no unit suffix), SI values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, Value>,
}

fn resolve(key: &str) -> Result<(&'static str, Dimension, f64)> {
    for &(name, dim) in KEYS {
        if key == name {
            return match dim {
                Dimension::Number | Dimension::Count | Dimension::Text => Ok((name, dim, 1.0)),
                _ => Err(Error::Config(format!(
                    "'{key}' needs a unit suffix, one of {}",
                    unit_list(dim)
                ))),
            };
        }
        if let Some(suffix) = key.strip_prefix(name).and_then(|r| r.strip_prefix('_')) {
            if let Some((_, scale)) = dim.units().iter().find(|(u, _)| *u == suffix) {
                return Ok((name, dim, *scale));
            }
            if !dim.units().is_empty() {
                return Err(Error::Config(format!(
                    "'{key}': unit '{suffix}' is not a {dim:?} unit, use one of {}",
                    unit_list(dim)
                )));
            }
        }
    }
    Err(Error::Config(format!("unknown setting '{key}'")))
}

fn unit_list(dim: Dimension) -> String {
    dim.units()
        .iter()
        .map(|(u, _)| format!("_{u}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Config::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            config
                .set_assignment(line)
                .map_err(|e| Error::Config(format!("line {}: {}", n + 1, strip(e))))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::parse(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            reason: strip(e),
        })
    }

    /// Apply one `key = value` assignment; later assignments win.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key = value, got '{assignment}'")))?;
        let (key, raw) = (key.trim().to_ascii_lowercase(), raw.trim());
        let (name, dim, scale) = resolve(&key)?;
        let value = match dim {
            Dimension::Text => {
                if raw.is_empty() {
                    return Err(Error::Config(format!("'{key}' is empty")));
                }
                Value::Text(raw.to_string())
            }
            Dimension::Count => Value::Count(
                raw.parse()
                    .map_err(|_| Error::Config(format!("'{key}': '{raw}' is not a whole number")))?,
            ),
            _ => {
                let v: f64 = raw
                    .parse()
                    .map_err(|_| Error::Config(format!("'{key}': '{raw}' is not a number")))?;
                if !v.is_finite() {
                    return Err(Error::Config(format!("'{key}' must be finite")));
                }
                Value::Number(v * scale)
            }
        };
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        match self.values.get(name) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn count(&self, name: &str) -> Option<u64> {
        match self.values.get(name) {
            Some(Value::Count(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.values.get(name) {
            Some(Value::Text(v)) => Some(v),
            _ => None,
        }
    }

    pub fn number_or(&self, name: &str, default: f64) -> f64 {
        self.number(name).unwrap_or(default)
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
