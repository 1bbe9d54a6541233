//! Named gratings and molecules compiled into the binary.
//!
//! The values live in `data/presets.toml`; this module only converts them
//! to SI units and validates them.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::constants::ATOMIC_MASS_UNIT;
use crate::domain::{Grating, Molecule};
use crate::error::{Error, Result};

const PRESETS_TOML: &str = include_str!("../data/presets.toml");

const NM: f64 = 1e-9;

/// Graphene areal density per layer, kg/m².
pub const GRAPHENE_AREAL_DENSITY: f64 = 7.6e-7;

#[derive(Debug, Deserialize)]
struct PresetFile {
    molecules: BTreeMap<String, MoleculeRecord>,
    gratings: BTreeMap<String, GratingRecord>,
}

#[derive(Debug, Deserialize)]
struct MoleculeRecord {
    name: String,
    mass_u: f64,
    polarizability_a3: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
struct GratingRecord {
    label: String,
    period_nm: f64,
    slit_nm: f64,
    s_eff_nm: f64,
    bar_length_nm: f64,
    bar_width_nm: f64,
    ribbon_width_nm: Option<f64>,
    layers: u32,
    areal_density: Option<f64>,
    tolerance_nm: f64,
    quoted_opening_fraction: Option<f64>,
    vibration_amplitude_nm: Option<f64>,
    scroll_diameter_nm: Option<f64>,
    #[serde(default)]
    notes: Vec<String>,
}

impl GratingRecord {
    fn to_grating(&self) -> Grating {
        Grating {
            label: self.label.clone(),
            period: self.period_nm * NM,
            slit_width: self.slit_nm * NM,
            effective_slit_width: self.s_eff_nm * NM,
            bar_length: self.bar_length_nm * NM,
            bar_width: self.bar_width_nm * NM,
            ribbon_width: self.ribbon_width_nm.map(|w| w * NM),
            layers: self.layers,
            areal_density: self.areal_density,
            tolerance: self.tolerance_nm * NM,
            quoted_opening_fraction: self.quoted_opening_fraction,
            vibration_amplitude: self.vibration_amplitude_nm.map(|v| v * NM),
            scroll_diameter: self.scroll_diameter_nm.map(|v| v * NM),
            notes: self.notes.clone(),
        }
    }
}

fn file() -> &'static PresetFile {
    static FILE: OnceLock<PresetFile> = OnceLock::new();
    FILE.get_or_init(|| toml::from_str(PRESETS_TOML).expect("embedded preset table is valid TOML"))
}

/// Grating preset names in table order.
pub fn grating_names() -> Vec<&'static str> {
    file().gratings.keys().map(String::as_str).collect()
}

pub fn molecule_names() -> Vec<&'static str> {
    file().molecules.keys().map(String::as_str).collect()
}

pub fn grating(name: &str) -> Result<Grating> {
    let record = file()
        .gratings
        .get(&name.to_ascii_lowercase())
        .ok_or_else(|| {
            Error::config(format!(
                "unknown grating preset '{name}' (known: {})",
                grating_names().join(", ")
            ))
        })?;
    let g = record.to_grating();
    g.validate()?;
    Ok(g)
}

pub fn molecule(name: &str) -> Result<Molecule> {
    let record = file()
        .molecules
        .get(&name.to_ascii_lowercase())
        .ok_or_else(|| {
            Error::config(format!(
                "unknown molecule preset '{name}' (known: {})",
                molecule_names().join(", ")
            ))
        })?;
    let m = Molecule {
        name: record.name.clone(),
        mass: record.mass_u * ATOMIC_MASS_UNIT,
        polarizability: record.polarizability_a3,
    };
    m.validate()?;
    Ok(m)
}

pub fn pch2() -> Molecule {
    molecule("pch2").expect("pch2 preset")
}
