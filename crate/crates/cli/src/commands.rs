use std::io::Write;
use std::path::{Path, PathBuf};

use nanograting::constants::RUBIDIUM_D2_WAVELENGTH;
use nanograting::diffraction::{
    DetectorGrid, Illumination, SimulationSetup, Trace, VelocityBand, DEFAULT_PIXEL_PITCH,
    DEFAULT_PSF_SIGMA,
};
use nanograting::gravity::{
    fall_position, stripe_velocity_profile, synthesize_image, ImageGrid, VelocityDistribution,
    DEFAULT_BEAM_CLASSES,
};
use nanograting::imaging::{normalize_max, render_image};
use nanograting::io::{format_report, load_interferogram, load_trace, save_interferogram, write_trace};
use nanograting::limits::{
    adsorption_coverage, thermal_scroll_amplitude, LimitsInput, LimitsReport,
    DEFAULT_MOLECULE_FOOTPRINT, NANOTUBE_YOUNGS_MODULUS,
};
use nanograting::vdwfit::{fit_effective_slit, FitOptions};
use nanograting::{presets, BeamlineGeometry, Error, Grating, Molecule, Result};

use crate::config::Config;
use crate::Common;

/// σ used when neither the config nor the grating provides one, m.
const DEFAULT_SIGMA: f64 = 0.1e-9;
const DEFAULT_TEMPERATURE: f64 = 300.0;
/// Default velocity span of a synthesized image, m/s.
const IMAGE_V_MIN: f64 = 145.0;
const IMAGE_V_MAX: f64 = 263.0;

type Report = Vec<(String, String)>;

fn entry(report: &mut Report, key: &str, value: impl ToString) {
    report.push((key.to_string(), value.to_string()));
}

fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn load_config(common: &Common) -> Result<Config> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(p) = &common.preset {
        config.set_assignment(&format!("grating.preset = {p}"))?;
    }
    for s in &common.set {
        config.set_assignment(s)?;
    }
    Ok(config)
}

fn molecule(config: &Config) -> Result<Molecule> {
    let mut m = presets::molecule(config.text("molecule.preset").unwrap_or("pch2"))?;
    if let Some(mass) = config.number("molecule.mass") {
        m.mass = mass;
    }
    m.validate()?;
    Ok(m)
}

fn grating(config: &Config) -> Result<Grating> {
    let mut g = match config.text("grating.preset") {
        Some(name) => presets::grating(name)?,
        None => match (config.number("grating.period"), config.number("grating.slit_width")) {
            (Some(d), Some(s)) => Grating::new("custom", d, s, s)?,
            _ => {
                return Err(Error::Config(
                    "no grating: set grating.preset (or --preset), or grating.period and grating.slit_width"
                        .into(),
                ))
            }
        },
    };
    if let Some(d) = config.number("grating.period") {
        g.period = d;
        g.bar_width = d - g.slit_width;
    }
    if let Some(s) = config.number("grating.slit_width") {
        g.slit_width = s;
        g.bar_width = g.period - s;
        g.effective_slit_width = g.effective_slit_width.min(s);
    }
    if let Some(s_eff) = config.number("grating.effective_slit_width") {
        g.effective_slit_width = s_eff;
    }
    if let Some(l) = config.number("grating.bar_length") {
        g.bar_length = l;
    }
    if let Some(n) = config.count("grating.layers") {
        g.layers = u32::try_from(n).map_err(|_| Error::Config("grating.layers too large".into()))?;
    }
    if let Some(rho) = config.number("grating.areal_density") {
        g.areal_density = Some(rho);
    }
    if let Some(a) = config.number("grating.vibration_amplitude") {
        g.vibration_amplitude = Some(a);
    }
    g.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(g)
}

fn geometry(config: &Config) -> Result<BeamlineGeometry> {
    let d = BeamlineGeometry::default();
    let g = BeamlineGeometry::new(
        config.number_or("geometry.source_to_grating", d.source_to_grating),
        config.number_or("geometry.source_to_detector", d.source_to_detector),
        config.number_or("geometry.gravity", d.gravity),
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    Ok(g.with_heights(
        config.number_or("geometry.y0", 0.0),
        config.number_or("geometry.y1", 0.0),
    ))
}

fn count(config: &Config, key: &str, default: usize) -> Result<usize> {
    match config.count(key) {
        Some(n) => usize::try_from(n).map_err(|_| Error::Config(format!("{key} too large"))),
        None => Ok(default),
    }
}

fn setup(config: &Config) -> Result<SimulationSetup> {
    let band_default = VelocityBand::default();
    let band = VelocityBand::new(
        config.number_or("beam.velocity", band_default.center),
        config.number_or("beam.half_width", band_default.half_width),
        count(config, "beam.classes", band_default.classes)?,
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let mut s = SimulationSetup::new(molecule(config)?, grating(config)?, band)?;
    s.geometry = geometry(config)?;
    if let Some(w) = config.number("source.width") {
        s.source.source_width = w;
    }
    s.source.validate().map_err(|e| Error::Config(e.to_string()))?;
    s.coherence_prefactor = config.number_or("coherence.prefactor", s.coherence_prefactor);
    if let Some(n) = config.count("coherence.n_slits") {
        s.n_slits = Some(n as usize);
    }
    if let Some(w) = config.number("coherence.taper_slits") {
        s.illumination = Illumination::Gaussian { rms_slits: w };
    }
    let default_grid = SimulationSetup::default_grid(&s.molecule, &s.grating, &s.geometry, &s.band)?;
    s.grid = DetectorGrid::symmetric(
        config.number_or("detector.half_width", default_grid.x_max),
        config.number_or("detector.pitch", DEFAULT_PIXEL_PITCH),
        config.number_or("detector.sigma", DEFAULT_PSF_SIGMA),
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    Ok(s)
}

fn setup_entries(s: &SimulationSetup) -> Result<Report> {
    let mut r = Report::new();
    entry(&mut r, "molecule", &s.molecule.name);
    entry(&mut r, "molecule.mass_kg", sci(s.molecule.mass));
    entry(&mut r, "grating", &s.grating.label);
    entry(&mut r, "grating.period_m", sci(s.grating.period));
    entry(&mut r, "grating.slit_width_m", sci(s.grating.slit_width));
    entry(&mut r, "grating.effective_slit_width_m", sci(s.grating.effective_slit_width));
    entry(&mut r, "geometry.source_to_grating_m", sci(s.geometry.source_to_grating));
    entry(&mut r, "geometry.source_to_detector_m", sci(s.geometry.source_to_detector));
    entry(&mut r, "geometry.gravity_m_s2", sci(s.geometry.gravity));
    entry(&mut r, "source.width_m", sci(s.source.source_width));
    entry(&mut r, "coherence.prefactor", s.coherence_prefactor);
    let n = s.kirchhoff_params(s.band.center)?.n_slits;
    entry(&mut r, "coherence.n_slits", n);
    let illumination = match s.illumination {
        Illumination::Uniform => "uniform".to_string(),
        Illumination::Gaussian { rms_slits } => format!("gaussian rms {rms_slits} slits"),
    };
    entry(&mut r, "coherence.illumination", illumination);
    entry(&mut r, "beam.velocity_m_s", s.band.center);
    entry(&mut r, "beam.half_width_m_s", s.band.half_width);
    entry(&mut r, "beam.classes", s.band.classes);
    entry(&mut r, "detector.x_min_m", sci(s.grid.x_min));
    entry(&mut r, "detector.x_max_m", sci(s.grid.x_max));
    entry(&mut r, "detector.pitch_m", sci(s.grid.pixel_pitch));
    entry(&mut r, "detector.sigma_m", sci(s.grid.psf_sigma));
    Ok(r)
}

/// Open `--out` or stdout.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit_report(path: Option<&Path>, report: &Report) -> Result<()> {
    let mut out = output(path)?;
    out.write_all(format_report(report).as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn simulate(common: &Common) -> Result<()> {
    let config = load_config(common)?;
    let s = setup(&config)?;
    let mut params = setup_entries(&s)?;
    let noise = config.number_or("simulate.noise", 0.0);
    let mut trace: Trace = s.detector_trace()?;
    if noise > 0.0 {
        trace = trace.with_multiplicative_noise(noise, common.seed)?;
        entry(&mut params, "simulate.noise", noise);
        entry(&mut params, "simulate.seed", common.seed);
    }
    for (k, v) in &params {
        eprintln!("{k} = {v}");
    }
    let mut out = output(common.out.as_deref())?;
    write_trace(&mut out, &trace, &params)?;
    out.flush()?;
    Ok(())
}

fn distribution(config: &Config) -> Result<VelocityDistribution> {
    let classes = count(config, "distribution.classes", DEFAULT_BEAM_CLASSES)?;
    let vp = config.number_or("distribution.most_probable", 180.0);
    let d = match config.text("distribution.kind").unwrap_or("beam") {
        // Without explicit bounds the beam is truncated to the velocities the
        // image covers, so nothing is clipped by default.
        "beam" => VelocityDistribution::Beam {
            most_probable: vp,
            lo: config.number_or("distribution.lo", config.number_or("image.v_min", IMAGE_V_MIN)),
            hi: config.number_or("distribution.hi", config.number_or("image.v_max", IMAGE_V_MAX)),
            classes,
        },
        "uniform" => VelocityDistribution::UniformBand {
            lo: config.number_or("distribution.lo", IMAGE_V_MIN),
            hi: config.number_or("distribution.hi", IMAGE_V_MAX),
            classes,
        },
        "single" => VelocityDistribution::single(config.number_or("beam.velocity", 220.0)),
        other => {
            return Err(Error::Config(format!(
                "distribution.kind '{other}' is not one of beam, uniform, single"
            )))
        }
    };
    d.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(d)
}

fn stretch_setting(config: &Config, flag: Option<f64>) -> f64 {
    flag.unwrap_or_else(|| config.number_or("render.stretch", 1.0))
}

fn write_pixmap(path: &Path, image: &nanograting::Interferogram, stretch: f64) -> Result<()> {
    let bytes = render_image(&normalize_max(image), stretch)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn synth_image(common: &Common, stretch: Option<f64>) -> Result<()> {
    let config = load_config(common)?;
    let s = setup(&config)?;
    let out = common
        .out
        .as_deref()
        .ok_or_else(|| Error::Config("synth-image needs --out PATH for the raw image".into()))?
        .with_extension("bin");
    let dist = distribution(&config)?;
    let y_low = fall_position(config.number_or("image.v_min", IMAGE_V_MIN), &s.geometry)?;
    let y_high = fall_position(config.number_or("image.v_max", IMAGE_V_MAX), &s.geometry)?;
    let grid = ImageGrid::spanning(
        config.number_or("image.half_width", 45e-6),
        config.number_or("image.pitch_x", 0.5e-6),
        y_low.min(y_high),
        y_low.max(y_high),
        config.number_or("image.pitch_y", 1e-6),
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let sigma = s.grid.psf_sigma;
    let synthesis = synthesize_image(&dist, &s, &grid, sigma)?;
    save_interferogram(&out, &synthesis.image)?;
    let ppm = out.with_extension("ppm");
    let stretch = stretch_setting(&config, stretch);
    write_pixmap(&ppm, &synthesis.image, stretch)?;

    let mut r = Report::new();
    entry(&mut r, "image.raw", out.display());
    entry(&mut r, "image.pixmap", ppm.display());
    entry(&mut r, "image.nx", grid.nx);
    entry(&mut r, "image.ny", grid.ny);
    entry(&mut r, "image.y_min_m", sci(grid.y_min));
    entry(&mut r, "image.y_max_m", sci(grid.y_max()));
    entry(&mut r, "render.stretch", stretch);
    entry(&mut r, "classes.placed", synthesis.placed.len());
    entry(&mut r, "classes.clipped", synthesis.clipping.clipped_classes);
    entry(&mut r, "classes.clipped_weight", format!("{:.6}", synthesis.clipping.clipped_weight));
    emit_report(None, &r)
}

pub fn fit_seff(common: &Common, measured: &Path, trace_out: Option<&Path>) -> Result<()> {
    let config = load_config(common)?;
    let s = setup(&config)?;
    let (trace, _) = load_trace(measured)?;
    let defaults = FitOptions::default();
    let options = FitOptions {
        lower: config.number_or("fit.lower", defaults.lower),
        step: config.number_or("fit.step", defaults.step),
        tolerance: config.number_or("fit.tolerance", defaults.tolerance),
    };
    let fit = fit_effective_slit(&trace, &s, &options)?;
    let mut r = Report::new();
    entry(&mut r, "grating", &s.grating.label);
    entry(&mut r, "slit_width_m", sci(s.grating.slit_width));
    entry(&mut r, "s_eff_m", sci(fit.s_eff));
    entry(&mut r, "s_eff_nm", format!("{:.2}", fit.s_eff * 1e9));
    entry(&mut r, "suppression_ratio", format!("{:.4}", fit.suppression_ratio));
    entry(&mut r, "residual", sci(fit.residual));
    entry(&mut r, "evaluations", fit.evaluations);
    entry(&mut r, "bracket_lo_m", sci(fit.bracket.0));
    entry(&mut r, "bracket_hi_m", sci(fit.bracket.1));
    entry(&mut r, "zero_order_offset_m", sci(fit.zero_order_offset));
    if let Some(path) = trace_out {
        let mut params = setup_entries(&s.with_effective_slit_width(fit.s_eff))?;
        entry(&mut params, "fit.residual", sci(fit.residual));
        let mut out = output(Some(path))?;
        write_trace(&mut out, &fit.best_trace, &params)?;
        out.flush()?;
    }
    emit_report(common.out.as_deref(), &r)
}

pub fn fit_velocity(common: &Common, image: &Path) -> Result<()> {
    let config = load_config(common)?;
    let geom = geometry(&config)?;
    let g = grating(&config)?;
    let m = molecule(&config)?;
    let img = load_interferogram(image)?;
    let profile = stripe_velocity_profile(&img, &geom, g.period, &m)?;
    let mut r = Report::new();
    entry(&mut r, "stripes.used", profile.stripes.len());
    entry(&mut r, "stripes.skipped", profile.skipped.len());
    entry(&mut r, "monotone", profile.is_monotone());
    match (&profile.fit, &profile.under_determined) {
        (Some(fit), _) => {
            entry(&mut r, "fit.line_height_m", sci(fit.line_height));
            entry(&mut r, "fit.rms", format!("{:.6}", fit.rms));
        }
        (None, reason) => {
            entry(&mut r, "fit", "under-determined");
            entry(&mut r, "fit.reason", reason.clone().unwrap_or_default());
        }
    }
    for st in &profile.stripes {
        let p = format!("stripe.{:02}", st.index);
        entry(&mut r, &format!("{p}.y_m"), sci(st.y));
        entry(&mut r, &format!("{p}.velocity_m_s"), format!("{:.3}", st.velocity));
        if let Some(res) = st.residual {
            entry(&mut r, &format!("{p}.residual"), format!("{res:.6}"));
        }
    }
    for sk in &profile.skipped {
        entry(&mut r, &format!("stripe.{:02}.skipped", sk.index), &sk.reason);
    }
    emit_report(common.out.as_deref(), &r)
}

pub fn limits(common: &Common, csv: bool) -> Result<()> {
    let config = load_config(common)?;
    let g = grating(&config)?;
    let temperature = config.number_or("limits.temperature", DEFAULT_TEMPERATURE);
    let young = config.number_or("limits.youngs_modulus", NANOTUBE_YOUNGS_MODULUS);
    let (sigma, source) = if let Some(s) = config.number("limits.sigma") {
        (s, "config")
    } else if let Some(s) = g.vibration_amplitude {
        (s, "grating")
    } else if let Some(dia) = g.scroll_diameter {
        (thermal_scroll_amplitude(g.bar_length, dia, temperature, young)?, "thermal")
    } else {
        (DEFAULT_SIGMA, "default")
    };
    let n_max = config.count("limits.n_max").unwrap_or(9);
    let input = LimitsInput {
        slit_width: g.slit_width,
        sigma,
        period: g.period,
        n_max: u32::try_from(n_max).map_err(|_| Error::Config("limits.n_max too large".into()))?,
        reference_wavelength: config.number_or("limits.reference_wavelength", RUBIDIUM_D2_WAVELENGTH),
    };
    let report = LimitsReport::compute(&input)?;
    let mut r = Report::new();
    entry(&mut r, "grating", &g.label);
    entry(&mut r, "slit_width_m", sci(g.slit_width));
    entry(&mut r, "period_m", sci(g.period));
    entry(&mut r, "n_max", n_max);
    entry(&mut r, "sigma_source", source);
    for (k, v) in report.entries() {
        entry(&mut r, k, v);
    }
    entry(&mut r, "sigma_nm", format!("{:.3}", sigma * 1e9));
    entry(&mut r, "s_min_nm", format!("{:.3}", report.s_min * 1e9));
    if let (Some(count), Some(area)) = (
        config.number("limits.molecule_count"),
        config.number("limits.open_area"),
    ) {
        let footprint = config.number_or("limits.footprint", DEFAULT_MOLECULE_FOOTPRINT);
        let c = adsorption_coverage(count, area, footprint)?;
        entry(&mut r, "adsorption.density_per_cm2", sci(c.density_per_cm2));
        entry(&mut r, "adsorption.surface_fraction", sci(c.surface_fraction));
    }
    if csv {
        let mut out = output(common.out.as_deref())?;
        let keys: Vec<&str> = r.iter().map(|(k, _)| k.as_str()).collect();
        let values: Vec<&str> = r.iter().map(|(_, v)| v.as_str()).collect();
        writeln!(out, "{}", keys.join(","))?;
        writeln!(out, "{}", values.join(","))?;
        out.flush()?;
        Ok(())
    } else {
        emit_report(common.out.as_deref(), &r)
    }
}

pub fn render(common: &Common, image: &Path, stretch: Option<f64>) -> Result<()> {
    let config = load_config(common)?;
    let img = load_interferogram(image)?;
    let out: PathBuf = common
        .out
        .clone()
        .unwrap_or_else(|| image.with_extension("ppm"));
    let stretch = stretch_setting(&config, stretch);
    write_pixmap(&out, &img, stretch)?;
    let mut r = Report::new();
    entry(&mut r, "pixmap", out.display());
    entry(&mut r, "width", img.grid.nx);
    entry(&mut r, "height", ((stretch * img.grid.ny as f64).round() as usize).max(1));
    emit_report(None, &r)
}
