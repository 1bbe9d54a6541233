//! `nanograting` command-line front end.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "nanograting",
    version,
    about = "Matter-wave diffraction at nanomechanical gratings"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// key = value configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Grating preset (sinx, slg, scroll, bilayer, biphenyl)
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Extra key=value setting, applied after the config file
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output path (stdout when omitted, where possible)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for optional noise
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detector trace of one velocity band as CSV
    Simulate,
    /// Interferogram of a velocity distribution (raw .bin/.json and .ppm)
    SynthImage {
        /// Vertical display stretch for the pixmap
        #[arg(long)]
        stretch: Option<f64>,
    },
    /// Fit the effective slit width to a measured trace
    FitSeff {
        /// Trace CSV to fit
        #[arg(long, value_name = "PATH")]
        measured: PathBuf,
        /// Where to write the best-fit simulated trace
        #[arg(long, value_name = "PATH")]
        trace_out: Option<PathBuf>,
    },
    /// Velocity profile of an interferogram, stripe by stripe
    FitVelocity {
        /// Raw interferogram (.bin with .json sidecar)
        #[arg(long, value_name = "PATH")]
        image: PathBuf,
    },
    /// Recoil and coherence budget of a grating
    Limits {
        /// Print a CSV header and row instead of key = value lines
        #[arg(long)]
        csv: bool,
    },
    /// Render a raw interferogram as a Hot-colour pixmap
    Render {
        /// Raw interferogram (.bin with .json sidecar)
        #[arg(long, value_name = "PATH")]
        image: PathBuf,
        /// Vertical display stretch
        #[arg(long)]
        stretch: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate => commands::simulate(&cli.common),
        Command::SynthImage { stretch } => commands::synth_image(&cli.common, *stretch),
        Command::FitSeff {
            measured,
            trace_out,
        } => commands::fit_seff(&cli.common, measured, trace_out.as_deref()),
        Command::FitVelocity { image } => commands::fit_velocity(&cli.common, image),
        Command::Limits { csv } => commands::limits(&cli.common, *csv),
        Command::Render { image, stretch } => commands::render(&cli.common, image, *stretch),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
