//! `vdc`: command-line entry point for the visual dynamic complexity toolkit.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::CliError;

#[derive(Parser, Debug)]
#[command(name = "vdc", version, about = "Visual dynamic complexity experiments")]
struct Cli {
    /// Worker threads for independent cells, repeats and seeds.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a drifting grating or natural-texture video.
    GenStimulus(GenStimulusArgs),
    /// Score an SF x TF grid of gratings and check the orderings.
    Sweep(SweepArgs),
    /// Fit the decoding coefficients.
    Fit(FitArgs),
    /// Open-loop approaches towards a wall.
    Approach(ApproachArgs),
    /// Closed-loop light-ring navigation with response profiling.
    Navigate(NavigateArgs),
    /// Collision detection-and-avoidance case study.
    Collision(CollisionArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML file with settings for this subcommand; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct GenStimulusArgs {
    #[command(flatten)]
    pub common: Common,
    /// Texture: `grating`, `natural`, or an image path.
    #[arg(long)]
    pub texture: Option<String>,
    /// Spatial frequency, cycles per 360 degrees.
    #[arg(long)]
    pub sf: Option<f64>,
    /// Temporal frequency, Hz.
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long)]
    pub contrast: Option<f64>,
    #[arg(long)]
    pub mean: Option<f64>,
    /// Initial phase, radians.
    #[arg(long)]
    pub phase: Option<f64>,
    /// Field of view represented by the frame width, degrees.
    #[arg(long)]
    pub fov: Option<f64>,
    /// Drift in the reverse direction.
    #[arg(long)]
    pub reverse: bool,
    /// Seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Frames per second.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Texture displacement per temporal cycle, pixels.
    #[arg(long)]
    pub cycle_px: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated spatial frequencies, cycles per 360 degrees.
    #[arg(long, value_delimiter = ',')]
    pub sf: Option<Vec<f64>>,
    /// Comma-separated temporal frequencies, Hz.
    #[arg(long, value_delimiter = ',')]
    pub tf: Option<Vec<f64>>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Averaging window per cell after warm-up, seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Model parameter file.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSV with columns omega_true,lambda,c_hat,r.
    #[arg(long, conflicts_with = "calibrate")]
    pub samples: Option<PathBuf>,
    /// Generate the fit data from a grating sweep with known angular velocity.
    #[arg(long)]
    pub calibrate: bool,
    #[arg(long, value_delimiter = ',')]
    pub sf: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub tf: Option<Vec<f64>>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    /// Model parameter file supplying everything but the fitted coefficients.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ArenaArgs {
    /// Wall texture: `grating` or `natural`.
    #[arg(long)]
    pub wall: Option<String>,
    /// Image file for natural walls.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Wall temporal frequency, Hz.
    #[arg(long)]
    pub tf: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Model parameter file.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ApproachArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub arena: ArenaArgs,
    #[arg(long)]
    pub repeats: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct NavigateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub arena: ArenaArgs,
    /// Simulated run length, minutes.
    #[arg(long)]
    pub minutes: Option<f64>,
    /// Map grid resolution per side.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Score threshold for the histogram.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct CollisionArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub arena: ArenaArgs,
    #[arg(long)]
    pub minutes: Option<f64>,
    /// Spike threshold; a leading `+` or `-` adjusts the configured value.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub cells: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    match cli.command {
        Command::GenStimulus(a) => commands::gen_stimulus(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Approach(a) => commands::approach(&a),
        Command::Navigate(a) => commands::navigate(&a),
        Command::Collision(a) => commands::collision(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
