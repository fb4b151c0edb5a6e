//! `mcgl`: stability analysis of periodic waves from the command line.
//!
//! Exit codes: 0 stable (or success), 1 unstable, 2 inconclusive, 3 runtime
//! error, 4 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

mod commands;
mod manifest;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_ERROR: u8 = 3;
pub const EXIT_USAGE: u8 = 4;

#[derive(Debug, Parser, Clone, Serialize)]
#[command(
    name = "mcgl",
    version,
    about = "Diffusive stability of waves in the singular modified complex Ginzburg-Landau system"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Full analysis of one wave; exit code reports the verdict.
    Analyze(WaveArgs),
    /// Tracked eigenvalue branches over a frequency range, as CSV.
    Spectrum(SpectrumArgs),
    /// Verdicts over a range of wavenumbers and the stability boundary.
    SweepKappa(SweepArgs),
    /// Full spectrum against the Darcy reduction.
    DarcyCompare(DarcyArgs),
    /// Region-by-region spectral check only.
    Regions(WaveArgs),
    /// Long-wave coefficient and Turing onset of the vasculogenesis model.
    TuringExample(TuringArgs),
    /// Curve files for the branch-versus-parabola comparison panels.
    Figures(FigureArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct Common {
    /// Model parameter file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Region separation constant.
    #[arg(long = "C", default_value_t = 10.0)]
    pub c: f64,
    /// Grid points per decade of frequency.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct WaveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Mean-mode offset, comma separated; zero by default.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b0: Vec<f64>,
    /// Also write the symbol matrices.
    #[arg(long)]
    pub dump_symbol: bool,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub wave: WaveArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    /// Log-spaced instead of linear grid (needs sigma_min > 0).
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub kappa_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b0: Vec<f64>,
    /// Bisection tolerance for the boundary.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct DarcyArgs {
    #[command(flatten)]
    pub wave: WaveArgs,
    #[arg(long)]
    pub sigma_min: Option<f64>,
    #[arg(long)]
    pub sigma_max: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct TuringArgs {
    /// Vasculogenesis parameter file (JSON).
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Largest wavenumber in the branch file.
    #[arg(long, default_value_t = 5.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    /// Range of alpha*beta for the onset search, as lo,hi.
    #[arg(long, value_delimiter = ',')]
    pub range: Option<Vec<f64>>,
    /// Fit window for the long-wave coefficient.
    #[arg(long)]
    pub k_window: Option<f64>,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct FigureArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 401)]
    pub n: usize,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("MCGL_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                mcgl::exec::set_thread_cap(n);
            }
            _ => {
                eprintln!("error: MCGL_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli, &argv[1..]) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<commands::UsageError>().is_some();
            ExitCode::from(if usage { EXIT_USAGE } else { EXIT_ERROR })
        }
    }
}
