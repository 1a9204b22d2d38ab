//! `toroscat`: compute phases, scattering matrices, spectra and cross-sections
//! for the toroidal-coil potential, or run the invariant suite.
//!
//! Exit codes: 0 success, 1 failed check or computation error, 2 usage or
//! configuration error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use toroscat::config::{parse_config, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "toroscat",
    version,
    about = "Scattering by a toroidal-coil magnetic potential"
)]
struct Cli {
    /// JSON run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the CSV table here (overrides `output.csv`).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Write the JSON summary here instead of stdout (overrides `output.json`).
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Overrides shared by the scattering-matrix subcommands.
#[derive(Debug, Args, Default)]
pub struct ShellArgs {
    #[arg(long)]
    lambda: Option<f64>,

    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    born_order: Option<u8>,

    /// Grid size as n_polar,n_azimuth.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,

    /// Allowed kernel change under shell-quadrature refinement.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Flux of the configured profile and its spectral arc.
    Flux,
    /// Phases Φ±, Θ and w at a point x for a momentum ξ.
    Phase {
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        x: [f64; 3],
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        xi: [f64; 3],
    },
    /// The discretized scattering matrix as CSV entries plus norms.
    Smatrix(ShellArgs),
    /// Eigenvalues of the discretized scattering matrix.
    Spectrum(ShellArgs),
    /// Differential and total cross-section for one incoming direction.
    Xsection {
        /// Colatitude of the incoming direction (azimuth 0).
        #[arg(long)]
        omega0: f64,
        #[command(flatten)]
        shell: ShellArgs,
    },
    /// The two-dimensional Aharonov–Bohm comparison for constant flux.
    Ab2d {
        /// Defaults to the flux of the configured profile.
        #[arg(long)]
        flux: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 1e-2)]
        theta_min: f64,
    },
    /// Run the full invariant suite.
    Verify,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected n_polar,n_azimuth")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated numbers".into());
    }
    let mut v = [0.0; 3];
    for (slot, t) in v.iter_mut().zip(parts) {
        *slot = t.trim().parse().map_err(|e| format!("{t:?}: {e}"))?;
    }
    Ok(v)
}

/// How a run failed; decides the exit code.
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => "{}".to_string(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(p) = &cli.csv {
        cfg.output.csv = Some(p.clone());
    }
    if let Some(p) = &cli.json {
        cfg.output.json = Some(p.clone());
    }
    let shell = match &cli.command {
        Command::Smatrix(s) | Command::Spectrum(s) | Command::Xsection { shell: s, .. } => Some(s),
        _ => None,
    };
    if let Some(s) = shell {
        if let Some(l) = s.lambda {
            cfg.lambda = l;
        }
        if let Some(b) = s.born_order {
            cfg.born_order = b;
        }
        if let Some((np, na)) = s.grid {
            cfg.grid.n_polar = np;
            cfg.grid.n_azimuth = na;
        }
        if let Some(t) = s.tol {
            cfg.tolerances.kernel = t;
        }
    }
    if let Command::Ab2d { lambda: Some(l), .. } = cli.command {
        cfg.lambda = l;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("TOROSCAT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("TOROSCAT_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: Cli) -> std::result::Result<bool, Failure> {
    configure_threads().map_err(Failure::Usage)?;
    let cfg = load_config(&cli).map_err(Failure::Usage)?;
    commands::execute(&cli.command, &cfg).map_err(Failure::Run)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
    }
}
