//! Subcommand bodies. Each returns `Ok(true)` on success and `Ok(false)` when
//! a check failed.

use std::f64::consts::PI;

use anyhow::{bail, Result};
use num_complex::Complex64;
use serde::Serialize;

use toroscat::ab2d::{ab_sigma_diff, ab_spectrum, ab_total_truncated, AbProfile};
use toroscat::config::RunConfig;
use toroscat::eikonal::{essential_arc, phase, theta, w_function, PhasePoint, Sign};
use toroscat::geometry::{Direction, Vec3};
use toroscat::smatrix::{assemble_parts, check_resolution, spectrum, KernelEvaluator, KernelMatrix};
use toroscat::verify::{run_all, VerifyContext};
use toroscat::xsection::cross_section_table;

use crate::output::{finite, CsvTable, Sink};
use crate::Command;

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<bool> {
    let sink = Sink {
        csv: cfg.output.csv.as_deref(),
        json: cfg.output.json.as_deref(),
    };
    let done = match command {
        Command::Flux => flux(cfg, &sink),
        Command::Phase { x, xi } => phase_at(cfg, &sink, Vec3::from(*x), Vec3::from(*xi)),
        Command::Smatrix(_) => smatrix(cfg, &sink),
        Command::Spectrum(_) => spectrum_of(cfg, &sink),
        Command::Xsection { omega0, .. } => xsection(cfg, &sink, *omega0),
        Command::Ab2d { flux, theta_min, .. } => ab2d(cfg, &sink, *flux, *theta_min),
        Command::Verify => return verify(cfg, &sink),
    };
    done.map(|()| true)
}

#[derive(Serialize)]
struct FluxSummary {
    flux: f64,
    max_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<(f64, f64)>,
    arc_endpoints: [[f64; 2]; 2],
}

fn flux(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let profile = cfg.profile_function()?;
    let flux = finite("flux", profile.flux())?;
    let (lo, hi) = essential_arc(flux)?.endpoints();
    sink.emit(
        &FluxSummary {
            flux,
            max_value: profile.max_value(),
            support: profile.support(),
            arc_endpoints: [pair(lo), pair(hi)],
        },
        None,
    )
}

#[derive(Serialize)]
struct PhaseSummary {
    x: [f64; 3],
    xi: [f64; 3],
    phi_plus: f64,
    phi_minus: f64,
    theta: f64,
    w: [f64; 2],
}

fn phase_at(cfg: &RunConfig, sink: &Sink, x: Vec3, xi: Vec3) -> Result<()> {
    let potential = cfg.potential()?;
    let p = PhasePoint::new(x, xi)?;
    let profile = potential.profile();
    sink.emit(
        &PhaseSummary {
            x: x.into(),
            xi: xi.into(),
            phi_plus: phase(&potential, &p, Sign::Plus)?,
            phi_minus: phase(&potential, &p, Sign::Minus)?,
            theta: theta(profile, &xi)?,
            w: pair(w_function(profile, &Direction::new(xi)?)),
        },
        None,
    )
}

/// Evaluator at default shell resolution after the refinement self-check.
fn checked_evaluator(cfg: &RunConfig) -> Result<(KernelEvaluator, f64)> {
    let potential = cfg.potential()?;
    let shell = cfg.shell()?;
    let evaluator = KernelEvaluator::new(&potential, shell)?;
    let change = check_resolution(&potential, shell, *evaluator.resolution(), cfg.tolerances.kernel)?;
    Ok((evaluator, change))
}

#[derive(Serialize)]
struct SmatrixSummary {
    flux: f64,
    grid: [usize; 2],
    born_order: u8,
    hs_norm_s1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    hs_norm_s2: Option<f64>,
    unitarity_defect: f64,
    resolution_change: f64,
}

fn total_matrix(cfg: &RunConfig) -> Result<(KernelMatrix, SmatrixSummary)> {
    let (evaluator, change) = checked_evaluator(cfg)?;
    let grid = cfg.sphere_grid()?;
    let parts = assemble_parts(&evaluator, &grid, cfg.born());
    let total = parts.total();
    let summary = SmatrixSummary {
        flux: cfg.potential()?.flux(),
        grid: [grid.n_polar(), grid.n_azimuth()],
        born_order: cfg.born_order,
        hs_norm_s1: parts.s1.hs_norm()?,
        hs_norm_s2: parts.s2.as_ref().map(|s| s.hs_norm()).transpose()?,
        unitarity_defect: total.unitarity_defect(),
        resolution_change: change,
    };
    Ok((total, summary))
}

fn smatrix(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let (total, summary) = total_matrix(cfg)?;
    let m = total.operator_matrix();
    let mut table = CsvTable::new(&["i", "j", "re", "im"]);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            table.row(&[i, j], &[m[(i, j)].re, m[(i, j)].im])?;
        }
    }
    sink.emit(&summary, Some(table))
}

#[derive(Serialize)]
struct SpectrumSummary {
    flux: f64,
    grid: [usize; 2],
    born_order: u8,
    eigenvalue_count: usize,
    #[serde(rename = "fraction_within_0.05")]
    fraction_within_default: f64,
    arc_tolerance: f64,
    fraction_within_arc_tolerance: f64,
    arc_endpoints: [[f64; 2]; 2],
    unitarity_defect: f64,
}

fn spectrum_of(cfg: &RunConfig, sink: &Sink) -> Result<()> {
    let (total, summary) = total_matrix(cfg)?;
    let arc = essential_arc(summary.flux)?;
    let report = spectrum(&total, arc)?;
    let mut table = CsvTable::new(&["re", "im", "dist_to_arc"]);
    for (z, d) in report.eigenvalues.iter().zip(&report.distances) {
        table.row(&[], &[z.re, z.im, *d])?;
    }
    let (lo, hi) = arc.endpoints();
    let out = SpectrumSummary {
        flux: summary.flux,
        grid: summary.grid,
        born_order: summary.born_order,
        eigenvalue_count: report.eigenvalues.len(),
        fraction_within_default: report.fraction_within(0.05),
        arc_tolerance: cfg.tolerances.arc,
        fraction_within_arc_tolerance: report.fraction_within(cfg.tolerances.arc),
        arc_endpoints: [pair(lo), pair(hi)],
        unitarity_defect: report.unitarity_defect,
    };
    sink.emit(&out, Some(table))
}

#[derive(Serialize)]
struct XsectionSummary {
    omega0: [f64; 2],
    lambda: f64,
    grid: [usize; 2],
    born_order: u8,
    sigma_tot: f64,
}

fn xsection(cfg: &RunConfig, sink: &Sink, omega0: f64) -> Result<()> {
    if !(0.0..=PI).contains(&omega0) {
        bail!("--omega0 = {omega0} is outside [0, pi]");
    }
    let (evaluator, _) = checked_evaluator(cfg)?;
    let grid = cfg.sphere_grid()?;
    let incoming = Direction::from_angles(omega0, 0.0);
    let table = cross_section_table(&evaluator, &grid, &incoming, cfg.born());
    let mut csv = CsvTable::new(&["colat", "azim", "sigma_diff"]);
    for (d, v) in &table.rows {
        csv.row(&[], &[d.colatitude(), d.azimuth(), *v])?;
    }
    let out = XsectionSummary {
        omega0: [omega0, 0.0],
        lambda: cfg.lambda,
        grid: [grid.n_polar(), grid.n_azimuth()],
        born_order: cfg.born_order,
        sigma_tot: table.sigma_tot,
    };
    sink.emit(&out, Some(csv))
}

#[derive(Serialize)]
struct Ab2dSummary {
    flux: f64,
    lambda: f64,
    spectrum_points: Vec<[f64; 2]>,
    /// (θ, Σ_diff) on a logarithmic θ grid from θ_min to π.
    sigma_diff_table: Vec<[f64; 2]>,
    /// (θ_min / 2^k, truncated total) for k = 0..6.
    truncated_total_series: Vec<[f64; 2]>,
}

fn ab2d(cfg: &RunConfig, sink: &Sink, flux: Option<f64>, theta_min: f64) -> Result<()> {
    let flux = match flux {
        Some(f) => f,
        None => cfg.potential()?.flux(),
    };
    if !(theta_min > 0.0 && theta_min < PI) {
        bail!("--theta-min = {theta_min} is outside (0, pi)");
    }
    let lambda = cfg.lambda;
    let spectrum_points = ab_spectrum(&AbProfile::constant(flux), 256)?
        .into_iter()
        .map(pair)
        .collect();
    let steps = 64;
    let ratio = (PI / theta_min).ln() / (steps - 1) as f64;
    let sigma_diff_table = (0..steps)
        .map(|i| {
            let t = if i == steps - 1 {
                PI
            } else {
                theta_min * (ratio * i as f64).exp()
            };
            Ok([t, ab_sigma_diff(t, lambda, flux)?])
        })
        .collect::<toroscat::Result<_>>()?;
    let truncated_total_series = (0..7)
        .map(|k| {
            let t = theta_min / 2f64.powi(k);
            Ok([t, ab_total_truncated(t, lambda, flux)?])
        })
        .collect::<toroscat::Result<_>>()?;
    sink.emit(
        &Ab2dSummary {
            flux,
            lambda,
            spectrum_points,
            sigma_diff_table,
            truncated_total_series,
        },
        None,
    )
}

#[derive(Serialize)]
struct CheckLine {
    name: &'static str,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<f64>,
    threshold: f64,
    detail: String,
}

#[derive(Serialize)]
struct VerifySummary {
    seed: u64,
    all_passed: bool,
    checks: Vec<CheckLine>,
}

fn verify(cfg: &RunConfig, sink: &Sink) -> Result<bool> {
    let report = run_all(&VerifyContext::from_config(cfg)?);
    let checks: Vec<CheckLine> = report
        .checks
        .iter()
        .map(|c| CheckLine {
            name: c.check.name(),
            status: if c.passed { "pass" } else { "fail" },
            metric: c.metric,
            threshold: c.threshold,
            detail: c.detail.clone(),
        })
        .collect();
    for c in &checks {
        eprintln!("{:<4} {:<24} {}", c.status, c.name, c.detail);
    }
    let all_passed = report.all_passed();
    sink.emit(
        &VerifySummary {
            seed: cfg.seed,
            all_passed,
            checks,
        },
        None,
    )?;
    Ok(all_passed)
}
