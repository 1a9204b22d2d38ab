//! The invariant suite: gauge, eikonal, phase, Θ, w, symbol, cancellation,
//! arc, Hilbert–Schmidt, cross-section, 2-D contrast and Born-trend checks.
//!
//! Every check is deterministic for a fixed seed and reports a scalar
//! metric against its threshold.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ab2d::{ab_sigma_diff, ab_spectrum, ab_total_truncated, AbProfile};
use crate::config::RunConfig;
use crate::eikonal::{essential_arc, grad_phase_fd, line_integral_phase, phase, theta, w_function, PhasePoint, Sign};
use crate::error::{Error, Result};
use crate::geometry::{build_grid, Direction, Vec3};
use crate::potential::{check_transversal_gauge, vector_potential, PotentialConfig};
use crate::profile::ProfileFunction;
use crate::smatrix::{assemble_parts, spectrum, w_matrix, BornOrder, EnergyShell, KernelEvaluator};
use crate::symbols::Symbols;
use crate::xsection::sigma_tot;

/// The grid ladder used by the refinement checks.
pub const GRID_LADDER: [(usize, usize); 3] = [(12, 24), (16, 32), (20, 40)];

/// One check of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Gauge,
    EikonalGradient,
    PhaseOracle,
    ThetaInvariance,
    WEndpoints,
    SymbolHamiltonian,
    ZeroFieldCancellation,
    ArcAccumulation,
    HilbertSchmidt,
    TotalCrossSection,
    AharonovBohmContrast,
    BornTrend,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::Gauge,
        Check::EikonalGradient,
        Check::PhaseOracle,
        Check::ThetaInvariance,
        Check::WEndpoints,
        Check::SymbolHamiltonian,
        Check::ZeroFieldCancellation,
        Check::ArcAccumulation,
        Check::HilbertSchmidt,
        Check::TotalCrossSection,
        Check::AharonovBohmContrast,
        Check::BornTrend,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Gauge => "gauge",
            Check::EikonalGradient => "eikonal_gradient",
            Check::PhaseOracle => "phase_oracle",
            Check::ThetaInvariance => "theta_invariance",
            Check::WEndpoints => "w_endpoints",
            Check::SymbolHamiltonian => "symbol_hamiltonian",
            Check::ZeroFieldCancellation => "zero_field_cancellation",
            Check::ArcAccumulation => "arc_accumulation",
            Check::HilbertSchmidt => "hilbert_schmidt",
            Check::TotalCrossSection => "total_cross_section",
            Check::AharonovBohmContrast => "aharonov_bohm_contrast",
            Check::BornTrend => "born_trend",
        }
    }
}

/// Result of a single check. `metric` is `None` when the computation itself
/// failed; `detail` then holds the error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    pub metric: Option<f64>,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(check: Check, passed: bool, metric: f64, threshold: f64, detail: String) -> Self {
        Self {
            check,
            passed: passed && metric.is_finite(),
            metric: metric.is_finite().then_some(metric),
            threshold,
            detail,
        }
    }

    fn failed(check: Check, threshold: f64, err: &Error) -> Self {
        Self {
            check,
            passed: false,
            metric: None,
            threshold,
            detail: err.to_string(),
        }
    }
}

/// The inputs shared by all checks.
#[derive(Debug, Clone)]
pub struct VerifyContext {
    pub potential: PotentialConfig,
    pub shell: EnergyShell,
    pub seed: u64,
    /// Arc distance counted as accumulation.
    pub arc_delta: f64,
}

impl VerifyContext {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        Ok(Self {
            potential: cfg.potential()?,
            shell: cfg.shell()?,
            seed: cfg.seed,
            arc_delta: cfg.tolerances.arc,
        })
    }

    fn rng(&self, check: Check) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (0x9e37_79b9_7f4a_7c15_u64.wrapping_mul(check as u64 + 1)))
    }

    fn radius(&self) -> f64 {
        self.potential.radius()
    }

    fn with_profile(&self, profile: ProfileFunction) -> Result<PotentialConfig> {
        PotentialConfig::new(profile, self.radius())
    }

    /// The configured profile when nonzero, otherwise the default bump.
    fn active_profile(&self) -> ProfileFunction {
        let p = self.potential.profile();
        if p.is_zero() {
            ProfileFunction::bump(0.5, FRAC_PI_2, FRAC_PI_4).expect("default bump")
        } else {
            p.clone()
        }
    }
}

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let az: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(s * az.cos(), s * az.sin(), z)
}

fn random_point(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> Vec3 {
    random_direction(rng) * rng.random_range(r_lo..=r_hi)
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-300 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed()))
}

/// max |⟨A(x), x⟩| over 1000 random points with |x| ∈ [R, 50R], in under 1 s.
pub fn check_gauge(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1e-14;
    let mut rng = ctx.rng(Check::Gauge);
    let r = ctx.radius();
    let samples: Vec<Vec3> = (0..1000).map(|_| random_point(&mut rng, r, 50.0 * r)).collect();
    let (worst, elapsed) = timed(|| check_transversal_gauge(&ctx.potential, &samples))?;
    Ok(CheckOutcome::new(
        Check::Gauge,
        worst <= THRESHOLD && elapsed < Duration::from_secs(1),
        worst,
        THRESHOLD,
        format!("1000 samples in {:.3} s", elapsed.as_secs_f64()),
    ))
}

/// |∇Φ± - A| by central differences at h = 1e-4 over 200 random (x, ξ) with
/// |x| ≥ R + 1, plus second-order decay of the worst error from h = 1e-2 to
/// h = 5e-3.
pub fn check_eikonal_gradient(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1e-6;
    const RATIO: f64 = 0.3;
    let mut rng = ctx.rng(Check::EikonalGradient);
    let r = ctx.radius();
    let points: Vec<(PhasePoint, Sign)> = (0..200)
        .map(|i| {
            let x = random_point(&mut rng, r + 1.0, 20.0 * r);
            let xi = random_direction(&mut rng) * rng.random_range(0.2..3.0);
            let sign = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
            PhasePoint::new(x, xi).map(|p| (p, sign))
        })
        .collect::<Result<_>>()?;
    let ((worst, coarse, fine), elapsed) = timed(|| {
        let err = |p: &PhasePoint, sign, h| -> Result<f64> {
            let g = grad_phase_fd(&ctx.potential, p, sign, h)?;
            Ok((g - vector_potential(&ctx.potential, &p.x)?).norm())
        };
        let (mut worst, mut coarse, mut fine) = (0.0_f64, 0.0_f64, 0.0_f64);
        for (p, sign) in &points {
            worst = worst.max(err(p, *sign, 1e-4)?);
            coarse = coarse.max(err(p, *sign, 1e-2)?);
            fine = fine.max(err(p, *sign, 5e-3)?);
        }
        Ok((worst, coarse, fine))
    })?;
    let ratio = if coarse > 0.0 { fine / coarse } else { 0.0 };
    Ok(CheckOutcome::new(
        Check::EikonalGradient,
        worst <= THRESHOLD && ratio <= RATIO && elapsed < Duration::from_secs(10),
        worst,
        THRESHOLD,
        format!(
            "h-halving ratio {ratio:.4} (max {RATIO}), errors {coarse:.3e} -> {fine:.3e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    ))
}

/// Closed-form phase against the ray integral with s_max = 1e4 on 100
/// random points, both signs; rays through the ball are resampled.
pub fn check_phase_oracle(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1e-6;
    const S_MAX: f64 = 1e4;
    let mut rng = ctx.rng(Check::PhaseOracle);
    let r = ctx.radius();
    let (worst, elapsed) = timed(|| {
        let mut worst = 0.0_f64;
        let mut accepted = 0;
        while accepted < 100 {
            let p = PhasePoint::new(random_point(&mut rng, r, 10.0 * r), random_direction(&mut rng))?;
            let mut diffs = [0.0; 2];
            let mut through_ball = false;
            for (slot, sign) in diffs.iter_mut().zip([Sign::Plus, Sign::Minus]) {
                match line_integral_phase(&ctx.potential, &p, sign, S_MAX) {
                    Ok(li) => *slot = (li.value - phase(&ctx.potential, &p, sign)?).abs(),
                    Err(Error::RayInsideBall { .. }) => through_ball = true,
                    Err(e) => return Err(e),
                }
            }
            if !through_ball {
                worst = diffs.iter().fold(worst, |m, &d| m.max(d));
                accepted += 1;
            }
        }
        Ok(worst)
    })?;
    Ok(CheckOutcome::new(
        Check::PhaseOracle,
        worst <= THRESHOLD && elapsed < Duration::from_secs(30),
        worst,
        THRESHOLD,
        format!("100 points, both signs, {:.2} s", elapsed.as_secs_f64()),
    ))
}

/// Θ = Φ₋ - Φ₊ from ray integrals does not depend on the base point, and
/// the closed form attains exactly [-flux, flux] over a 720-direction sweep.
pub fn check_theta_invariance(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1e-6;
    let mut rng = ctx.rng(Check::ThetaInvariance);
    let r = ctx.radius();
    let profile = ctx.potential.profile();
    let mut spread = 0.0_f64;
    for _ in 0..20 {
        let xi = random_direction(&mut rng);
        let mut values = Vec::with_capacity(10);
        while values.len() < 10 {
            let p = PhasePoint::new(random_point(&mut rng, r, 10.0 * r), xi)?;
            if p.impact().0.norm() < r {
                continue;
            }
            let minus = line_integral_phase(&ctx.potential, &p, Sign::Minus, 1e4)?.value;
            let plus = line_integral_phase(&ctx.potential, &p, Sign::Plus, 1e4)?.value;
            values.push(minus - plus);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        spread = spread.max(var.sqrt()).max((mean - theta(profile, &xi)?).abs());
    }
    let flux = profile.flux();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..720 {
        let colat = PI * j as f64 / 719.0;
        let t = theta(profile, Direction::from_angles(colat, 0.1 * j as f64).vector())?;
        lo = lo.min(t);
        hi = hi.max(t);
    }
    let range_error = (lo + flux).abs().max((hi - flux).abs());
    let metric = spread.max(range_error);
    Ok(CheckOutcome::new(
        Check::ThetaInvariance,
        metric <= THRESHOLD,
        metric,
        THRESHOLD,
        format!("max spread over x {spread:.3e}; range [{lo:.12}, {hi:.12}] vs flux {flux:.12}"),
    ))
}

/// w at the poles and the equator.
pub fn check_w_endpoints(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1e-12;
    let profile = ctx.potential.profile();
    let flux = profile.flux();
    let cases = [
        (Direction::north(), Complex64::from_polar(1.0, -flux)),
        (Direction::south(), Complex64::from_polar(1.0, flux)),
        (Direction::from_angles(FRAC_PI_2, 0.0), Complex64::new(1.0, 0.0)),
        (Direction::from_angles(FRAC_PI_2, 2.3), Complex64::new(1.0, 0.0)),
    ];
    let worst = cases
        .iter()
        .map(|(d, expected)| (w_function(profile, d) - expected).norm())
        .fold(0.0, f64::max);
    Ok(CheckOutcome::new(
        Check::WEndpoints,
        worst <= THRESHOLD,
        worst,
        THRESHOLD,
        format!("flux {flux:.15}"),
    ))
}

/// symbol_t against the finite-difference Hamiltonian residual on 50 shell
/// points: the worst error must drop by the second-order factor when h
/// halves from 1e-2 to 5e-3.
pub fn check_symbol_hamiltonian(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const RATIO: f64 = 0.3;
    let mut rng = ctx.rng(Check::SymbolHamiltonian);
    let r = ctx.radius();
    let k = ctx.shell.k();
    let symbols = Symbols::new(ctx.potential.clone(), k)?;
    let (mut coarse, mut fine) = (0.0_f64, 0.0_f64);
    for i in 0..50 {
        let x = random_point(&mut rng, r + 0.05, r + 0.95);
        let xi = random_direction(&mut rng) * k;
        let sign = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let t = symbols.symbol_t(&x, &xi, sign)?.value;
        coarse = coarse.max((symbols.hamiltonian_residual_oracle(&x, &xi, sign, 1e-2)? - t).norm());
        fine = fine.max((symbols.hamiltonian_residual_oracle(&x, &xi, sign, 5e-3)? - t).norm());
    }
    let ratio = fine / coarse;
    Ok(CheckOutcome::new(
        Check::SymbolHamiltonian,
        ratio <= RATIO,
        ratio,
        RATIO,
        format!(
            "worst errors {coarse:.3e} (h=1e-2) -> {fine:.3e} (h=5e-3), C = {:.3}",
            coarse / 1e-4
        ),
    ))
}

/// With a ≡ 0 the assembled 16×32 matrix is the identity and every
/// eigenvalue is 1.
pub fn check_zero_field_cancellation(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1e-3;
    let potential = ctx.with_profile(ProfileFunction::Zero)?;
    let evaluator = KernelEvaluator::new(&potential, ctx.shell)?;
    let grid = build_grid(16, 32)?;
    let total = assemble_parts(&evaluator, &grid, BornOrder::One).total();
    let deviation = total.max_deviation_from_identity();
    let report = spectrum(&total, essential_arc(0.0)?)?;
    let eig = report.eigenvalues.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max);
    let metric = deviation.max(eig);
    Ok(CheckOutcome::new(
        Check::ZeroFieldCancellation,
        metric <= THRESHOLD,
        metric,
        THRESHOLD,
        format!("max |S - I| {deviation:.3e}, max |lambda - 1| {eig:.3e}"),
    ))
}

/// For a flux-π/2 bump the share of eigenvalues within `arc_delta` of the arc
/// is at least 0.9 on each grid of the ladder and does not decrease; for 𝒲
/// alone it is exactly 1.
pub fn check_arc_accumulation(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 0.9;
    let profile = ProfileFunction::bump_with_flux(FRAC_PI_2, FRAC_PI_2, FRAC_PI_4)?;
    let potential = ctx.with_profile(profile.clone())?;
    let arc = essential_arc(potential.flux())?;
    let evaluator = KernelEvaluator::new(&potential, ctx.shell)?;
    let mut fractions = Vec::new();
    let mut w_fractions = Vec::new();
    for (np, na) in GRID_LADDER {
        let grid = build_grid(np, na)?;
        let total = assemble_parts(&evaluator, &grid, BornOrder::One).total();
        fractions.push(spectrum(&total, arc)?.fraction_within(ctx.arc_delta));
        w_fractions.push(spectrum(&w_matrix(&profile, &grid), arc)?.fraction_within(0.0));
    }
    let minimum = fractions.iter().copied().fold(f64::INFINITY, f64::min);
    let monotone = fractions.windows(2).all(|w| w[1] >= w[0]);
    let w_exact = w_fractions.iter().all(|&f| f == 1.0);
    Ok(CheckOutcome::new(
        Check::ArcAccumulation,
        minimum >= THRESHOLD && monotone && w_exact,
        minimum,
        THRESHOLD,
        format!(
            "peak a = {:.6}, fractions {fractions:?}, W-part fractions {w_fractions:?}",
            profile.max_value()
        ),
    ))
}

/// Hilbert–Schmidt norms of S₁ and S - 𝒲 on the two finest grids.
pub fn check_hilbert_schmidt(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 0.05;
    let potential = ctx.with_profile(ctx.active_profile())?;
    let evaluator = KernelEvaluator::new(&potential, ctx.shell)?;
    let mut norms = Vec::new();
    for (np, na) in &GRID_LADDER[1..] {
        let parts = assemble_parts(&evaluator, &build_grid(*np, *na)?, BornOrder::One);
        norms.push((parts.s1.hs_norm()?, parts.total().hs_norm()?));
    }
    let change = relative_change(norms[0].0, norms[1].0).max(relative_change(norms[0].1, norms[1].1));
    Ok(CheckOutcome::new(
        Check::HilbertSchmidt,
        change <= THRESHOLD,
        change,
        THRESHOLD,
        format!(
            "||S1||_HS {:.6} -> {:.6}, ||S - W||_HS {:.6} -> {:.6}",
            norms[0].0, norms[1].0, norms[0].1, norms[1].1
        ),
    ))
}

/// Σ_tot(ω₀) over a colatitude sweep of ω₀ (poles included) on each grid of
/// the ladder: finite, with successive changes of at most 1%.
pub fn check_total_cross_section(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 0.01;
    let potential = ctx.with_profile(ctx.active_profile())?;
    let evaluator = KernelEvaluator::new(&potential, ctx.shell)?;
    let sweep: Vec<Direction> = (0..=8)
        .map(|j| Direction::from_angles(PI * j as f64 / 8.0, 0.0))
        .collect();
    let grids = GRID_LADDER
        .iter()
        .map(|&(np, na)| build_grid(np, na))
        .collect::<Result<Vec<_>>>()?;
    let table: Vec<Vec<f64>> = grids
        .iter()
        .map(|g| {
            sweep
                .iter()
                .map(|d| sigma_tot(&evaluator, d, g, BornOrder::One))
                .collect()
        })
        .collect();
    let change = table
        .windows(2)
        .flat_map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| relative_change(*a, *b)))
        .fold(0.0, f64::max);
    let finest = &table[table.len() - 1];
    let bound = finest.iter().copied().fold(0.0, f64::max);
    let finite = table.iter().flatten().all(|v| v.is_finite());
    Ok(CheckOutcome::new(
        Check::TotalCrossSection,
        change <= THRESHOLD && finite,
        change,
        THRESHOLD,
        format!("sup over sweep {bound:.6e} at the finest grid"),
    ))
}

/// The 2-D comparison: two-point spectrum for constant flux, the backward
/// cross-section, the 1/θ_min divergence of the truncated total, and
/// its vanishing at integer flux quanta.
pub fn check_aharonov_bohm_contrast(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1e-12;
    let flux_3d = ctx.potential.flux();
    let flux = if half_turns_are_integer(flux_3d) { PI } else { flux_3d };
    let cloud = ab_spectrum(&AbProfile::constant(flux), 64)?;
    let expected = [
        Complex64::from_polar(1.0, -flux / 2.0),
        Complex64::from_polar(1.0, flux / 2.0),
    ];
    let spectrum_error = if cloud.len() == 2 {
        cloud
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let backward_error = (ab_sigma_diff(PI, 1.0, PI)? - 1.0 / (2.0 * PI)).abs();
    let mut ratios = Vec::new();
    for theta_min in [1e-2, 1e-3] {
        ratios.push(
            ab_total_truncated(theta_min / 2.0, ctx.shell.lambda(), flux)?
                / ab_total_truncated(theta_min, ctx.shell.lambda(), flux)?,
        );
    }
    let quantum = ab_total_truncated(1e-3, ctx.shell.lambda(), 2.0 * PI)?;
    let metric = spectrum_error.max(backward_error);
    let ratios_ok = ratios.iter().all(|r| (1.8..=2.2).contains(r));
    Ok(CheckOutcome::new(
        Check::AharonovBohmContrast,
        metric <= THRESHOLD && ratios_ok && quantum == 0.0,
        metric,
        THRESHOLD,
        format!("flux {flux:.6}, divergence ratios {ratios:?}, total at 2pi flux {quantum}"),
    ))
}

fn half_turns_are_integer(flux: f64) -> bool {
    let turns = flux / (2.0 * PI);
    (turns - turns.round()).abs() < 1e-12
}

/// Unitarity defect of the first-Born matrix on 16×32 for peak amplitudes
/// 0.4, 0.2, 0.1 of the configured profile shape: strictly decreasing.
pub fn check_born_trend(ctx: &VerifyContext) -> Result<CheckOutcome> {
    const THRESHOLD: f64 = 1.0;
    let shape = ctx.active_profile();
    let peak = shape.max_value();
    let grid = build_grid(16, 32)?;
    let mut defects = Vec::new();
    for c in [0.4, 0.2, 0.1] {
        let potential = ctx.with_profile(shape.scaled(c / peak)?)?;
        let evaluator = KernelEvaluator::new(&potential, ctx.shell)?;
        defects.push(
            assemble_parts(&evaluator, &grid, BornOrder::One)
                .total()
                .unitarity_defect(),
        );
    }
    let worst_ratio = defects.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    Ok(CheckOutcome::new(
        Check::BornTrend,
        worst_ratio < THRESHOLD,
        worst_ratio,
        THRESHOLD,
        format!(
            "defects [{}] at peak amplitudes [0.4, 0.2, 0.1]",
            defects
                .iter()
                .map(|d| format!("{d:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}

const THRESHOLDS: [f64; 12] = [1e-14, 1e-6, 1e-6, 1e-6, 1e-12, 0.3, 1e-3, 0.9, 0.05, 0.01, 1e-12, 1.0];

/// Run one check; computation errors become failed outcomes.
pub fn run_check(ctx: &VerifyContext, check: Check) -> CheckOutcome {
    let result = match check {
        Check::Gauge => check_gauge(ctx),
        Check::EikonalGradient => check_eikonal_gradient(ctx),
        Check::PhaseOracle => check_phase_oracle(ctx),
        Check::ThetaInvariance => check_theta_invariance(ctx),
        Check::WEndpoints => check_w_endpoints(ctx),
        Check::SymbolHamiltonian => check_symbol_hamiltonian(ctx),
        Check::ZeroFieldCancellation => check_zero_field_cancellation(ctx),
        Check::ArcAccumulation => check_arc_accumulation(ctx),
        Check::HilbertSchmidt => check_hilbert_schmidt(ctx),
        Check::TotalCrossSection => check_total_cross_section(ctx),
        Check::AharonovBohmContrast => check_aharonov_bohm_contrast(ctx),
        Check::BornTrend => check_born_trend(ctx),
    };
    result.unwrap_or_else(|e| CheckOutcome::failed(check, THRESHOLDS[check as usize], &e))
}

/// Outcomes of the whole suite, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_all(ctx: &VerifyContext) -> VerifyReport {
    VerifyReport {
        checks: Check::ALL.iter().map(|&c| run_check(ctx, c)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> VerifyContext {
        VerifyContext::from_config(&RunConfig::default()).unwrap()
    }

    #[test]
    fn fast_checks_pass_on_defaults() {
        for check in [Check::Gauge, Check::WEndpoints, Check::AharonovBohmContrast] {
            let out = run_check(&ctx(), check);
            assert!(out.passed, "{out:?}");
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = run_check(&ctx(), Check::PhaseOracle);
        let b = run_check(&ctx(), Check::PhaseOracle);
        assert_eq!(a, b);
    }

    #[test]
    fn failures_carry_the_error() {
        let out = CheckOutcome::new(Check::ArcAccumulation, true, f64::NAN, 0.9, String::new());
        assert!(!out.passed && out.metric.is_none());
        let err = CheckOutcome::failed(Check::Gauge, 1e-14, &Error::Coincident);
        assert!(!err.passed && err.detail.contains("coincident"));
    }

    #[test]
    fn thresholds_table_is_aligned() {
        let c = ctx();
        for check in [Check::Gauge, Check::WEndpoints, Check::AharonovBohmContrast] {
            assert_eq!(run_check(&c, check).threshold, THRESHOLDS[check as usize]);
        }
    }
}
