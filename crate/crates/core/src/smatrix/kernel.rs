//! Kernel evaluation for the scattering-matrix remainder S - 𝒲.
//!
//! Both kernels factor as e^{iP(φ_ω)} · k(ω, ω′) · e^{-iP(π - φ_ω′)}, where P
//! is the antiderivative of the profile. The first kernel reduces to a radial
//! integral. The Born term is evaluated by expanding the source field
//!
//!   G(x; ω) = e^{iP(φ_x)} (-2ik ⟨ω, x̂⟩ η′(r) - Δη(r)) e^{ik⟨ω, x⟩}
//!
//! in spherical harmonics over the shell R ≤ |x| ≤ R + 1 and applying the
//! partial-wave form of the outgoing Helmholtz Green function degree by
//! degree.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Error, Result};
use crate::geometry::{Direction, SphereGrid, Vec3};
use crate::potential::PotentialConfig;
use crate::profile::ProfileFunction;
use crate::quadrature::{gauss_legendre, gauss_legendre_on, ChebyshevRule};
use crate::special::{spherical_j, spherical_y, LegendreTable};
use crate::symbols::CutoffEta;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Energy λ > 0 and momentum k = √λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyShell {
    lambda: f64,
    k: f64,
}

impl EnergyShell {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(domain("lambda", lambda, "(0, inf)"));
        }
        Ok(Self {
            lambda,
            k: lambda.sqrt(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// The outgoing free Green function e^{ik|x-y|} / (4π|x-y|).
pub fn free_resolvent_kernel(x: &Vec3, y: &Vec3, shell: &EnergyShell) -> Result<Complex64> {
    let d = (x - y).norm();
    if d == 0.0 {
        return Err(Error::Coincident);
    }
    Ok(Complex64::from_polar(1.0 / (4.0 * PI * d), shell.k * d))
}

/// Discretization parameters of the shell integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShellResolution {
    /// Chebyshev–Lobatto nodes across the shell thickness.
    pub radial_nodes: usize,
    /// Gauss nodes on each side of the Green-function kink.
    pub segment_nodes: usize,
    /// Highest spherical-harmonic degree kept.
    pub max_degree: usize,
    /// Gauss nodes in cos φ on the shell sphere.
    pub polar_nodes: usize,
    /// Uniform azimuth nodes on the shell sphere.
    pub azimuth_nodes: usize,
}

impl ShellResolution {
    /// Default resolution for the given shell and inner radius.
    pub fn standard(shell: &EnergyShell, radius: f64) -> Self {
        let kr = (shell.k * (radius + 1.0)).ceil() as usize;
        let max_degree = 32 + 2 * kr;
        let polar_nodes = max_degree + 16;
        Self {
            radial_nodes: 48 + 4 * shell.k.ceil() as usize,
            segment_nodes: 32 + 2 * shell.k.ceil() as usize,
            max_degree,
            polar_nodes,
            azimuth_nodes: 2 * polar_nodes,
        }
    }

    /// Every parameter increased by about half.
    pub fn refined(&self) -> Self {
        let up = |n: usize| n + n.div_ceil(2);
        Self {
            radial_nodes: up(self.radial_nodes),
            segment_nodes: up(self.segment_nodes),
            max_degree: up(self.max_degree),
            polar_nodes: up(self.polar_nodes),
            azimuth_nodes: up(self.azimuth_nodes),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 || self.segment_nodes < 4 || self.polar_nodes <= self.max_degree {
            return Err(Error::GridSize(format!("unusable shell resolution {self:?}")));
        }
        if self.azimuth_nodes <= 2 * self.max_degree {
            return Err(Error::GridSize(format!(
                "azimuth_nodes = {} must exceed twice max_degree = {}",
                self.azimuth_nodes, self.max_degree
            )));
        }
        Ok(())
    }
}

/// Spherical-harmonic coefficients of a field on the shell: one row per
/// radial node, one column per (l, m) at index l² + l + m.
#[derive(Debug, Clone)]
pub struct Harmonics {
    coeffs: DMatrix<Complex64>,
}

impl Harmonics {
    /// Coefficient of degree l and order m at radial node `radial`.
    pub fn coefficient(&self, radial: usize, l: usize, m: i64) -> Complex64 {
        self.coeffs[(radial, lm_index(l, m))]
    }
}

fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Evaluates s₁ and the first Born s₂ for a fixed potential and energy.
pub struct KernelEvaluator {
    profile: ProfileFunction,
    radius: f64,
    shell: EnergyShell,
    resolution: ShellResolution,
    radial: ChebyshevRule,
    // per radial node: W_i r_i², η′(r_i), Δη(r_i)
    radial_measure: Vec<f64>,
    eta_slope: Vec<f64>,
    eta_laplacian: Vec<f64>,
    polar_cos: Vec<f64>,
    polar_sin: Vec<f64>,
    polar_weights: Vec<f64>,
    polar_phase: Vec<Complex64>,
    legendre: Vec<LegendreTable>,
    // ik ∫ g_l(r_i, ρ) E_q(ρ) ρ² dρ for each degree l
    resolvent: Vec<DMatrix<Complex64>>,
    // radial rule for the closed-form first kernel: (r, -η Δη r² w, η η′ r² w)
    first_kernel_rule: Vec<(f64, f64, f64)>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for KernelEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelEvaluator")
            .field("radius", &self.radius)
            .field("shell", &self.shell)
            .field("resolution", &self.resolution)
            .finish_non_exhaustive()
    }
}

impl KernelEvaluator {
    pub fn new(potential: &PotentialConfig, shell: EnergyShell) -> Result<Self> {
        let resolution = ShellResolution::standard(&shell, potential.radius());
        Self::with_resolution(potential, shell, resolution)
    }

    pub fn with_resolution(
        potential: &PotentialConfig,
        shell: EnergyShell,
        resolution: ShellResolution,
    ) -> Result<Self> {
        resolution.validate()?;
        let radius = potential.radius();
        let profile = potential.profile().clone();
        let k = shell.k;
        let eta = CutoffEta::new(radius)?;
        let (lo, hi) = (radius, radius + 1.0);

        let radial = ChebyshevRule::new(resolution.radial_nodes, lo, hi);
        let mut radial_measure = Vec::with_capacity(radial.len());
        let mut eta_slope = Vec::with_capacity(radial.len());
        let mut eta_laplacian = Vec::with_capacity(radial.len());
        for (&r, &w) in radial.nodes.iter().zip(&radial.weights) {
            let (_, d1, d2) = eta.radial(r);
            radial_measure.push(w * r * r);
            eta_slope.push(d1);
            eta_laplacian.push(d2 + 2.0 * d1 / r);
        }

        let (t, wt) = gauss_legendre(resolution.polar_nodes);
        let polar_cos = t.clone();
        let polar_sin: Vec<f64> = t.iter().map(|c| (1.0 - c * c).max(0.0).sqrt()).collect();
        let polar_phase = t
            .iter()
            .map(|c| Complex64::from_polar(1.0, profile.cumulative(c.clamp(-1.0, 1.0).acos())))
            .collect();
        let legendre = t
            .iter()
            .map(|&c| LegendreTable::new(resolution.max_degree, c))
            .collect();

        let resolvent = build_resolvent(&radial, k, resolution);

        let (gt, gw) = gauss_legendre_on(64, lo, hi);
        let first_kernel_rule = gt
            .iter()
            .zip(&gw)
            .map(|(&r, &w)| {
                let (v, d1, d2) = eta.radial(r);
                let lap = d2 + 2.0 * d1 / r;
                (r, -v * lap * r * r * w, v * d1 * r * r * w)
            })
            .collect();

        let fft = FftPlanner::new().plan_fft_forward(resolution.azimuth_nodes);
        Ok(Self {
            profile,
            radius,
            shell,
            resolution,
            radial,
            radial_measure,
            eta_slope,
            eta_laplacian,
            polar_cos,
            polar_sin,
            polar_weights: wt,
            polar_phase,
            legendre,
            resolvent,
            first_kernel_rule,
            fft,
        })
    }

    pub fn shell(&self) -> &EnergyShell {
        &self.shell
    }

    pub fn resolution(&self) -> &ShellResolution {
        &self.resolution
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }

    /// e^{iP(φ_ω)}, the outgoing-side phase.
    pub fn outgoing_phase(&self, omega: &Direction) -> Complex64 {
        Complex64::from_polar(1.0, self.profile.cumulative(omega.colatitude()))
    }

    /// e^{-iP(π - φ_ω′)}, the incoming-side phase.
    pub fn incoming_phase(&self, omega: &Direction) -> Complex64 {
        Complex64::from_polar(1.0, -self.profile.cumulative(PI - omega.colatitude()))
    }

    /// The profile-free part of s₁ as a function of c = ⟨ω, ω′⟩.
    pub fn first_kernel_reduced(&self, cos_angle: f64) -> Complex64 {
        let k = self.shell.k;
        let c = cos_angle.clamp(-1.0, 1.0);
        let q = k * (2.0 - 2.0 * c).sqrt();
        let proj = ((1.0 - c) / 2.0).sqrt();
        let (mut radial0, mut radial1) = (0.0, 0.0);
        for &(r, f0, f1) in &self.first_kernel_rule {
            let (j0, j1) = bessel01(q * r);
            radial0 += f0 * j0;
            radial1 += f1 * j1;
        }
        let bracket = radial0 + 2.0 * k * proj * radial1;
        Complex64::new(0.0, -k / (8.0 * PI * PI)) * (4.0 * PI * bracket)
    }

    /// s₁(ω, ω′).
    pub fn s1(&self, omega: &Direction, omega_in: &Direction) -> Complex64 {
        let c = omega.vector().dot(omega_in.vector());
        self.outgoing_phase(omega) * self.first_kernel_reduced(c) * self.incoming_phase(omega_in)
    }

    /// Born-approximated s₂(ω, ω′), evaluated from the harmonic expansions at
    /// the actual directions (no symmetry reduction).
    pub fn s2_born(&self, omega: &Direction, omega_in: &Direction) -> Complex64 {
        let out = self.harmonics(omega);
        let scattered = self.resolve(&self.harmonics(omega_in));
        let t: Complex64 = self.contract(&out, &scattered).iter().sum();
        self.outgoing_phase(omega) * t * self.incoming_phase(omega_in)
    }

    /// Harmonic coefficients of G(·; ω) on the shell.
    pub fn harmonics(&self, omega: &Direction) -> Harmonics {
        let res = &self.resolution;
        let (n_r, l_max, n_az) = (self.radial.len(), res.max_degree, res.azimuth_nodes);
        let k = self.shell.k;
        let (st, ct) = omega.colatitude().sin_cos();
        let az0 = omega.azimuth();
        let cos_diff: Vec<f64> = (0..n_az)
            .map(|a| (2.0 * PI * a as f64 / n_az as f64 - az0).cos())
            .collect();
        let mut coeffs = DMatrix::<Complex64>::zeros(n_r, (l_max + 1) * (l_max + 1));
        let mut buf = vec![Complex64::new(0.0, 0.0); n_az];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let step = 2.0 * PI / n_az as f64;
        for p in 0..res.polar_nodes {
            let (sp, cp) = (self.polar_sin[p], self.polar_cos[p]);
            let table = &self.legendre[p];
            let wp = self.polar_weights[p] * step;
            for i in 0..n_r {
                let (d1, lap) = (self.eta_slope[i], self.eta_laplacian[i]);
                if d1 == 0.0 && lap == 0.0 {
                    continue;
                }
                let r = self.radial.nodes[i];
                for (slot, cd) in buf.iter_mut().zip(&cos_diff) {
                    let c = st * sp * cd + ct * cp;
                    let amp = Complex64::new(-lap, -2.0 * k * c * d1);
                    *slot = self.polar_phase[p] * amp * Complex64::from_polar(1.0, k * r * c);
                }
                self.fft.process_with_scratch(&mut buf, &mut scratch);
                let mut row = coeffs.row_mut(i);
                for l in 0..=l_max {
                    for m in -(l as i64)..=(l as i64) {
                        let f = buf[m.rem_euclid(n_az as i64) as usize];
                        row[lm_index(l, m)] += f * (wp * table.get(l, m.unsigned_abs() as usize));
                    }
                }
            }
        }
        Harmonics { coeffs }
    }

    /// Harmonic coefficients of the outgoing free resolvent applied to the
    /// field with coefficients `source`.
    pub fn resolve(&self, source: &Harmonics) -> Harmonics {
        let mut out = DMatrix::<Complex64>::zeros(source.coeffs.nrows(), source.coeffs.ncols());
        for (l, m) in self.resolvent.iter().enumerate() {
            let cols = source.coeffs.columns(l * l, 2 * l + 1);
            out.columns_mut(l * l, 2 * l + 1).copy_from(&(m * cols));
        }
        Harmonics { coeffs: out }
    }

    /// Per-order terms T_m, m = -L..=L, of (ik/8π²) ∫ conj(G_out) U dx.
    pub fn contract(&self, out: &Harmonics, scattered: &Harmonics) -> Vec<Complex64> {
        let l_max = self.resolution.max_degree as i64;
        let mut t = vec![Complex64::new(0.0, 0.0); (2 * l_max + 1) as usize];
        for (i, &w) in self.radial_measure.iter().enumerate() {
            if self.eta_slope[i] == 0.0 && self.eta_laplacian[i] == 0.0 {
                continue;
            }
            for l in 0..=l_max {
                for m in -l..=l {
                    let col = lm_index(l as usize, m);
                    t[(m + l_max) as usize] += out.coeffs[(i, col)].conj() * scattered.coeffs[(i, col)] * w;
                }
            }
        }
        let pref = I * (self.shell.k / (8.0 * PI * PI));
        t.iter_mut().for_each(|v| *v *= pref);
        t
    }

    /// Kernel matrices (s₁, s₂) over a product grid, filled by circulant
    /// symmetry in the azimuth difference.
    pub fn grid_kernels(&self, grid: &SphereGrid, born: bool) -> (DMatrix<Complex64>, Option<DMatrix<Complex64>>) {
        let n_p = grid.n_polar();
        let n_a = grid.n_azimuth();
        let rings: Vec<Direction> = grid
            .ring_colatitudes()
            .into_iter()
            .map(|c| Direction::from_angles(c, 0.0))
            .collect();
        let out_phase: Vec<Complex64> = rings.iter().map(|d| self.outgoing_phase(d)).collect();
        let in_phase: Vec<Complex64> = rings.iter().map(|d| self.incoming_phase(d)).collect();

        let mut first = vec![Complex64::new(0.0, 0.0); n_p * n_p * n_a];
        first.par_chunks_mut(n_a).enumerate().for_each(|(pq, chunk)| {
            let (p, q) = (pq / n_p, pq % n_p);
            let (sp, cp) = rings[p].colatitude().sin_cos();
            let (sq, cq) = rings[q].colatitude().sin_cos();
            for (d, v) in chunk.iter_mut().enumerate() {
                let c = cp * cq + sp * sq * (2.0 * PI * d as f64 / n_a as f64).cos();
                *v = out_phase[p] * self.first_kernel_reduced(c) * in_phase[q];
            }
        });

        let second = born.then(|| {
            let harmonics: Vec<Harmonics> = rings.par_iter().map(|d| self.harmonics(d)).collect();
            let scattered: Vec<Harmonics> = harmonics.par_iter().map(|h| self.resolve(h)).collect();
            let l_max = self.resolution.max_degree as i64;
            let mut vals = vec![Complex64::new(0.0, 0.0); n_p * n_p * n_a];
            vals.par_chunks_mut(n_a).enumerate().for_each(|(pq, chunk)| {
                let (p, q) = (pq / n_p, pq % n_p);
                let t = self.contract(&harmonics[p], &scattered[q]);
                for (d, v) in chunk.iter_mut().enumerate() {
                    let delta = 2.0 * PI * d as f64 / n_a as f64;
                    let sum: Complex64 = (-l_max..=l_max)
                        .map(|m| t[(m + l_max) as usize] * Complex64::from_polar(1.0, m as f64 * delta))
                        .sum();
                    *v = out_phase[p] * sum * in_phase[q];
                }
            });
            vals
        });

        let fill = |vals: &[Complex64]| {
            DMatrix::from_fn(n_p * n_a, n_p * n_a, |i, j| {
                let (p, a) = (i / n_a, i % n_a);
                let (q, b) = (j / n_a, j % n_a);
                vals[(p * n_p + q) * n_a + (a + n_a - b) % n_a]
            })
        };
        (fill(&first), second.as_deref().map(fill))
    }

    /// s₁ + s₂ (or s₁ alone) for every grid direction ω against a fixed
    /// incoming direction.
    pub fn grid_column(&self, grid: &SphereGrid, omega_in: &Direction, born: bool) -> Vec<Complex64> {
        let n_a = grid.n_azimuth();
        let l_max = self.resolution.max_degree as i64;
        let in_phase = self.incoming_phase(omega_in);
        let scattered = born.then(|| self.resolve(&self.harmonics(omega_in)));
        let rows: Vec<Vec<Complex64>> = grid
            .ring_colatitudes()
            .into_par_iter()
            .map(|colat| {
                let ring = Direction::from_angles(colat, 0.0);
                let t = scattered.as_ref().map(|u| self.contract(&self.harmonics(&ring), u));
                let out_phase = self.outgoing_phase(&ring);
                (0..n_a)
                    .map(|a| {
                        let az = 2.0 * PI * a as f64 / n_a as f64;
                        let omega = Direction::from_angles(colat, az);
                        let c = omega.vector().dot(omega_in.vector());
                        let mut v = self.first_kernel_reduced(c);
                        if let Some(t) = &t {
                            v += (-l_max..=l_max)
                                .map(|m| t[(m + l_max) as usize] * Complex64::from_polar(1.0, m as f64 * az))
                                .sum::<Complex64>();
                        }
                        out_phase * v * in_phase
                    })
                    .collect()
            })
            .collect();
        rows.concat()
    }
}

// j₀ and j₁, accurate near zero.
fn bessel01(z: f64) -> (f64, f64) {
    if z < 1e-2 {
        let z2 = z * z;
        (
            1.0 - z2 / 6.0 * (1.0 - z2 / 20.0),
            z / 3.0 * (1.0 - z2 / 10.0 * (1.0 - z2 / 28.0)),
        )
    } else {
        let (s, c) = z.sin_cos();
        (s / z, (s / z - c) / z)
    }
}

// Matrices M^l with (M^l Q)(r_i) = ik ∫ j_l(k r<) h_l(k r>) Q(ρ) ρ² dρ for Q
// given by its values at the Chebyshev nodes.
fn build_resolvent(radial: &ChebyshevRule, k: f64, res: ShellResolution) -> Vec<DMatrix<Complex64>> {
    let l_max = res.max_degree;
    let n = radial.len();
    let (lo, hi) = radial.interval();
    let (gt, gw) = gauss_legendre(res.segment_nodes);
    let rows: Vec<Vec<Vec<Complex64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = radial.nodes[i];
            let jr = spherical_j(l_max, k * r);
            let yr = spherical_y(l_max, k * r);
            // inner[l][q] = Σ w ρ² j_l(kρ) E_q(ρ) over [lo, r]; outer likewise with h_l over [r, hi]
            let mut inner = vec![vec![0.0; n]; l_max + 1];
            let mut outer = vec![vec![Complex64::new(0.0, 0.0); n]; l_max + 1];
            for (seg_lo, seg_hi, is_inner) in [(lo, r, true), (r, hi, false)] {
                if seg_hi <= seg_lo {
                    continue;
                }
                let half = 0.5 * (seg_hi - seg_lo);
                let mid = 0.5 * (seg_hi + seg_lo);
                for (&t, &w) in gt.iter().zip(&gw) {
                    let rho = mid + half * t;
                    let weight = w * half * rho * rho;
                    let e = radial.interpolation_row(rho);
                    let jv = spherical_j(l_max, k * rho);
                    if is_inner {
                        for l in 0..=l_max {
                            let f = weight * jv[l];
                            if f == 0.0 {
                                continue;
                            }
                            inner[l].iter_mut().zip(&e).for_each(|(acc, eq)| *acc += f * eq);
                        }
                    } else {
                        let yv = spherical_y(l_max, k * rho);
                        for l in 0..=l_max {
                            let f = Complex64::new(jv[l], yv[l]) * weight;
                            outer[l].iter_mut().zip(&e).for_each(|(acc, eq)| *acc += f * eq);
                        }
                    }
                }
            }
            (0..=l_max)
                .map(|l| {
                    let h = Complex64::new(jr[l], yr[l]);
                    (0..n)
                        .map(|q| {
                            // the product h_l(kr) j_l(kρ) stays bounded; guard overflow of y_l
                            let a = if inner[l][q] == 0.0 || !h.im.is_finite() {
                                Complex64::new(0.0, 0.0)
                            } else {
                                h * inner[l][q]
                            };
                            let b = outer[l][q] * jr[l];
                            let v = I * k * (a + b);
                            if v.re.is_finite() && v.im.is_finite() {
                                v
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (0..=l_max)
        .map(|l| DMatrix::from_fn(n, n, |i, q| rows[i][l][q]))
        .collect()
}
