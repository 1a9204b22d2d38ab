//! Eikonal phases Φ±(x, ξ), the phase difference Θ(ξ), the multiplier
//! w(ω) = exp(iΘ(ω)), and the arc of the unit circle carrying the essential
//! spectrum of the scattering matrix.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::geometry::{colatitude, Direction, Vec3};
use crate::potential::{vector_potential, PotentialConfig};
use crate::profile::ProfileFunction;
use crate::quadrature::integrate;

/// Which asymptotic end of the classical ray the phase is anchored at:
/// `Plus` integrates in from s = +∞, `Minus` from s = -∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A position x and a nonzero momentum ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: Vec3,
    pub xi: Vec3,
}

impl PhasePoint {
    pub fn new(x: Vec3, xi: Vec3) -> Result<Self> {
        if x.norm() == 0.0 || xi.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { x, xi })
    }

    /// The unit momentum direction ω = ξ/|ξ|.
    pub fn direction(&self) -> Vec3 {
        self.xi / self.xi.norm()
    }

    /// Decomposition x = b + s₀ω with ⟨b, ω⟩ = 0, returned as (b, s₀).
    pub fn impact(&self) -> (Vec3, f64) {
        let w = self.direction();
        let s0 = self.x.dot(&w);
        (self.x - w * s0, s0)
    }
}

fn check_radius(cfg: &PotentialConfig, x: &Vec3) -> Result<()> {
    let r = x.norm();
    if r < cfg.radius() {
        Err(domain("|x|", r, "[R, inf)"))
    } else {
        Ok(())
    }
}

/// Φ±(x, ξ): the integral of the profile from the colatitude of ±ξ to that of x.
pub fn phase(cfg: &PotentialConfig, p: &PhasePoint, sign: Sign) -> Result<f64> {
    check_radius(cfg, &p.x)?;
    let phi_x = colatitude(&p.x)?;
    let phi_xi = colatitude(&(p.xi * sign.factor()))?;
    cfg.profile().integrate(phi_xi, phi_x)
}

/// Result of the ray-integral evaluation of a phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    /// Truncated integral plus the tail beyond `s_max`.
    pub value: f64,
    /// Integral over the finite segment between `±s_max` and s₀ only.
    pub truncated: f64,
    /// Contribution of the ray beyond `s_max`.
    pub tail: f64,
    pub abs_error: f64,
}

const LINE_TOL: f64 = 1e-12;

/// Φ± as the integral of ⟨A, ω⟩ along the straight ray b + sω, from the
/// asymptotic end selected by `sign` to s₀.
pub fn line_integral_phase(cfg: &PotentialConfig, p: &PhasePoint, sign: Sign, s_max: f64) -> Result<LineIntegral> {
    check_radius(cfg, &p.x)?;
    let (b, s0) = p.impact();
    if !(s_max >= p.x.norm()) {
        return Err(domain("s_max", s_max, "[|x|, inf)"));
    }
    let w = p.direction();
    let end = sign.factor() * s_max;
    // closest approach to the origin is at s = 0
    if b.norm() < cfg.radius() && (s0.min(end)..=s0.max(end)).contains(&0.0) {
        return Err(Error::RayInsideBall { radius: cfg.radius() });
    }
    let integrand = |s: f64| -> f64 {
        let y = b + w * s;
        vector_potential(cfg, &y).map_or(0.0, |a| a.dot(&w))
    };
    let cuts = ray_breakpoints(cfg.profile(), &b, &w);

    // finite part from `end` to s₀
    let (lo, hi) = (s0.min(end), s0.max(end));
    let mut pieces = vec![lo];
    pieces.extend(cuts.iter().copied().filter(|&c| c > lo && c < hi));
    pieces.push(hi);
    let mut truncated = 0.0;
    let mut err = 0.0;
    for piece in pieces.windows(2) {
        let q = integrate(integrand, piece[0], piece[1], LINE_TOL);
        truncated += q.value;
        err += q.abs_error_estimate;
    }
    // integrand integrated from `end` towards s₀
    if end > s0 {
        truncated = -truncated;
    }

    // tail over |s| > s_max, mapped to t ∈ [0, 1) by |s| = s_max + t/(1 - t)
    let dir = sign.factor();
    let mapped = |t: f64| -> f64 {
        if t >= 1.0 {
            return 0.0;
        }
        let s = s_max + t / (1.0 - t);
        integrand(dir * s) / ((1.0 - t) * (1.0 - t))
    };
    let mut tcuts = vec![0.0];
    let mut inner: Vec<f64> = cuts
        .iter()
        .map(|c| dir * c)
        .filter(|&s| s > s_max)
        .map(|s| (s - s_max) / (1.0 + s - s_max))
        .collect();
    inner.sort_by(f64::total_cmp);
    tcuts.extend(inner);
    tcuts.push(1.0);
    let mut tail_abs = 0.0;
    for piece in tcuts.windows(2) {
        let q = integrate(mapped, piece[0], piece[1], LINE_TOL);
        tail_abs += q.value;
        err += q.abs_error_estimate;
    }
    // Plus: ∫_{+∞}^{s_max} = -∫_{s_max}^{∞};  Minus: ∫_{-∞}^{-s_max} = ∫_{s_max}^{∞} f(-s) ds
    let tail = -dir * tail_abs;
    Ok(LineIntegral {
        value: truncated + tail,
        truncated,
        tail,
        abs_error: err,
    })
}

// Ray parameters where the colatitude of b + sω crosses a support endpoint,
// attains its extremum, or comes closest to the x₃-axis.
fn ray_breakpoints(profile: &ProfileFunction, b: &Vec3, w: &Vec3) -> Vec<f64> {
    let mut cuts = Vec::new();
    let bb = b.norm_squared();
    if let Some((lo, hi)) = profile.support() {
        for edge in [lo, hi] {
            let c = edge.cos();
            // (b₃ + sω₃)² = c²(|b|² + s²), keeping roots with the sign of c
            let qa = w[2] * w[2] - c * c;
            let qb = 2.0 * b[2] * w[2];
            let qc = b[2] * b[2] - c * c * bb;
            let mut roots = Vec::new();
            if qa.abs() < 1e-14 {
                if qb != 0.0 {
                    roots.push(-qc / qb);
                }
            } else {
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    roots.push((-qb - sq) / (2.0 * qa));
                    roots.push((-qb + sq) / (2.0 * qa));
                }
            }
            cuts.extend(
                roots
                    .into_iter()
                    .filter(|&s| s.is_finite() && (b[2] + s * w[2]) * c >= 0.0),
            );
        }
    }
    if b[2] != 0.0 {
        cuts.push(w[2] * bb / b[2]);
    }
    let wu = w[0] * w[0] + w[1] * w[1];
    if wu > 0.0 {
        cuts.push(-(b[0] * w[0] + b[1] * w[1]) / wu);
    }
    cuts.retain(|s| s.is_finite());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// Central-difference gradient of Φ± in x with step h.
pub fn grad_phase_fd(cfg: &PotentialConfig, p: &PhasePoint, sign: Sign, h: f64) -> Result<Vec3> {
    if !(h > 0.0) {
        return Err(domain("h", h, "(0, inf)"));
    }
    if p.x.norm() < cfg.radius() + 2.0 * h {
        return Err(Error::Stencil { radius: cfg.radius() });
    }
    let mut g = Vec3::zeros();
    for j in 0..3 {
        let mut e = Vec3::zeros();
        e[j] = h;
        let fwd = phase(cfg, &PhasePoint { x: p.x + e, ..*p }, sign)?;
        let bwd = phase(cfg, &PhasePoint { x: p.x - e, ..*p }, sign)?;
        g[j] = (fwd - bwd) / (2.0 * h);
    }
    Ok(g)
}

/// Θ(ξ) = Φ₋ - Φ₊, the integral of the profile from the colatitude of -ξ to
/// that of ξ. Independent of x.
pub fn theta(profile: &ProfileFunction, xi: &Vec3) -> Result<f64> {
    let phi = colatitude(xi)?;
    Ok(profile.integral_unchecked(PI - phi, phi))
}

/// w(ω) = exp(iΘ(ω)).
pub fn w_function(profile: &ProfileFunction, omega: &Direction) -> Complex64 {
    let phi = omega.colatitude();
    Complex64::from_polar(1.0, profile.integral_unchecked(PI - phi, phi))
}

/// The arc {e^{iν} : |ν| ≤ flux} of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralArc {
    flux: f64,
}

impl SpectralArc {
    pub fn flux(&self) -> f64 {
        self.flux
    }

    pub fn is_full_circle(&self) -> bool {
        self.flux >= PI
    }

    /// The endpoints e^{-i flux} and e^{+i flux}.
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        let f = self.flux.min(PI);
        (Complex64::from_polar(1.0, -f), Complex64::from_polar(1.0, f))
    }

    /// Euclidean distance from z to the arc.
    pub fn distance(&self, z: Complex64) -> f64 {
        if self.is_full_circle() || z.arg().abs() <= self.flux {
            return (z.norm() - 1.0).abs();
        }
        let (lo, hi) = self.endpoints();
        (z - lo).norm().min((z - hi).norm())
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z) <= tol
    }
}

/// The arc for the given flux (flux ≥ 0).
pub fn essential_arc(flux: f64) -> Result<SpectralArc> {
    if !(flux >= 0.0) || !flux.is_finite() {
        return Err(domain("flux", flux, "[0, inf)"));
    }
    Ok(SpectralArc { flux })
}
