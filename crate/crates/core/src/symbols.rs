//! Cutoffs η (space) and ψ (momentum), the identification symbols
//! j± = e^{iΦ±} η ψ, the effective perturbation t± they generate, and a
//! finite-difference evaluation of the magnetic Hamiltonian that checks t±.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::eikonal::{phase, PhasePoint, Sign};
use crate::error::{domain, Error, Result};
use crate::geometry::Vec3;
use crate::potential::{vector_potential, PotentialConfig};
use crate::quadrature::integrate;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

fn bump_derivative(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - u * u;
    bump(u) * (-2.0 * u / (q * q))
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| integrate(bump, -1.0, 1.0, 1e-15).value)
}

/// Smooth step rising from 0 at t ≤ 0 to 1 at t ≥ 1, built as the normalized
/// running integral of the standard bump. Returns the value and first two
/// derivatives.
pub fn smoothstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let k = bump_mass();
    let u = 2.0 * t - 1.0;
    // integrate over the shorter side for accuracy
    let value = if u <= 0.0 {
        integrate(bump, -1.0, u, 1e-16).value / k
    } else {
        1.0 - integrate(bump, u, 1.0, 1e-16).value / k
    };
    (value, 2.0 * bump(u) / k, 4.0 * bump_derivative(u) / k)
}

/// η(x): 0 for |x| ≤ R, 1 for |x| ≥ R + 1, radial smooth step between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffEta {
    radius: f64,
}

/// Radial derivatives of η at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaDerivatives {
    pub gradient: Vec3,
    pub laplacian: f64,
}

impl CutoffEta {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain("R", radius, "(0, inf)"));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// η and its first two derivatives as functions of r = |x|.
    pub fn radial(&self, r: f64) -> (f64, f64, f64) {
        smoothstep(r - self.radius)
    }

    pub fn eval(&self, x: &Vec3) -> f64 {
        self.radial(x.norm()).0
    }

    pub fn derivatives(&self, x: &Vec3) -> EtaDerivatives {
        let r = x.norm();
        let (_, d1, d2) = self.radial(r);
        if d1 == 0.0 && d2 == 0.0 {
            return EtaDerivatives {
                gradient: Vec3::zeros(),
                laplacian: 0.0,
            };
        }
        EtaDerivatives {
            gradient: x * (d1 / r),
            laplacian: d2 + 2.0 * d1 / r,
        }
    }
}

/// ψ(ξ): 1 when ||ξ| - k₀| ≤ r, 0 when ||ξ| - k₀| ≥ 2r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPsi {
    k0: f64,
    half_width: f64,
}

impl CutoffPsi {
    /// Shell around k₀ with the default half-width k₀/4.
    pub fn new(k0: f64) -> Result<Self> {
        Self::with_half_width(k0, k0 / 4.0)
    }

    pub fn with_half_width(k0: f64, half_width: f64) -> Result<Self> {
        if !(k0 > 0.0) || !k0.is_finite() {
            return Err(domain("k0", k0, "(0, inf)"));
        }
        if !(half_width > 0.0) || !(2.0 * half_width < k0) {
            return Err(domain("half_width", half_width, "(0, k0/2)"));
        }
        Ok(Self { k0, half_width })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn eval(&self, xi: &Vec3) -> f64 {
        let d = (xi.norm() - self.k0).abs();
        1.0 - smoothstep((d - self.half_width) / self.half_width).0
    }
}

/// A symbol value with a flag telling whether the point lies in the open
/// support of the symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub value: Complex64,
    pub support_flag: bool,
}

/// Everything needed to evaluate j± and t±.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbols {
    potential: PotentialConfig,
    eta: CutoffEta,
    psi: CutoffPsi,
}

impl Symbols {
    pub fn new(potential: PotentialConfig, k0: f64) -> Result<Self> {
        let eta = CutoffEta::new(potential.radius())?;
        let psi = CutoffPsi::new(k0)?;
        Ok(Self { potential, eta, psi })
    }

    pub fn with_cutoffs(potential: PotentialConfig, eta: CutoffEta, psi: CutoffPsi) -> Self {
        Self { potential, eta, psi }
    }

    pub fn potential(&self) -> &PotentialConfig {
        &self.potential
    }

    pub fn eta(&self) -> &CutoffEta {
        &self.eta
    }

    pub fn psi(&self) -> &CutoffPsi {
        &self.psi
    }

    fn eikonal_factor(&self, x: &Vec3, xi: &Vec3, sign: Sign) -> Result<Complex64> {
        let p = PhasePoint::new(*x, *xi)?;
        Ok(Complex64::from_polar(1.0, phase(&self.potential, &p, sign)?))
    }

    /// j±(x, ξ) = e^{iΦ±} η(x) ψ(ξ); zero inside the ball.
    pub fn symbol_j(&self, x: &Vec3, xi: &Vec3, sign: Sign) -> Result<SymbolValue> {
        if xi.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let weight = self.eta.eval(x) * self.psi.eval(xi);
        if weight == 0.0 {
            return Ok(SymbolValue {
                value: Complex64::new(0.0, 0.0),
                support_flag: false,
            });
        }
        Ok(SymbolValue {
            value: self.eikonal_factor(x, xi, sign)? * weight,
            support_flag: true,
        })
    }

    /// t±(x, ξ) = e^{iΦ±} (-2i⟨ξ, ∇η⟩ - Δη) ψ(ξ).
    pub fn symbol_t(&self, x: &Vec3, xi: &Vec3, sign: Sign) -> Result<SymbolValue> {
        if xi.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let d = self.eta.derivatives(x);
        let psi = self.psi.eval(xi);
        let inside = d.gradient != Vec3::zeros() || d.laplacian != 0.0;
        if !inside || psi == 0.0 {
            return Ok(SymbolValue {
                value: Complex64::new(0.0, 0.0),
                support_flag: false,
            });
        }
        let amplitude = Complex64::new(-d.laplacian, -2.0 * xi.dot(&d.gradient)) * psi;
        Ok(SymbolValue {
            value: self.eikonal_factor(x, xi, sign)? * amplitude,
            support_flag: true,
        })
    }

    /// e^{-i⟨x,ξ⟩} (H - |ξ|²)[e^{i⟨·,ξ⟩} j±(·, ξ)](x) with H = (D - A)², D = -i∇,
    /// by nested second-order central differences of step h.
    pub fn hamiltonian_residual_oracle(&self, x: &Vec3, xi: &Vec3, sign: Sign, h: f64) -> Result<Complex64> {
        if !(h > 0.0) {
            return Err(domain("h", h, "(0, inf)"));
        }
        if x.norm() < self.potential.radius() + 2.0 * h {
            return Err(Error::Stencil {
                radius: self.potential.radius(),
            });
        }
        let wave = |y: &Vec3| -> Result<Complex64> {
            let j = self.symbol_j(y, xi, sign)?.value;
            Ok(j * Complex64::from_polar(1.0, y.dot(xi)))
        };
        // (D - A)_j applied to the wave at y, along axis j
        let covariant = |y: &Vec3, j: usize| -> Result<Complex64> {
            let mut e = Vec3::zeros();
            e[j] = h;
            let dv = (wave(&(y + e))? - wave(&(y - e))?) / (2.0 * h);
            let a = vector_potential(&self.potential, y)?[j];
            Ok(-I * dv - wave(y)? * a)
        };
        let a = vector_potential(&self.potential, x)?;
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..3 {
            let mut e = Vec3::zeros();
            e[j] = h;
            let dw = (covariant(&(x + e), j)? - covariant(&(x - e), j)?) / (2.0 * h);
            total += -I * dw - covariant(x, j)? * a[j];
        }
        total -= wave(x)? * xi.norm_squared();
        Ok(total * Complex64::from_polar(1.0, -x.dot(xi)))
    }
}
