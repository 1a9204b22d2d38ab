//! The two-dimensional Aharonov–Bohm comparison: spectrum of the scattering
//! matrix from f(θ) = ∫_θ^{θ+π} a, the forward-peaked differential
//! cross-section, and the divergence of its truncated total.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::integrate;

/// A 2π-periodic angular profile a(θ) = mean + Σₙ (cₙ cos nθ + sₙ sin nθ).
#[derive(Debug, Clone, PartialEq)]
pub struct AbProfile {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl AbProfile {
    /// Constant profile carrying the given flux.
    pub fn constant(flux: f64) -> Self {
        Self {
            mean: flux / (2.0 * PI),
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    /// Truncated Fourier series; `cos[n-1]` and `sin[n-1]` multiply the
    /// harmonics of order n.
    pub fn fourier(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if !mean.is_finite() || cos.iter().chain(&sin).any(|v| !v.is_finite()) {
            return Err(Error::Profile("non-finite Fourier coefficient".into()));
        }
        Ok(Self { mean, cos, sin })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let harmonics: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(n, c)| c * ((n + 1) as f64 * theta).cos())
            .chain(
                self.sin
                    .iter()
                    .enumerate()
                    .map(|(n, s)| s * ((n + 1) as f64 * theta).sin()),
            )
            .sum();
        self.mean + harmonics
    }

    pub fn is_constant(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&v| v == 0.0)
    }

    /// φ_AB = ∫₀^{2π} a.
    pub fn flux(&self) -> f64 {
        integrate(|t| self.eval(t), 0.0, 2.0 * PI, 1e-13).value
    }
}

/// f(θ) = ∫_θ^{θ+π} a.
pub fn f_function(p: &AbProfile, theta: f64) -> f64 {
    integrate(|t| p.eval(t), theta, theta + PI, 1e-13).value
}

/// The sampled spectrum cloud {e^{±i f(θ_j)}} on the unit circle, with
/// points closer than 1e-13 merged. Sorted by argument.
pub fn ab_spectrum(p: &AbProfile, n_samples: usize) -> Result<Vec<Complex64>> {
    if n_samples < 16 {
        return Err(Error::GridSize(format!("n_samples = {n_samples} (min 16)")));
    }
    let values: Vec<f64> = if p.is_constant() {
        vec![PI * p.mean]
    } else {
        (0..n_samples)
            .map(|j| f_function(p, 2.0 * PI * j as f64 / n_samples as f64))
            .collect()
    };
    let mut cloud: Vec<Complex64> = values
        .iter()
        .flat_map(|&f| [Complex64::from_polar(1.0, f), Complex64::from_polar(1.0, -f)])
        .collect();
    cloud.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    cloud.dedup_by(|a, b| (*a - *b).norm() < 1e-13);
    Ok(cloud)
}

/// (1/(2π√λ)) · sin²(φ_AB/2) / sin²(θ/2) for θ ∈ (0, π]. Exact for constant
/// profiles; the leading small-angle term otherwise.
pub fn ab_sigma_diff(theta: f64, lambda: f64, flux: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(domain("theta", theta, "(0, pi]"));
    }
    if !(lambda > 0.0) {
        return Err(domain("lambda", lambda, "(0, inf)"));
    }
    let s = half_flux_sine(flux);
    let h = (theta / 2.0).sin();
    Ok(s * s / (h * h) / (2.0 * PI * lambda.sqrt()))
}

// sin(φ_AB/2), exactly zero for integer multiples of 2π
fn half_flux_sine(flux: f64) -> f64 {
    let turns = flux / (2.0 * PI);
    if turns == turns.round() {
        0.0
    } else {
        (flux / 2.0).sin()
    }
}

/// 2 ∫_{θ_min}^{π} Σ_diff dθ, counting both signs of the scattering angle.
pub fn ab_total_truncated(theta_min: f64, lambda: f64, flux: f64) -> Result<f64> {
    if !(theta_min > 0.0 && theta_min < PI) {
        return Err(domain("theta_min", theta_min, "(0, pi)"));
    }
    ab_sigma_diff(PI, lambda, flux)?;
    let scale = ab_sigma_diff(theta_min, lambda, flux)? * theta_min;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let q = integrate(
        |t| ab_sigma_diff(t, lambda, flux).unwrap_or(0.0),
        theta_min,
        PI,
        1e-13 * scale,
    );
    Ok(2.0 * q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn f_of_constant_profile() {
        let p = AbProfile::constant(1.3);
        for t in [0.0, 0.7, 4.0] {
            assert_abs_diff_eq!(f_function(&p, t), 0.65, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(p.flux(), 1.3, epsilon = 1e-13);
    }

    #[test]
    fn f_with_cosine_term_matches_antiderivative() {
        let flux = 2.2;
        let p = AbProfile::fourier(flux / (2.0 * PI), vec![1.0], vec![]).unwrap();
        for t in [0.0, 0.4, 1.9, 3.3, 5.5] {
            assert_abs_diff_eq!(f_function(&p, t), flux / 2.0 - 2.0 * t.sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(f_function(&p, t) + f_function(&p, t + PI), flux, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectrum_of_constant_profile_is_two_points() {
        let flux = 2.0;
        let cloud = ab_spectrum(&AbProfile::constant(flux), 64).unwrap();
        assert_eq!(cloud.len(), 2);
        assert!((cloud[0] - Complex64::from_polar(1.0, -1.0)).norm() < 1e-12);
        assert!((cloud[1] - Complex64::from_polar(1.0, 1.0)).norm() < 1e-12);
        assert_eq!(
            ab_spectrum(&AbProfile::constant(0.0), 32).unwrap(),
            vec![Complex64::new(1.0, 0.0)]
        );
        assert!(ab_spectrum(&AbProfile::constant(1.0), 8).is_err());
    }

    #[test]
    fn spectrum_cloud_is_conjugation_symmetric() {
        let p = AbProfile::fourier(0.3, vec![0.2, -0.1], vec![0.05]).unwrap();
        let cloud = ab_spectrum(&p, 128).unwrap();
        for z in &cloud {
            assert!((z.norm() - 1.0).abs() < 1e-15);
            assert!(cloud.iter().any(|w| (w - z.conj()).norm() < 1e-12));
        }
    }

    #[test]
    fn differential_cross_section_values() {
        assert_abs_diff_eq!(ab_sigma_diff(PI, 1.0, PI).unwrap(), 1.0 / (2.0 * PI), epsilon = 1e-12);
        assert_abs_diff_eq!(ab_sigma_diff(0.3, 2.0, 2.0 * PI).unwrap(), 0.0, epsilon = 1e-30);
        let r = ab_sigma_diff(5e-4, 1.0, 1.0).unwrap() / ab_sigma_diff(1e-3, 1.0, 1.0).unwrap();
        assert!((r - 4.0).abs() < 0.04);
        assert!(ab_sigma_diff(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn truncated_total_matches_cotangent_antiderivative() {
        for tmin in [0.5, 1e-2, 1e-3] {
            let v = ab_total_truncated(tmin, 1.0, PI).unwrap();
            let exact = 2.0 / PI / (tmin / 2.0).tan();
            assert!((v - exact).abs() <= 1e-9 * exact, "{tmin}: {v} {exact}");
        }
        assert_eq!(ab_total_truncated(1e-3, 1.0, 2.0 * PI).unwrap(), 0.0);
        for tmin in [1e-2, 1e-3] {
            let r = ab_total_truncated(tmin / 2.0, 1.0, 1.0).unwrap() / ab_total_truncated(tmin, 1.0, 1.0).unwrap();
            assert!((1.8..=2.2).contains(&r));
        }
    }
}
