//! Spherical coordinates, the colatitude frame vector, and product quadrature
//! grids on the unit sphere.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

pub type Vec3 = Vector3<f64>;

/// Colatitude arccos(x₃/|x|) ∈ [0, π].
pub fn colatitude(x: &Vec3) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((x[2] / r).clamp(-1.0, 1.0).acos())
}

/// Unit vector of increasing colatitude at x. Undefined on the x₃-axis.
pub fn e_phi(x: &Vec3) -> Result<Vec3> {
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    let u = x[0].hypot(x[1]);
    if u == 0.0 {
        return Err(Error::OnAxis);
    }
    Ok(Vec3::new(x[0] * x[2] / u, x[1] * x[2] / u, -u) / r)
}

/// A unit vector with cached spherical angles. On the axis the azimuth is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    v: Vec3,
    colatitude: f64,
    azimuth: f64,
}

impl Direction {
    /// Normalizes any nonzero vector.
    pub fn new(v: Vec3) -> Result<Self> {
        let r = v.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::ZeroVector);
        }
        let v = v / r;
        let colatitude = v[2].clamp(-1.0, 1.0).acos();
        let azimuth = if v[0] == 0.0 && v[1] == 0.0 {
            0.0
        } else {
            v[1].atan2(v[0]).rem_euclid(2.0 * PI)
        };
        Ok(Self {
            v,
            colatitude,
            azimuth: if azimuth >= 2.0 * PI { 0.0 } else { azimuth },
        })
    }

    pub fn from_angles(colatitude: f64, azimuth: f64) -> Self {
        let (s, c) = colatitude.sin_cos();
        let v = Vec3::new(s * azimuth.cos(), s * azimuth.sin(), c);
        let on_axis = v[0] == 0.0 && v[1] == 0.0;
        Self {
            v,
            colatitude,
            azimuth: if on_axis { 0.0 } else { azimuth.rem_euclid(2.0 * PI) },
        }
    }

    pub fn north() -> Self {
        Self::from_angles(0.0, 0.0)
    }

    pub fn south() -> Self {
        Self::from_angles(PI, 0.0)
    }

    pub fn vector(&self) -> &Vec3 {
        &self.v
    }

    pub fn colatitude(&self) -> f64 {
        self.colatitude
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    /// The antipodal direction -ω, with colatitude π - φ_ω.
    pub fn antipode(&self) -> Self {
        let azimuth = if self.colatitude == 0.0 || self.colatitude == PI {
            0.0
        } else {
            (self.azimuth + PI).rem_euclid(2.0 * PI)
        };
        Self {
            v: -self.v,
            colatitude: PI - self.colatitude,
            azimuth,
        }
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        self.antipode()
    }
}

/// Product Gauss–Legendre (in cos φ) × uniform azimuth grid on the sphere.
///
/// Nodes are ordered by ascending colatitude ring, then azimuth; node
/// `p * n_azimuth + a` sits on ring `p` at azimuth `2π a / n_azimuth`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    nodes: Vec<Direction>,
    weights: Vec<f64>,
    n_polar: usize,
    n_azimuth: usize,
}

impl SphereGrid {
    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_polar(&self) -> usize {
        self.n_polar
    }

    pub fn n_azimuth(&self) -> usize {
        self.n_azimuth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, ring: usize, step: usize) -> usize {
        ring * self.n_azimuth + step
    }

    /// Colatitude of each ring, ascending.
    pub fn ring_colatitudes(&self) -> Vec<f64> {
        (0..self.n_polar)
            .map(|p| self.nodes[p * self.n_azimuth].colatitude())
            .collect()
    }

    /// Quadrature of a function of direction.
    pub fn integrate(&self, f: impl Fn(&Direction) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(d, w)| w * f(d)).sum()
    }
}

/// Build the product grid; needs `n_polar >= 2` and `n_azimuth >= 4`.
pub fn build_grid(n_polar: usize, n_azimuth: usize) -> Result<SphereGrid> {
    if n_polar < 2 || n_azimuth < 4 {
        return Err(Error::GridSize(format!(
            "n_polar = {n_polar} (min 2), n_azimuth = {n_azimuth} (min 4)"
        )));
    }
    let (t, wt) = gauss_legendre(n_polar);
    let dtheta = 2.0 * PI / n_azimuth as f64;
    let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
    let mut weights = Vec::with_capacity(n_polar * n_azimuth);
    // ascending colatitude means descending cos φ
    for p in (0..n_polar).rev() {
        let colat = t[p].clamp(-1.0, 1.0).acos();
        for a in 0..n_azimuth {
            nodes.push(Direction::from_angles(colat, a as f64 * dtheta));
            weights.push(wt[p] * dtheta);
        }
    }
    Ok(SphereGrid {
        nodes,
        weights,
        n_polar,
        n_azimuth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn colatitude_examples() {
        assert_eq!(colatitude(&Vec3::new(0.0, 0.0, 1.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(colatitude(&Vec3::new(1.0, 0.0, 0.0)).unwrap(), FRAC_PI_2);
        assert_eq!(colatitude(&Vec3::new(0.0, 0.0, -2.0)).unwrap(), PI);
        assert_eq!(colatitude(&Vec3::zeros()), Err(Error::ZeroVector));
    }

    #[test]
    fn e_phi_examples() {
        assert_eq!(e_phi(&Vec3::new(1.0, 0.0, 0.0)).unwrap(), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(e_phi(&Vec3::new(0.0, 1.0, 0.0)).unwrap(), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(e_phi(&Vec3::new(0.0, 0.0, 3.0)), Err(Error::OnAxis));
        assert_eq!(e_phi(&Vec3::zeros()), Err(Error::ZeroVector));
    }

    #[test]
    fn e_phi_is_the_colatitude_gradient_direction() {
        let x = Vec3::new(0.3, -1.2, 0.7);
        let h = 1e-6;
        let mut g = Vec3::zeros();
        for j in 0..3 {
            let mut e = Vec3::zeros();
            e[j] = h;
            g[j] = (colatitude(&(x + e)).unwrap() - colatitude(&(x - e)).unwrap()) / (2.0 * h);
        }
        let expected = e_phi(&x).unwrap() / x.norm();
        assert!((g - expected).norm() < 1e-9);
    }

    #[test]
    fn direction_angles() {
        let d = Direction::new(Vec3::new(0.0, -2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d.azimuth(), 1.5 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(d.colatitude(), FRAC_PI_2, epsilon = 1e-15);
        let n = Direction::new(Vec3::new(0.0, 0.0, 5.0)).unwrap();
        assert_eq!((n.colatitude(), n.azimuth()), (0.0, 0.0));
        assert_eq!(Direction::south().antipode().colatitude(), 0.0);
        assert!(Direction::new(Vec3::zeros()).is_err());
    }

    #[test]
    fn grid_sizes() {
        let g = build_grid(2, 4).unwrap();
        assert_eq!(g.len(), 8);
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 4.0 * PI, epsilon = 1e-12);
        assert!(build_grid(1, 8).is_err());
        assert!(build_grid(4, 3).is_err());
    }

    #[test]
    fn grid_integrates_cos_squared() {
        for (np, na) in [(2, 4), (5, 8), (16, 32)] {
            let g = build_grid(np, na).unwrap();
            let v = g.integrate(|d| d.colatitude().cos().powi(2));
            assert_abs_diff_eq!(v, 4.0 * PI / 3.0, epsilon = 1e-12);
        }
    }

    // ∫ x^a y^b z^c over the sphere in closed form (zero unless all even):
    // 2 Γ((a+1)/2) Γ((b+1)/2) Γ((c+1)/2) / Γ((a+b+c+3)/2).
    fn monomial_oracle(a: i32, b: i32, c: i32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        fn gamma_half(k: i32) -> f64 {
            let mut v = PI.sqrt();
            for j in 0..k {
                v *= j as f64 + 0.5;
            }
            v
        }
        fn gamma_int(n: i32) -> f64 {
            (1..n).map(|j| j as f64).product()
        }
        let num = gamma_half(a / 2) * gamma_half(b / 2) * gamma_half(c / 2);
        let s = a + b + c + 3;
        // s is odd: Γ(s/2) = Γ((s-1)/2 + 1/2)
        let den = if s % 2 == 1 {
            gamma_half((s - 1) / 2)
        } else {
            gamma_int(s / 2)
        };
        2.0 * num / den
    }

    #[test]
    fn grid_is_exact_for_low_degree_polynomials() {
        let (np, na) = (4, 8);
        let g = build_grid(np, na).unwrap();
        let max_degree = (2 * np - 1).min(na - 1) as i32;
        for a in 0..=max_degree {
            for b in 0..=(max_degree - a) {
                for c in 0..=(max_degree - a - b) {
                    let v = g.integrate(|d| {
                        let u = d.vector();
                        u[0].powi(a) * u[1].powi(b) * u[2].powi(c)
                    });
                    assert_abs_diff_eq!(v, monomial_oracle(a, b, c), epsilon = 1e-12);
                }
            }
        }
        assert_abs_diff_eq!(monomial_oracle(0, 0, 2), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(monomial_oracle(2, 2, 0), 4.0 * PI / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn grid_ordering() {
        let g = build_grid(3, 6).unwrap();
        let rings = g.ring_colatitudes();
        assert!(rings.windows(2).all(|w| w[0] < w[1]));
        let d = g.nodes()[g.index(1, 2)];
        assert_abs_diff_eq!(d.azimuth(), 2.0 * PI * 2.0 / 6.0, epsilon = 1e-14);
        // GL nodes are symmetric: ring p mirrors ring n-1-p
        assert_abs_diff_eq!(rings[0] + rings[2], PI, epsilon = 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec3() -> impl Strategy<Value = Vec3> {
            (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
                .prop_map(|(a, b, c)| Vec3::new(a, b, c))
                .prop_filter("off axis", |v| v[0].hypot(v[1]) > 1e-6)
        }

        proptest! {
            #[test]
            fn colatitude_is_scale_invariant(x in vec3(), c in 1e-3..1e3f64) {
                let a = colatitude(&x).unwrap();
                let b = colatitude(&(x * c)).unwrap();
                prop_assert!((a - b).abs() < 1e-12);
            }

            #[test]
            fn e_phi_is_orthonormal(x in vec3()) {
                let e = e_phi(&x).unwrap();
                prop_assert!((e.norm() - 1.0).abs() < 1e-14);
                prop_assert!(e.dot(&x).abs() < 1e-14 * x.norm().max(1.0));
            }

            #[test]
            fn antipode_reflects_colatitude(x in vec3()) {
                let d = Direction::new(x).unwrap();
                let m = -d;
                prop_assert!((m.colatitude() - (PI - d.colatitude())).abs() < 1e-14);
                let direct = Direction::new(-x).unwrap();
                prop_assert!((m.colatitude() - direct.colatitude()).abs() < 1e-14);
                prop_assert!((d.vector().norm() - 1.0).abs() < 1e-14);
            }
        }
    }
}
