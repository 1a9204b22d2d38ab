//! The coil profile a(φ): a nonnegative, smooth function of the colatitude
//! compactly supported inside (0, π). Its integral over [0, π] is the
//! magnetic flux through the torus section.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature::integrate;

/// Absolute tolerance of every profile integral.
pub const PROFILE_TOL: f64 = 1e-13;

/// Normalized bump c·exp(1 - 1/(1 - u²)), u = (φ - φ₀)/δ, peak value c at φ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    pub amplitude: f64,
    pub center: f64,
    pub half_width: f64,
}

impl BumpProfile {
    pub fn new(amplitude: f64, center: f64, half_width: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(domain("amplitude", amplitude, "[0, inf)"));
        }
        if !(half_width > 0.0) || !(center - half_width > 0.0) || !(center + half_width < PI) {
            return Err(Error::Profile(format!(
                "support [{}, {}] must lie inside (0, pi)",
                center - half_width,
                center + half_width
            )));
        }
        Ok(Self {
            amplitude,
            center,
            half_width,
        })
    }

    fn value(&self, phi: f64) -> f64 {
        let u = (phi - self.center) / self.half_width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        self.amplitude * (1.0 - 1.0 / (1.0 - u * u)).exp()
    }

    fn derivative(&self, phi: f64) -> f64 {
        let u = (phi - self.center) / self.half_width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - u * u;
        self.value(phi) * (-2.0 * u / (q * q)) / self.half_width
    }
}

/// A profile given by samples, interpolated as the square of a clamped cubic
/// spline through the square roots of the samples. The spline vanishes with
/// zero slope at both support endpoints, so the profile is nonnegative and
/// flat to third order there.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl SampledProfile {
    /// `samples` are (φ, a(φ)) pairs strictly inside `support`.
    pub fn new(support: (f64, f64), samples: &[(f64, f64)]) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo > 0.0 && hi < PI && lo < hi) {
            return Err(Error::Profile(format!("support [{lo}, {hi}] must lie inside (0, pi)")));
        }
        let mut knots = vec![lo];
        let mut values = vec![0.0];
        for &(phi, a) in samples {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::Profile(format!("negative sample {a} at {phi}")));
            }
            if !(phi > *knots.last().unwrap()) || !(phi < hi) {
                return Err(Error::Profile(
                    "sample abscissae must increase strictly inside the support".into(),
                ));
            }
            knots.push(phi);
            values.push(a.sqrt());
        }
        knots.push(hi);
        values.push(0.0);
        let second = clamped_spline_second_derivatives(&knots, &values);
        Ok(Self { knots, values, second })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// The (φ, a) samples this profile was built from.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let n = self.knots.len();
        (1..n - 1)
            .map(|i| (self.knots[i], self.values[i] * self.values[i]))
            .collect()
    }

    fn locate(&self, phi: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if phi <= lo || phi >= hi {
            return None;
        }
        let i = self.knots.partition_point(|&k| k <= phi);
        Some(i - 1)
    }

    fn spline(&self, phi: f64) -> Option<(f64, f64)> {
        let i = self.locate(phi)?;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - phi) / h;
        let b = (phi - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let s = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let ds = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        Some((s, ds))
    }

    fn value(&self, phi: f64) -> f64 {
        self.spline(phi).map_or(0.0, |(s, _)| s * s)
    }

    fn derivative(&self, phi: f64) -> f64 {
        self.spline(phi).map_or(0.0, |(s, ds)| 2.0 * s * ds)
    }
}

// Clamped cubic spline with zero end slopes (tridiagonal solve).
fn clamped_spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let h0 = x[1] - x[0];
    diag[0] = h0 / 3.0;
    upper[0] = h0 / 6.0;
    rhs[0] = (y[1] - y[0]) / h0;
    for i in 1..n - 1 {
        let hl = x[i] - x[i - 1];
        let hr = x[i + 1] - x[i];
        lower[i] = hl / 6.0;
        diag[i] = (hl + hr) / 3.0;
        upper[i] = hr / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    let hn = x[n - 1] - x[n - 2];
    lower[n - 1] = hn / 6.0;
    diag[n - 1] = hn / 3.0;
    rhs[n - 1] = -(y[n - 1] - y[n - 2]) / hn;
    // Thomas algorithm
    for i in 1..n {
        let m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    let mut out = vec![0.0; n];
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
    }
    out
}

/// The coil profile a(φ).
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileFunction {
    Bump(BumpProfile),
    Zero,
    Sampled(SampledProfile),
}

impl ProfileFunction {
    pub fn bump(amplitude: f64, center: f64, half_width: f64) -> Result<Self> {
        BumpProfile::new(amplitude, center, half_width).map(Self::Bump)
    }

    /// Bump of the given center and half-width scaled so that its flux equals
    /// `flux`.
    pub fn bump_with_flux(flux: f64, center: f64, half_width: f64) -> Result<Self> {
        let unit = Self::bump(1.0, center, half_width)?;
        unit.scaled(flux / unit.flux())
    }

    pub fn sampled(support: (f64, f64), samples: &[(f64, f64)]) -> Result<Self> {
        SampledProfile::new(support, samples).map(Self::Sampled)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Bump(b) => b.amplitude == 0.0,
            Self::Sampled(s) => s.values.iter().all(|&v| v == 0.0),
        }
    }

    /// Closed support interval, `None` for the zero profile.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Self::Zero => None,
            Self::Bump(b) => Some((b.center - b.half_width, b.center + b.half_width)),
            Self::Sampled(s) => Some(s.support()),
        }
    }

    /// Multiply the profile by a nonnegative factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(domain("scale factor", factor, "[0, inf)"));
        }
        Ok(match self {
            Self::Zero => Self::Zero,
            Self::Bump(b) => Self::Bump(BumpProfile {
                amplitude: b.amplitude * factor,
                ..*b
            }),
            Self::Sampled(s) => {
                let root = factor.sqrt();
                Self::Sampled(SampledProfile {
                    knots: s.knots.clone(),
                    values: s.values.iter().map(|v| v * root).collect(),
                    second: s.second.iter().map(|v| v * root).collect(),
                })
            }
        })
    }

    /// a(φ) for φ ∈ [0, π].
    pub fn eval(&self, phi: f64) -> Result<f64> {
        check_colatitude("phi", phi)?;
        Ok(self.value(phi))
    }

    /// a′(φ) for φ ∈ [0, π].
    pub fn derivative(&self, phi: f64) -> Result<f64> {
        check_colatitude("phi", phi)?;
        Ok(match self {
            Self::Zero => 0.0,
            Self::Bump(b) => b.derivative(phi),
            Self::Sampled(s) => s.derivative(phi),
        })
    }

    // Unchecked evaluation; callers guarantee φ ∈ [0, π].
    pub(crate) fn value(&self, phi: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Bump(b) => b.value(phi),
            Self::Sampled(s) => s.value(phi),
        }
    }

    /// Signed integral of a over [φ_lo, φ_hi]; limits in either order.
    pub fn integrate(&self, phi_lo: f64, phi_hi: f64) -> Result<f64> {
        check_colatitude("phi_lo", phi_lo)?;
        check_colatitude("phi_hi", phi_hi)?;
        Ok(self.integral_unchecked(phi_lo, phi_hi))
    }

    pub(crate) fn integral_unchecked(&self, phi_lo: f64, phi_hi: f64) -> f64 {
        let Some((s_lo, s_hi)) = self.support() else {
            return 0.0;
        };
        if phi_lo == phi_hi {
            return 0.0;
        }
        let (a, b, sign) = if phi_lo < phi_hi {
            (phi_lo, phi_hi, 1.0)
        } else {
            (phi_hi, phi_lo, -1.0)
        };
        let a = a.max(s_lo);
        let b = b.min(s_hi);
        if a >= b {
            return 0.0;
        }
        let value = match self {
            // Spline pieces are polynomials; integrate knot interval by knot interval.
            Self::Sampled(s) => {
                let mut cuts = vec![a];
                cuts.extend(s.knots.iter().copied().filter(|&k| k > a && k < b));
                cuts.push(b);
                cuts.windows(2)
                    .map(|w| integrate(|p| self.value(p), w[0], w[1], PROFILE_TOL).value)
                    .sum()
            }
            _ => integrate(|p| self.value(p), a, b, PROFILE_TOL).value,
        };
        sign * value
    }

    /// Magnetic flux ∫₀^π a(φ) dφ.
    pub fn flux(&self) -> f64 {
        self.integral_unchecked(0.0, PI)
    }

    /// Antiderivative ∫₀^φ a for φ ∈ [0, π].
    pub fn cumulative(&self, phi: f64) -> f64 {
        self.integral_unchecked(0.0, phi)
    }

    pub fn max_value(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Bump(b) => b.amplitude,
            Self::Sampled(s) => {
                let (lo, hi) = s.support();
                (0..=2000)
                    .map(|i| s.value(lo + (hi - lo) * i as f64 / 2000.0))
                    .fold(0.0, f64::max)
            }
        }
    }
}

pub(crate) fn check_colatitude(what: &'static str, phi: f64) -> Result<()> {
    if (0.0..=PI).contains(&phi) {
        Ok(())
    } else {
        Err(domain(what, phi, "[0, pi]"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;
    use std::f64::consts::FRAC_PI_4;

    // ∫_{-1}^{1} exp(1 - 1/(1-u²)) du, frozen from an independent QUADPACK
    // (scipy.integrate.quad, epsabs 1e-14) evaluation.
    const BUMP_INTEGRAL: f64 = 1.206_900_322_437_876_5;

    fn unit_bump() -> ProfileFunction {
        ProfileFunction::bump(1.0, FRAC_PI_2, FRAC_PI_4).unwrap()
    }

    // Midpoint rule oracle; converges super-algebraically for functions whose
    // derivatives all vanish at the interval ends.
    fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|i| f(a + h * (i as f64 + 0.5))).sum::<f64>() * h
    }

    #[test]
    fn bump_values() {
        let p = unit_bump();
        assert_eq!(p.eval(0.0).unwrap(), 0.0);
        assert_eq!(p.eval(PI).unwrap(), 0.0);
        assert_eq!(p.eval(FRAC_PI_2).unwrap(), 1.0);
        assert_eq!(ProfileFunction::Zero.eval(1.0).unwrap(), 0.0);
        assert!(p.eval(-0.1).is_err());
        assert!(p.eval(PI + 1e-9).is_err());
    }

    #[test]
    fn flux_of_bump_matches_oracle() {
        let p = unit_bump();
        let oracle = FRAC_PI_4 * BUMP_INTEGRAL;
        assert!((p.flux() - oracle).abs() < 1e-12);
        let mid = midpoint(|u| (1.0 - 1.0 / (1.0 - u * u)).exp(), -1.0, 1.0, 4000);
        assert!((mid - BUMP_INTEGRAL).abs() < 1e-12);
        assert_eq!(ProfileFunction::Zero.flux(), 0.0);
    }

    #[test]
    fn flux_is_linear() {
        let p = ProfileFunction::bump(0.7, 1.3, 0.6).unwrap();
        let q = p.scaled(2.0).unwrap();
        assert!((q.flux() - 2.0 * p.flux()).abs() < 1e-12);
        let target = 1.234;
        let r = ProfileFunction::bump_with_flux(target, 1.3, 0.6).unwrap();
        assert!((r.flux() - target).abs() < 1e-12);
    }

    #[test]
    fn integrate_profile_examples() {
        let p = unit_bump();
        assert_eq!(p.integrate(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(p.integrate(0.0, PI).unwrap(), p.flux());
        assert_eq!(p.integrate(PI, 0.0).unwrap(), -p.flux());
        assert!(p.integrate(-1.0, 1.0).is_err());
    }

    #[test]
    fn invalid_bumps_are_rejected() {
        assert!(ProfileFunction::bump(1.0, 0.5, 0.6).is_err());
        assert!(ProfileFunction::bump(1.0, 3.0, 0.2).is_err());
        assert!(ProfileFunction::bump(-1.0, 1.5, 0.2).is_err());
        assert!(ProfileFunction::bump(1.0, 1.5, 0.0).is_err());
    }

    #[test]
    fn bump_is_flat_at_support_ends() {
        let p = unit_bump();
        let edge = FRAC_PI_2 + FRAC_PI_4;
        // a′ approaching the right end from inside
        let d: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|h| p.derivative(edge - h).unwrap().abs())
            .collect();
        assert!(d[0] > d[1] && d[1] > d[2]);
        assert!(d[0] < 1e-12);
        let left = FRAC_PI_2 - FRAC_PI_4;
        let dl: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|h| p.derivative(left + h).unwrap().abs())
            .collect();
        assert!(dl[0] > dl[1] && dl[1] > dl[2]);
        // one-sided finite differences of order 1..3 at the edge
        let h = 2e-3;
        let f = |k: f64| p.eval(edge - k * h).unwrap();
        let d1 = (f(0.0) - f(1.0)) / h;
        let d2 = (f(0.0) - 2.0 * f(1.0) + f(2.0)) / (h * h);
        let d3 = (f(0.0) - 3.0 * f(1.0) + 3.0 * f(2.0) - f(3.0)) / (h * h * h);
        assert!(d1.abs() < 1e-12 && d2.abs() < 1e-10 && d3.abs() < 1e-8);
    }

    #[test]
    fn analytic_derivative_matches_finite_differences() {
        let p = ProfileFunction::bump(0.8, 1.4, 0.7).unwrap();
        for phi in [0.9, 1.2, 1.4, 1.77, 2.0] {
            let h = 1e-5;
            let fd = (p.eval(phi + h).unwrap() - p.eval(phi - h).unwrap()) / (2.0 * h);
            assert!((fd - p.derivative(phi).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn sampled_profile_reproduces_samples_and_vanishes_flat() {
        let samples = [(0.8, 0.3), (1.1, 0.9), (1.5, 1.0), (1.9, 0.4)];
        let p = ProfileFunction::sampled((0.6, 2.2), &samples).unwrap();
        for &(phi, a) in &samples {
            assert!((p.eval(phi).unwrap() - a).abs() < 1e-14);
        }
        assert_eq!(p.eval(0.6).unwrap(), 0.0);
        assert_eq!(p.eval(2.2).unwrap(), 0.0);
        assert!(p.derivative(0.6 + 1e-6).unwrap().abs() < 1e-9);
        assert!(p.derivative(2.2 - 1e-6).unwrap().abs() < 1e-9);
        for i in 0..=400 {
            assert!(p.eval(PI * i as f64 / 400.0).unwrap() >= 0.0);
        }
        let mid = midpoint(|x| p.eval(x).unwrap(), 0.6, 2.2, 200_000);
        assert!((p.flux() - mid).abs() < 1e-9);
        let doubled = p.scaled(2.0).unwrap();
        assert!((doubled.flux() - 2.0 * p.flux()).abs() < 1e-12);
    }

    #[test]
    fn sampled_profile_rejects_bad_input() {
        assert!(ProfileFunction::sampled((0.0, 1.0), &[(0.5, 1.0)]).is_err());
        assert!(ProfileFunction::sampled((0.3, 1.0), &[(0.5, -1.0)]).is_err());
        assert!(ProfileFunction::sampled((0.3, 1.0), &[(0.5, 1.0), (0.4, 1.0)]).is_err());
        assert!(ProfileFunction::sampled((0.3, 1.0), &[(1.2, 1.0)]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn integrals_are_additive(x in 0.0..PI, y in 0.0..PI, z in 0.0..PI,
                                      c in 0.1..2.0f64, center in 1.0..2.1f64, hw in 0.1..0.9f64) {
                prop_assume!(center - hw > 0.0 && center + hw < PI);
                let p = ProfileFunction::bump(c, center, hw).unwrap();
                let lhs = p.integrate(x, y).unwrap() + p.integrate(y, z).unwrap();
                let rhs = p.integrate(x, z).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-12);
                prop_assert!(p.flux() > 0.0);
                prop_assert!(p.eval(x).unwrap() >= 0.0);
            }
        }
    }
}
