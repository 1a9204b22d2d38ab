//! The long-range vector potential A(x) = a(φ_x)/|x| · e_φ(x) outside the ball
//! |x| < R, and finite-difference diagnostics of its gauge and curl.

use crate::error::{domain, Error, Result};
use crate::geometry::{colatitude, e_phi, Vec3};
use crate::profile::ProfileFunction;

/// Profile plus the inner radius R of the region where A is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialConfig {
    profile: ProfileFunction,
    radius: f64,
}

impl PotentialConfig {
    pub fn new(profile: ProfileFunction, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain("R", radius, "(0, inf)"));
        }
        Ok(Self { profile, radius })
    }

    pub fn profile(&self) -> &ProfileFunction {
        &self.profile
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn flux(&self) -> f64 {
        self.profile.flux()
    }
}

/// A(x) for |x| ≥ R.
pub fn vector_potential(cfg: &PotentialConfig, x: &Vec3) -> Result<Vec3> {
    let r = x.norm();
    if r < cfg.radius {
        return Err(domain("|x|", r, "[R, inf)"));
    }
    let a = cfg.profile.value(colatitude(x)?);
    if a == 0.0 {
        return Ok(Vec3::zeros());
    }
    match e_phi(x) {
        Ok(e) => Ok(e * (a / r)),
        // the profile vanishes at the poles, so this branch is unreachable
        // for valid profiles; keep A = 0 on the axis regardless
        Err(Error::OnAxis) => Ok(Vec3::zeros()),
        Err(e) => Err(e),
    }
}

/// Largest |⟨A(x), x⟩| over the samples (0 for none).
pub fn check_transversal_gauge(cfg: &PotentialConfig, samples: &[Vec3]) -> Result<f64> {
    samples
        .iter()
        .try_fold(0.0_f64, |acc, x| Ok(acc.max(vector_potential(cfg, x)?.dot(x).abs())))
}

/// |curl A(x)| by second-order central differences with step h.
pub fn check_curl_free(cfg: &PotentialConfig, x: &Vec3, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(domain("h", h, "(0, inf)"));
    }
    if x.norm() < cfg.radius + 2.0 * h {
        return Err(Error::Stencil { radius: cfg.radius });
    }
    // jac[j][k] = ∂_j A_k
    let mut jac = [[0.0; 3]; 3];
    for (j, row) in jac.iter_mut().enumerate() {
        let mut e = Vec3::zeros();
        e[j] = h;
        let d = (vector_potential(cfg, &(x + e))? - vector_potential(cfg, &(x - e))?) / (2.0 * h);
        row.copy_from_slice(d.as_slice());
    }
    let curl = Vec3::new(jac[1][2] - jac[2][1], jac[2][0] - jac[0][2], jac[0][1] - jac[1][0]);
    Ok(curl.norm())
}
