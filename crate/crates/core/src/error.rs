use thiserror::Error;

/// Errors raised by the toroscat library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("the zero vector has no direction")]
    ZeroVector,

    #[error("the spherical frame e_phi is undefined on the x3-axis")]
    OnAxis,

    #[error("grid too small: {0}")]
    GridSize(String),

    #[error("finite-difference stencil leaves the region |x| >= {radius}")]
    Stencil { radius: f64 },

    #[error("ray segment passes inside the excluded ball |x| < {radius}")]
    RayInsideBall { radius: f64 },

    #[error("kernel evaluated at coincident arguments")]
    Coincident,

    #[error("quadrature tolerance {requested:e} not reached (estimate {achieved:e})")]
    QuadratureBudget { requested: f64, achieved: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("invalid kernel kind for this operation: {0}")]
    KernelKind(String),

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, domain_desc: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain: domain_desc,
    }
}
