//! Scattering of a quantum particle by the long-range magnetic potential of a
//! toroidal coil.
//!
//! The crate is organized bottom-up: the coil [`profile`], sphere
//! [`geometry`], the vector [`potential`], eikonal phases in [`eikonal`], the
//! cutoff symbols of the modified free evolution in [`symbols`], the discrete
//! scattering matrix in [`smatrix`], cross-sections in [`xsection`], and the
//! two-dimensional Aharonov–Bohm comparison in [`ab2d`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ab2d;
pub mod config;
pub mod eikonal;
pub mod error;
pub mod geometry;
pub mod potential;
pub mod profile;
pub mod quadrature;
pub mod smatrix;
pub mod special;
pub mod symbols;
pub mod verify;
pub mod xsection;

pub use error::{Error, Result};
