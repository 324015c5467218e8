//! Spectral solver for the Lamé elastostatics Dirichlet problem in the unit ball.
//!
//! Boundary displacement fields are expanded in the three vector spherical
//! harmonic families `E⁺`, `E⁻`, `E⁰`. Each basis element has a closed-form
//! polynomial elastic extension, so a band-limited boundary field yields an
//! exact interior solution. The matrix-valued elastic Poisson kernel is
//! provided as an independent quadrature route for cross-checking.
//!
//! Module map:
//!
//! - [`sphharm`]: real orthonormal scalar harmonics, solid extensions, gradients
//! - [`vsh`]: the `E⁺`/`E⁻`/`E⁰` families and their norms
//! - [`quadrature`]: Gauss–Legendre × uniform-azimuth sphere grids
//! - [`decomposition`]: analysis/synthesis, projections, `L₋`/`L₀`/`L₊`
//! - [`elastic`]: per-mode solutions, Poisson kernels, finite-difference checks
//! - [`hardy`]: norms on concentric spheres and radial boundary convergence
//! - [`cli`]: command-line front end and the verification report

// `!(a < b)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decomposition;
pub mod elastic;
mod error;
pub mod hardy;
pub mod quadrature;
pub mod sphharm;
pub mod vsh;

pub use error::{Error, Result};

/// Cartesian 3-vector.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 real matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
