//! Numerical Hardy-space toolkit for half-strip domains.
//!
//! The crate turns the function theory of the half-strip
//! `{u+iv : |u| < sigma, v > 0}` and its exterior into computable objects:
//!
//! - [`geometry`]: strips, boundary contours, arc-length parametrization,
//!   translation maps, approach cones, point classification;
//! - [`quadrature`]: adaptive Gauss-Kronrod integration over the three-leg
//!   contours, including the two semi-infinite legs;
//! - [`cauchy`]: Cauchy transforms on contours and lines, the symmetric
//!   limit kernel, non-tangential boundary limits, jump decomposition,
//!   half-plane splitting, and boundary-membership evidence;
//! - [`hardy`]: `H^p` norm estimation over contour grids, pointwise growth
//!   bounds, explicit transform constants, the Laplace `L^2` bound, and a
//!   corpus of exactly representable test functions;
//! - [`conformal`]: the explicit half-plane <-> strip maps with their branch
//!   rules, the weighted composition isomorphisms, and derivative sign and
//!   kernel bound reports;
//! - [`blaschke`]: Blaschke products on half-planes and their transplants to
//!   the strip domains;
//! - [`verify`]: a registry of named, self-describing identity checks with
//!   machine-readable reports.
//!
//! With the default `parallel` feature, independent samples, grid contours,
//! and registry checks run on rayon; disabling the feature yields a fully
//! sequential build with bit-identical results.

pub mod conformal;
pub mod error;
pub mod geometry;
pub mod hardy;
mod par;
pub mod blaschke;
pub mod cauchy;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{ContourSpec, Region, Side, StripGeometry};
pub use quadrature::{LpNorm, QuadratureSpec, QuadratureValue, TailBound};

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex64;
