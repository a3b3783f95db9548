//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by geometry, quadrature, transform, and registry code.
#[derive(Debug, Error)]
pub enum Error {
    /// An input point or parameter lies outside the declared domain of an
    /// operation (off-contour point, corner vertex, misclassified probe,
    /// exponent out of range, ...).
    #[error("domain error: {what} (at {point})")]
    Domain { what: String, point: Complex64 },

    /// A scalar parameter violated its contract.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Evaluation requested on or too close to a singularity.
    #[error("singular evaluation at {point}: {what}")]
    Singular { what: String, point: Complex64 },

    /// The integrand returned a non-finite value.
    #[error("non-finite integrand sample at {point}")]
    NonFiniteSample { point: Complex64 },

    /// A declared tail bound failed to dominate the integrand, or a tail
    /// diverges.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Newton inversion failed to converge.
    #[error("inversion failed: residual {residual:.3e} after {iterations} iterations")]
    Inversion { residual: f64, iterations: usize },

    /// Unknown check identifier passed to the verification registry.
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    /// A contract between paired arguments was violated (e.g. Blaschke zero
    /// set does not match the declared zeros of the factored function).
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: impl Into<String>, point: Complex64) -> Self {
        Error::Domain {
            what: what.into(),
            point,
        }
    }
}
