//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input failed a structural precondition (empty, non-finite, out of
    /// range). The message names the offending value.
    InvalidInput(String),
    /// A brute-force oracle refused an input larger than its enumeration
    /// guard.
    SizeGuardExceeded { limit: usize, actual: usize },
    /// Intersection extraction could not produce the requested grid.
    ExtractionFailure(String),
    /// Projection produced a scale factor too close to zero.
    DegenerateProjection,
    /// The ray does not intersect the plane (directions are parallel).
    RayParallelToPlane,
    /// The ray/plane intersection lies behind the ray origin.
    IntersectionBehindOrigin,
    /// Two-ray triangulation is ill-conditioned; carries the angle between
    /// the ray lines in radians.
    IllConditionedRays { angle_rad: f64 },
    /// The scene configuration is geometrically invalid.
    SceneInvalid(String),
}

impl Error {
    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn extraction(msg: impl Into<String>) -> Self {
        Error::ExtractionFailure(msg.into())
    }

    pub(crate) fn scene(msg: impl Into<String>) -> Self {
        Error::SceneInvalid(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::SizeGuardExceeded { limit, actual } => write!(
                f,
                "input too large for exhaustive enumeration (size {actual}, guard {limit})"
            ),
            Error::ExtractionFailure(msg) => write!(f, "grid extraction failed: {msg}"),
            Error::DegenerateProjection => {
                write!(f, "degenerate projection: scale factor is zero")
            }
            Error::RayParallelToPlane => write!(f, "ray is parallel to the plane"),
            Error::IntersectionBehindOrigin => {
                write!(f, "ray/plane intersection lies behind the ray origin")
            }
            Error::IllConditionedRays { angle_rad } => write!(
                f,
                "two-ray intersection ill-conditioned: ray angle {angle_rad:.3e} rad"
            ),
            Error::SceneInvalid(msg) => write!(f, "invalid scene: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
