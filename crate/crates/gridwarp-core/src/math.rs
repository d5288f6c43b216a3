//! Thin wrappers over `libm`.
//!
//! All float math in this crate goes through these shims so that results are
//! identical on every platform and the crate builds without `std`.

pub(crate) use libm::{cos, exp, fabs as abs, floor, log as ln, round, sqrt};

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn acos_clamped(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}

#[inline]
pub(crate) fn asin_clamped(x: f64) -> f64 {
    libm::asin(x.clamp(-1.0, 1.0))
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

pub(crate) const DEG_TO_RAD: f64 = core::f64::consts::PI / 180.0;
