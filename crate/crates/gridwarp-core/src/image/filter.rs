//! Gaussian smoothing, Laplacian-of-Gaussian enhancement and binarization.

use alloc::vec::Vec;

use super::{BinaryImage, GrayImage};
use crate::error::Error;
use crate::math;

/// Discrete truncated Gaussian kernel with unit sum, radius `ceil(3 sigma)`.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = math::ceil(3.0 * sigma) as usize;
    let mut weights: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            math::exp(-d * d / (2.0 * sigma * sigma))
        })
        .collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    weights
}

/// Separable Gaussian blur with clamp-to-edge borders.
///
/// The kernel is the discretely normalized truncated Gaussian of radius
/// `ceil(3 sigma)`. Output dimensions equal the input's.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage, Error> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid_input("blur sigma must be positive"));
    }
    let kernel = gaussian_kernel(sigma);
    let radius = kernel.len() as isize / 2;
    let (w, h) = (img.width(), img.height());

    // Horizontal pass.
    let mut horiz = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for (k, &weight) in kernel.iter().enumerate() {
                acc += weight * img.get_clamped(x + k as isize - radius, y);
            }
            horiz.push(acc);
        }
    }
    let horiz_img = GrayImage::new(w, h, horiz)?;

    // Vertical pass.
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for (k, &weight) in kernel.iter().enumerate() {
                acc += weight * horiz_img.get_clamped(x, y + k as isize - radius);
            }
            out.push(acc);
        }
    }
    GrayImage::new(w, h, out)
}

/// Laplacian-of-Gaussian line enhancement.
///
/// Blurs with `sigma`, applies the 4-neighbor Laplacian stencil
/// `4*c - (n + s + e + w)` (sign chosen so bright ridges respond positively),
/// then rescales the response affinely to `[0, 1]`. A constant input has zero
/// response everywhere and maps to all-0.5.
pub fn log_enhance(img: &GrayImage, sigma: f64) -> Result<GrayImage, Error> {
    let blurred = gaussian_blur(img, sigma)?;
    let (w, h) = (img.width(), img.height());

    let mut response = Vec::with_capacity(w * h);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let c = blurred.get(x as usize, y as usize);
            let v = 4.0 * c
                - blurred.get_clamped(x - 1, y)
                - blurred.get_clamped(x + 1, y)
                - blurred.get_clamped(x, y - 1)
                - blurred.get_clamped(x, y + 1);
            lo = lo.min(v);
            hi = hi.max(v);
            response.push(v);
        }
    }

    let span = hi - lo;
    let rescaled = if span <= 0.0 {
        response.iter().map(|_| 0.5).collect()
    } else {
        response.iter().map(|v| (v - lo) / span).collect()
    };
    GrayImage::new(w, h, rescaled)
}

/// Threshold an image: a pixel is foreground iff its sample is `>= threshold`.
pub fn binarize(img: &GrayImage, threshold: f64) -> Result<BinaryImage, Error> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid_input("threshold must lie in (0, 1)"));
    }
    let bits = img.samples().iter().map(|&v| v >= threshold).collect();
    BinaryImage::new(img.width(), img.height(), bits)
}
