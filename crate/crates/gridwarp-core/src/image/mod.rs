//! Grid extraction from grayscale images.
//!
//! The stages, in pipeline order: Gaussian smoothing, Laplacian-of-Gaussian
//! line enhancement, binarization, Zhang-Suen skeletonization, intersection
//! detection, and conversion of detected intersections into the column
//! profiles consumed by [`crate::grid_match`].

mod filter;
mod intersect;
mod skeleton;

pub use filter::{binarize, gaussian_blur, log_enhance};
pub use intersect::{
    detect_intersections, extract_structured_grid, intersections_to_column_profiles, GridPoint,
    StructuredGrid,
};
pub use skeleton::skeletonize;

use alloc::{vec, vec::Vec};

use crate::error::Error;

/// A grayscale image: row-major samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl GrayImage {
    /// Build from row-major samples. Non-finite samples are rejected; finite
    /// samples are clamped to `[0, 1]`.
    pub fn new(width: usize, height: usize, mut samples: Vec<f64>) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::invalid_input("image dimensions must be >= 1"));
        }
        if samples.len() != width * height {
            return Err(Error::invalid_input(
                "image sample count must equal width*height",
            ));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("image samples must be finite"));
        }
        for v in &mut samples {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self { width, height, samples })
    }

    /// Constant image.
    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self, Error> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    /// Sample with clamp-to-edge border handling; coordinates may be
    /// anything.
    #[inline]
    pub(crate) fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// A binary image with the same geometry as its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::invalid_input("image dimensions must be >= 1"));
        }
        if bits.len() != width * height {
            return Err(Error::invalid_input("bit count must equal width*height"));
        }
        Ok(Self { width, height, bits })
    }

    pub fn blank(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub(crate) fn get_or_false(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            false
        } else {
            self.get(x as usize, y as usize)
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// True if every foreground pixel of `self` is also foreground in
    /// `other`.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.width == other.width
            && self.height == other.height
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(a, b)| !*a || *b)
    }
}

/// A sub-pixel image point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        crate::math::hypot(self.x - other.x, self.y - other.y)
    }
}

/// Detected grid intersections in image coordinates, tagged with the source
/// image dimensions (used to normalize profiles and enforce bounds).
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionSet {
    width: usize,
    height: usize,
    points: Vec<Point2>,
}

impl IntersectionSet {
    /// Points must lie inside `[0, width) x [0, height)`.
    pub fn new(width: usize, height: usize, points: Vec<Point2>) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::invalid_input("image dimensions must be >= 1"));
        }
        for p in &points {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::invalid_input("intersection points must be finite"));
            }
            if p.x < 0.0 || p.y < 0.0 || p.x >= width as f64 || p.y >= height as f64 {
                return Err(Error::invalid_input(
                    "intersection points must lie inside the image",
                ));
            }
        }
        Ok(Self { width, height, points })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
