//! Grid-pattern matching by column-wise dynamic time warping, with a
//! synthetic structured-light pipeline for closed-loop validation.
//!
//! The crate is organized around the stages of that pipeline:
//!
//! 1. [`dtw`]: one-dimensional DTW between profiles under boundary,
//!    monotonicity and step constraints, plus an exhaustive-enumeration
//!    oracle used by the tests.
//! 2. [`grid_match`]: the pairwise column-distance landscape, extraction of
//!    the minimum-cost monotone path through it (dynamic programming and a
//!    greedy variant), and conversion of paths into column/row mappings.
//! 3. [`image`]: grid extraction from grayscale images: Gaussian smoothing,
//!    Laplacian-of-Gaussian enhancement, binarization, Zhang-Suen
//!    skeletonization, intersection detection and column-profile
//!    construction.
//! 4. [`geometry`]: pinhole projection, ray back-projection, the
//!    display-plane model and least-squares two-ray triangulation.
//! 5. [`scene`]: synthetic forward model: terrains, grid projection onto
//!    the ground, camera-image rendering and ground-truth emission.
//! 6. [`pipeline`]: image-to-heightmap reconstruction composed from the
//!    stages above, and the nearest-neighbour baseline matcher it is
//!    compared against.
//!
//! Everything here is pure computation over in-memory data: the crate is
//! `no_std`-compatible (it requires `alloc`), and all transcendental math
//! goes through `libm` so results do not depend on the platform's libm.
//! File formats, IO and the command-line front end live in the companion
//! `gridwarp-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod dtw;
pub mod error;
pub mod geometry;
pub mod grid_match;
pub mod image;
pub mod linalg;
pub(crate) mod math;
pub mod pipeline;
pub mod scene;

pub use error::Error;
