//! Image-to-heightmap reconstruction and the nearest-neighbour baseline.
//!
//! The full route: filter the captured image, skeletonize, detect
//! intersections, organize them into ranked columns, match the structure
//! against the reference appearance of the grid (its projection onto
//! nominal flat ground), then triangulate each display node against its
//! assigned detection. Matching is index-structural (profile shapes and
//! monotone paths), so a laterally displaced pattern still matches, which is
//! exactly where the image-space nearest-neighbour baseline breaks down.

use alloc::{vec, vec::Vec};

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::error::Error;
use crate::geometry::{self, HeightMap};
use crate::grid_match::{self, ColumnGrid, GridMatchResult, MatchOptions};
use crate::image::{
    self, GrayImage, IntersectionSet, Point2, StructuredGrid,
};
use crate::math;
use crate::scene::{self, SceneConfig, Terrain};

/// Filtering/detection parameters for the extraction stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionParams {
    pub blur_sigma: f64,
    pub log_sigma: f64,
    pub binarize_threshold: f64,
    pub merge_radius: f64,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        Self {
            blur_sigma: 1.0,
            log_sigma: 1.8,
            binarize_threshold: 0.6,
            merge_radius: 5.0,
        }
    }
}

/// Per-node validity gates applied after triangulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityGates {
    /// Maximum accepted two-ray RMS residual, meters.
    pub max_residual: f64,
    /// Accepted reconstructed height range, meters.
    pub z_min: f64,
    pub z_max: f64,
}

impl ValidityGates {
    /// Gates scaled to a display height `h`: generous terrain range
    /// `[-h/15, 0.8 h]` and residual cap `h/20`.
    pub fn for_display_height(h: f64) -> Self {
        Self {
            max_residual: h / 20.0,
            z_min: -h / 15.0,
            z_max: 0.8 * h,
        }
    }

    fn accepts(&self, point: crate::linalg::Vec3, residual: f64) -> bool {
        residual <= self.max_residual && point.z >= self.z_min && point.z <= self.z_max
    }
}

/// Everything the reconstruction route needs besides the scene itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionParams {
    pub extraction: ExtractionParams,
    pub matching: MatchOptions,
    pub gates: ValidityGates,
}

impl ReconstructionParams {
    pub fn for_scene(cfg: &SceneConfig) -> Self {
        Self {
            extraction: ExtractionParams::default(),
            matching: MatchOptions::default(),
            gates: ValidityGates::for_display_height(cfg.grid.height),
        }
    }
}

/// Full reconstruction output, diagnostics included.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub height_map: HeightMap,
    /// The detection set the reconstruction consumed.
    pub intersections: IntersectionSet,
    /// Ranked detections and their profile grid.
    pub structured: StructuredGrid,
    /// Reference profile grid the detections were matched against.
    pub reference_profile: ColumnGrid,
    /// Landscapes, paths and mappings from the matcher.
    pub match_result: GridMatchResult,
    /// Final (display node, pixel) assignments fed to triangulation.
    pub matches: Vec<((usize, usize), (f64, f64))>,
}

/// Exact projections of the grid nodes onto nominal flat ground: the
/// reference appearance that detections are matched against. Row-major
/// `(n_rows * n_cols)` pixels.
pub fn flat_reference_pixels(cfg: &SceneConfig) -> Result<Vec<(f64, f64)>, Error> {
    let truth = scene::emit_ground_truth(cfg, &Terrain::flat())?;
    let mut pixels = Vec::with_capacity(cfg.grid.n_rows * cfg.grid.n_cols);
    for r in 1..=cfg.grid.n_rows {
        for c in 1..=cfg.grid.n_cols {
            pixels.push(truth.pixel(r, c));
        }
    }
    Ok(pixels)
}

/// The reference appearance organized the same way detections are: columns
/// ordered by image u, ranks ordered by image v, with maps back to display
/// node indices. This keeps matching independent of how the camera happens
/// to orient the grid in the image (e.g. a v axis that runs against the
/// display row order).
#[derive(Debug, Clone)]
pub struct ReferenceStructure {
    /// `n_rows x n_cols` profile: entry `(k, j)` is the image-height
    /// normalized v of the rank-`k` node in image-column `j`.
    pub profile: ColumnGrid,
    /// 0-based image-column slot of each 0-based display column.
    col_slot_of_display: Vec<usize>,
    /// 0-based rank slot of each 0-based display row.
    row_slot_of_display: Vec<usize>,
}

impl ReferenceStructure {
    pub fn build(cfg: &SceneConfig) -> Result<Self, Error> {
        let (n_rows, n_cols) = (cfg.grid.n_rows, cfg.grid.n_cols);
        let pixels = flat_reference_pixels(cfg)?;

        let mean_u: Vec<f64> = (0..n_cols)
            .map(|c| (0..n_rows).map(|r| pixels[r * n_cols + c].0).sum::<f64>() / n_rows as f64)
            .collect();
        let mean_v: Vec<f64> = (0..n_rows)
            .map(|r| (0..n_cols).map(|c| pixels[r * n_cols + c].1).sum::<f64>() / n_cols as f64)
            .collect();

        let mut col_order: Vec<usize> = (0..n_cols).collect();
        col_order.sort_by(|&a, &b| mean_u[a].partial_cmp(&mean_u[b]).expect("finite"));
        let mut row_order: Vec<usize> = (0..n_rows).collect();
        row_order.sort_by(|&a, &b| mean_v[a].partial_cmp(&mean_v[b]).expect("finite"));

        let mut col_slot_of_display = vec![0usize; n_cols];
        for (slot, &display_col) in col_order.iter().enumerate() {
            col_slot_of_display[display_col] = slot;
        }
        let mut row_slot_of_display = vec![0usize; n_rows];
        for (slot, &display_row) in row_order.iter().enumerate() {
            row_slot_of_display[display_row] = slot;
        }

        let height = cfg.render.height as f64;
        let profile = ColumnGrid::from_fn(n_rows, n_cols, |k, j| {
            pixels[row_order[k] * n_cols + col_order[j]].1 / height
        })?;
        Ok(Self {
            profile,
            col_slot_of_display,
            row_slot_of_display,
        })
    }

    /// Image-column slot (0-based) of a 1-based display column.
    pub fn col_slot(&self, display_col: usize) -> usize {
        self.col_slot_of_display[display_col - 1]
    }

    /// Rank slot (0-based) of a 1-based display row.
    pub fn row_slot(&self, display_row: usize) -> usize {
        self.row_slot_of_display[display_row - 1]
    }
}

/// Column-profile grid of the reference appearance (image-ordered; see
/// [`ReferenceStructure`]).
pub fn reference_profile_grid(cfg: &SceneConfig) -> Result<ColumnGrid, Error> {
    ReferenceStructure::build(cfg).map(|r| r.profile)
}

/// Triangulate (node, pixel) matches and apply the validity gates.
pub fn triangulate_with_gates(
    matches: &[((usize, usize), (f64, f64))],
    cfg: &SceneConfig,
    gates: &ValidityGates,
) -> HeightMap {
    let grid = &cfg.grid;
    let mut map = HeightMap::empty(grid.n_rows, grid.n_cols);
    for &((row, col), pixel) in matches {
        if row < 1 || row > grid.n_rows || col < 1 || col > grid.n_cols {
            continue;
        }
        if map.node(row, col).is_some() {
            continue;
        }
        let Ok(node_ray) = geometry::display_ray(grid, (row, col)) else {
            continue;
        };
        let camera_ray = geometry::back_project(&cfg.intrinsics, &cfg.pose, pixel);
        if let Ok((point, residual)) = geometry::two_ray_lsq_point(&camera_ray, &node_ray) {
            if gates.accepts(point, residual) {
                map.set_node(row, col, Some(point));
            }
        }
    }
    map
}

/// Reconstruct from an already-detected intersection set.
pub fn reconstruct_from_detections(
    set: &IntersectionSet,
    cfg: &SceneConfig,
    params: &ReconstructionParams,
) -> Result<Reconstruction, Error> {
    let grid = &cfg.grid;
    let structured = image::extract_structured_grid(set, grid.n_cols, grid.n_rows)?;
    let reference = ReferenceStructure::build(cfg)?;

    let match_result =
        grid_match::match_grid(&reference.profile, &structured.profile, params.matching);

    // Reference image-column slot j maps to detected column round(a_col(j));
    // reference rank slot k maps to detected rank round(a_row(k)). Display
    // nodes reach their slots through the reference structure.
    let col_map = match_result.column_mapping.values();
    let row_map = match_result.row_mapping.values();
    let mut matches = Vec::with_capacity(grid.n_rows * grid.n_cols);
    for r in 1..=grid.n_rows {
        for c in 1..=grid.n_cols {
            let det_col = math::round(col_map[reference.col_slot(c)]) as usize;
            let det_rank = math::round(row_map[reference.row_slot(r)]) as usize;
            if det_col < 1 || det_col > structured.columns.len() {
                continue;
            }
            let column = &structured.columns[det_col - 1];
            if det_rank < 1 || det_rank > column.len() {
                continue;
            }
            let p = column[det_rank - 1];
            matches.push(((r, c), (p.x, p.y)));
        }
    }

    let height_map = triangulate_with_gates(&matches, cfg, &params.gates);
    Ok(Reconstruction {
        height_map,
        intersections: set.clone(),
        structured,
        reference_profile: reference.profile,
        match_result,
        matches,
    })
}

/// Full image-to-heightmap route: filter, skeletonize, detect, match,
/// triangulate.
pub fn reconstruct_image(
    img: &GrayImage,
    cfg: &SceneConfig,
    params: &ReconstructionParams,
) -> Result<Reconstruction, Error> {
    let set = extract_intersections(img, &params.extraction)?;
    reconstruct_from_detections(&set, cfg, params)
}

/// The extraction stage alone: blur, LoG enhance, binarize, skeletonize,
/// detect intersections.
pub fn extract_intersections(
    img: &GrayImage,
    params: &ExtractionParams,
) -> Result<IntersectionSet, Error> {
    let blurred = image::gaussian_blur(img, params.blur_sigma)?;
    let enhanced = image::log_enhance(&blurred, params.log_sigma)?;
    let binary = image::binarize(&enhanced, params.binarize_threshold)?;
    let skeleton = image::skeletonize(&binary);
    image::detect_intersections(&skeleton, params.merge_radius)
}

/// Baseline matcher: snap each detection to the nearest reference node
/// within `gate_radius_px` (default: 45% of the smallest reference node
/// spacing). No structural regularization; the contrast case for the
/// landscape matcher.
pub fn nearest_neighbor_matches(
    detections: &[Point2],
    cfg: &SceneConfig,
    gate_radius_px: Option<f64>,
) -> Result<Vec<((usize, usize), (f64, f64))>, Error> {
    let reference = flat_reference_pixels(cfg)?;
    let (n_rows, n_cols) = (cfg.grid.n_rows, cfg.grid.n_cols);

    let gate = match gate_radius_px {
        Some(g) => g,
        None => {
            let mut min_spacing = f64::INFINITY;
            for r in 0..n_rows {
                for c in 0..n_cols {
                    let p = reference[r * n_cols + c];
                    if c + 1 < n_cols {
                        let q = reference[r * n_cols + c + 1];
                        min_spacing = min_spacing.min(math::hypot(p.0 - q.0, p.1 - q.1));
                    }
                    if r + 1 < n_rows {
                        let q = reference[(r + 1) * n_cols + c];
                        min_spacing = min_spacing.min(math::hypot(p.0 - q.0, p.1 - q.1));
                    }
                }
            }
            0.45 * min_spacing
        }
    };

    // Best detection per node, by snap distance.
    let mut best: Vec<Option<(f64, (f64, f64))>> = vec![None; n_rows * n_cols];
    for det in detections {
        let mut nearest = None;
        let mut nearest_d = f64::INFINITY;
        for (idx, p) in reference.iter().enumerate() {
            let d = math::hypot(det.x - p.0, det.y - p.1);
            if d < nearest_d {
                nearest_d = d;
                nearest = Some(idx);
            }
        }
        let Some(idx) = nearest else { continue };
        if nearest_d > gate {
            continue;
        }
        if best[idx].map_or(true, |(d, _)| nearest_d < d) {
            best[idx] = Some((nearest_d, (det.x, det.y)));
        }
    }

    let mut matches = Vec::new();
    for (idx, slot) in best.iter().enumerate() {
        if let Some((_, pixel)) = slot {
            matches.push(((idx / n_cols + 1, idx % n_cols + 1), *pixel));
        }
    }
    Ok(matches)
}

/// Perturb correspondence pixels with Gaussian noise of std `sigma_px`
/// (deterministic for a fixed seed). Models detection jitter when the
/// extraction stage is bypassed.
pub fn perturb_pixels(
    matches: &[((usize, usize), (f64, f64))],
    sigma_px: f64,
    seed: u64,
) -> Vec<((usize, usize), (f64, f64))> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    matches
        .iter()
        .map(|&(node, (u, v))| {
            let du = sigma_px * scene::standard_normal(&mut rng);
            let dv = sigma_px * scene::standard_normal(&mut rng);
            (node, (u + du, v + dv))
        })
        .collect()
}
