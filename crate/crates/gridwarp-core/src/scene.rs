//! Synthetic forward model: terrains, display-grid projection onto the
//! ground, camera-image rendering and ground-truth emission.
//!
//! Rendering is idealized: no inter-reflection, no surface texture beyond a
//! configurable additive texture-noise field. The narrow field-of-view film
//! in front of the camera is modeled as a radial attenuation that cuts off
//! light arriving more than `fov_limit_deg` away from the optical axis.
//! Everything is deterministic for a fixed seed; the RNG is ChaCha8 with
//! platform-independent streams.

use alloc::{vec, vec::Vec};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::Error;
use crate::geometry::{self, DisplayGrid, HeightMap, Intrinsics, Pose};
use crate::image::GrayImage;
use crate::linalg::Vec3;
use crate::math;

/// Axis-aligned box of the given height sitting on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub height: f64,
}

/// Smooth radial bump: `amplitude * (1 - (r/radius)^2)^2` inside `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: (f64, f64),
    pub radius: f64,
    pub amplitude: f64,
}

/// Ground model: base height 0, plus blocks and smooth bumps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Terrain {
    blocks: Vec<Block>,
    bumps: Vec<Bump>,
}

impl Terrain {
    /// Perfectly flat ground.
    pub fn flat() -> Self {
        Self::default()
    }

    pub fn new(blocks: Vec<Block>, bumps: Vec<Bump>) -> Result<Self, Error> {
        for b in &blocks {
            if !(b.height >= 0.0) || !b.height.is_finite() {
                return Err(Error::invalid_input("block heights must be >= 0"));
            }
            if b.x_range.0 > b.x_range.1 || b.y_range.0 > b.y_range.1 {
                return Err(Error::invalid_input("block ranges must be ordered"));
            }
        }
        for b in &bumps {
            if !(b.radius > 0.0) {
                return Err(Error::invalid_input("bump radius must be positive"));
            }
            if !(b.amplitude >= 0.0) {
                return Err(Error::invalid_input("bump amplitude must be >= 0"));
            }
        }
        Ok(Self { blocks, bumps })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    /// Terrain height at `(x, y)`: the tallest covering block (footprints are
    /// closed) plus the sum of bump fields.
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        let mut height: f64 = 0.0;
        for b in &self.blocks {
            if x >= b.x_range.0 && x <= b.x_range.1 && y >= b.y_range.0 && y <= b.y_range.1 {
                height = height.max(b.height);
            }
        }
        for b in &self.bumps {
            let r = math::hypot(x - b.center.0, y - b.center.1);
            if r < b.radius {
                let t = 1.0 - (r / b.radius) * (r / b.radius);
                height += b.amplitude * t * t;
            }
        }
        height
    }
}

/// Noise model applied by the renderer / correspondence synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Std-dev of Gaussian noise added to synthesized pixel coordinates
    /// (used when triangulating from exact correspondences).
    pub pixel_sigma: f64,
    /// Std-dev of Gaussian noise added to every rendered image sample.
    pub image_sigma: f64,
    /// Probability that a grid intersection is erased from the rendering.
    pub dropout_prob: f64,
    /// Amplitude of the smooth background texture field.
    pub texture_amplitude: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            pixel_sigma: 0.0,
            image_sigma: 0.0,
            dropout_prob: 0.0,
            texture_amplitude: 0.0,
        }
    }
}

/// Rasterization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderParams {
    pub width: usize,
    pub height: usize,
    /// Drawn grid-line width in pixels.
    pub line_width_px: f64,
    /// How far lines extend beyond the outer nodes, as a fraction of the
    /// grid spacing. Keeps the outer intersections proper 4-way crossings.
    pub line_overhang: f64,
    /// Polyline samples per grid cell when projecting lines to the image.
    pub samples_per_cell: usize,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            line_width_px: 2.5,
            line_overhang: 0.35,
            samples_per_cell: 12,
        }
    }
}

/// Full description of a synthetic capture: display grid, camera, film
/// cutoff, noise and rasterization settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub grid: DisplayGrid,
    pub intrinsics: Intrinsics,
    pub pose: Pose,
    /// Half-angle of the narrow field-of-view film, degrees.
    pub fov_limit_deg: f64,
    pub noise: NoiseParams,
    pub render: RenderParams,
}

impl SceneConfig {
    /// Check the cross-field invariants (component types validate their own).
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.fov_limit_deg > 0.0) || !self.fov_limit_deg.is_finite() {
            return Err(Error::scene("fov_limit_deg must be positive"));
        }
        if self.render.width < 64 || self.render.height < 64 {
            return Err(Error::scene("rendered image must be at least 64x64"));
        }
        if !(self.render.line_width_px >= 1.0) {
            return Err(Error::scene("line_width_px must be >= 1"));
        }
        if !(self.render.line_overhang >= 0.0) {
            return Err(Error::scene("line_overhang must be >= 0"));
        }
        if self.render.samples_per_cell < 2 {
            return Err(Error::scene("samples_per_cell must be >= 2"));
        }
        let n = &self.noise;
        if !(n.pixel_sigma >= 0.0 && n.image_sigma >= 0.0 && n.texture_amplitude >= 0.0) {
            return Err(Error::scene("noise sigmas must be >= 0"));
        }
        if !(0.0..=1.0).contains(&n.dropout_prob) {
            return Err(Error::scene("dropout_prob must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Ground truth for every stage of a synthetic capture.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    n_rows: usize,
    n_cols: usize,
    /// Row-major true 3D ground points per node.
    node_points: Vec<Vec3>,
    /// Row-major exact image projections per node.
    pixels: Vec<(f64, f64)>,
    height_map: HeightMap,
}

impl GroundTruth {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// True ground point of the 1-based node `(row, col)`.
    pub fn node_point(&self, row: usize, col: usize) -> Vec3 {
        self.node_points[(row - 1) * self.n_cols + (col - 1)]
    }

    /// Exact projection of the 1-based node `(row, col)`.
    pub fn pixel(&self, row: usize, col: usize) -> (f64, f64) {
        self.pixels[(row - 1) * self.n_cols + (col - 1)]
    }

    pub fn height_map(&self) -> &HeightMap {
        &self.height_map
    }

    /// All `(node, pixel)` pairs with 1-based node indices, row-major.
    pub fn correspondences(&self) -> Vec<((usize, usize), (f64, f64))> {
        let mut out = Vec::with_capacity(self.node_points.len());
        for r in 1..=self.n_rows {
            for c in 1..=self.n_cols {
                out.push(((r, c), self.pixel(r, c)));
            }
        }
        out
    }
}

/// Where each display node's vertical ray meets the terrain.
///
/// Node `(r, c)` at `(X, Y, h)` maps to `(X, Y, terrain_height(X, Y))`;
/// row-major output. Fails if the terrain reaches the display plane under
/// any node.
pub fn project_grid_to_ground(grid: &DisplayGrid, terrain: &Terrain) -> Result<Vec<Vec3>, Error> {
    let mut points = Vec::with_capacity(grid.n_rows * grid.n_cols);
    for r in 1..=grid.n_rows {
        for c in 1..=grid.n_cols {
            let node = grid.node_position(r, c)?;
            let z = terrain.height_at(node.x, node.y);
            if z >= grid.height {
                return Err(Error::scene(
                    "terrain reaches the display plane under the grid",
                ));
            }
            points.push(Vec3::new(node.x, node.y, z));
        }
    }
    Ok(points)
}

/// Exact ground truth for a configuration: node ground points, their
/// projections and the true height map.
pub fn emit_ground_truth(cfg: &SceneConfig, terrain: &Terrain) -> Result<GroundTruth, Error> {
    cfg.validate()?;
    let node_points = project_grid_to_ground(&cfg.grid, terrain)?;
    let mut pixels = Vec::with_capacity(node_points.len());
    for p in &node_points {
        let px = geometry::project(&cfg.intrinsics, &cfg.pose, *p)
            .map_err(|_| Error::scene("a grid node projects degenerately"))?;
        pixels.push(px);
    }
    let mut height_map = HeightMap::empty(cfg.grid.n_rows, cfg.grid.n_cols);
    for r in 1..=cfg.grid.n_rows {
        for c in 1..=cfg.grid.n_cols {
            height_map.set_node(r, c, Some(node_points[(r - 1) * cfg.grid.n_cols + (c - 1)]));
        }
    }
    Ok(GroundTruth {
        n_rows: cfg.grid.n_rows,
        n_cols: cfg.grid.n_cols,
        node_points,
        pixels,
        height_map,
    })
}

#[inline]
pub(crate) fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller; two uniform draws per sample keeps the
/// stream layout independent of past draws.
pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = uniform01(rng).max(f64::MIN_POSITIVE);
    let u2 = uniform01(rng);
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

/// Smooth plateau-then-rolloff attenuation of the narrow-FOV film.
///
/// Full transmission up to 90% of the cutoff angle, raised-cosine rolloff to
/// zero at the cutoff, zero beyond.
fn film_attenuation(angle_rad: f64, limit_rad: f64) -> f64 {
    const PLATEAU: f64 = 0.9;
    let t = angle_rad / limit_rad;
    if t <= PLATEAU {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + math::cos(core::f64::consts::PI * (t - PLATEAU) / (1.0 - PLATEAU)))
    }
}

struct Rasterizer<'a> {
    cfg: &'a SceneConfig,
    samples: Vec<f64>,
    /// Camera optical axis in world coordinates.
    axis: Vec3,
    limit_rad: f64,
}

impl<'a> Rasterizer<'a> {
    fn new(cfg: &'a SceneConfig) -> Self {
        Self {
            cfg,
            samples: vec![0.0; cfg.render.width * cfg.render.height],
            axis: cfg.pose.optical_axis(),
            limit_rad: cfg.fov_limit_deg * math::DEG_TO_RAD,
        }
    }

    fn attenuation_at(&self, u: f64, v: f64) -> f64 {
        let ray = geometry::back_project(&self.cfg.intrinsics, &self.cfg.pose, (u, v));
        let angle = math::acos_clamped(ray.direction().dot(self.axis));
        film_attenuation(angle, self.limit_rad)
    }

    /// Max-composite an anti-aliased segment with per-pixel film attenuation.
    fn draw_segment(&mut self, p0: (f64, f64), p1: (f64, f64)) {
        let (w, h) = (self.cfg.render.width, self.cfg.render.height);
        let half = 0.5 * self.cfg.render.line_width_px;
        let pad = half + 1.5;
        let x_lo = math::floor(p0.0.min(p1.0) - pad).max(0.0) as usize;
        let x_hi = math::ceil(p0.0.max(p1.0) + pad).min((w - 1) as f64) as usize;
        let y_lo = math::floor(p0.1.min(p1.1) - pad).max(0.0) as usize;
        let y_hi = math::ceil(p0.1.max(p1.1) + pad).min((h - 1) as f64) as usize;
        if x_lo > x_hi || y_lo > y_hi {
            return;
        }

        let seg = (p1.0 - p0.0, p1.1 - p0.1);
        let len_sq = seg.0 * seg.0 + seg.1 * seg.1;
        for y in y_lo..=y_hi {
            for x in x_lo..=x_hi {
                let (px, py) = (x as f64, y as f64);
                let t = if len_sq > 0.0 {
                    (((px - p0.0) * seg.0 + (py - p0.1) * seg.1) / len_sq).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let d = math::hypot(px - (p0.0 + t * seg.0), py - (p0.1 + t * seg.1));
                let coverage = (half + 0.5 - d).clamp(0.0, 1.0);
                if coverage <= 0.0 {
                    continue;
                }
                let value = coverage * self.attenuation_at(px, py);
                let slot = &mut self.samples[y * w + x];
                if value > *slot {
                    *slot = value;
                }
            }
        }
    }

    fn erase_disk(&mut self, center: (f64, f64), radius: f64) {
        let (w, h) = (self.cfg.render.width, self.cfg.render.height);
        let x_lo = math::floor(center.0 - radius).max(0.0) as usize;
        let x_hi = math::ceil(center.0 + radius).min((w - 1) as f64) as usize;
        let y_lo = math::floor(center.1 - radius).max(0.0) as usize;
        let y_hi = math::ceil(center.1 + radius).min((h - 1) as f64) as usize;
        for y in y_lo..=y_hi {
            for x in x_lo..=x_hi {
                if math::hypot(x as f64 - center.0, y as f64 - center.1) <= radius {
                    self.samples[y * w + x] = 0.0;
                }
            }
        }
    }
}

/// Render the projected grid as seen by the configured camera.
///
/// Grid lines are sampled at sub-node resolution on the terrain, projected,
/// and drawn as anti-aliased bright segments under the film attenuation.
/// Then, in order: per-node dropout erasures, background texture, per-pixel
/// Gaussian noise, clamping to `[0, 1]`. Identical inputs and seed produce a
/// bitwise-identical image.
pub fn render_scene(cfg: &SceneConfig, terrain: &Terrain, seed: u64) -> Result<GrayImage, Error> {
    cfg.validate()?;
    let grid = &cfg.grid;
    let overhang = cfg.render.line_overhang;
    // Segments whose endpoints jump in height hit a block wall; the line
    // breaks there instead of smearing across the discontinuity.
    let jump_threshold = 0.5 * grid.spacing;

    let mut raster = Rasterizer::new(cfg);

    let sample_ground = |x: f64, y: f64| -> Result<Vec3, Error> {
        let z = terrain.height_at(x, y);
        if z >= grid.height {
            return Err(Error::scene(
                "terrain reaches the display plane under the grid",
            ));
        }
        Ok(Vec3::new(x, y, z))
    };

    let draw_polyline = |raster: &mut Rasterizer<'_>, ground: &[Vec3]| -> Result<(), Error> {
        let mut prev: Option<((f64, f64), f64)> = None;
        for point in ground {
            let pixel = geometry::project(&cfg.intrinsics, &cfg.pose, *point)
                .map_err(|_| Error::scene("grid line projects degenerately"))?;
            if let Some((prev_px, prev_z)) = prev {
                if math::abs(point.z - prev_z) <= jump_threshold {
                    raster.draw_segment(prev_px, pixel);
                }
            }
            prev = Some((pixel, point.z));
        }
        Ok(())
    };

    // Column lines: constant x, y swept across the rows (plus overhang).
    let steps_per_cell = cfg.render.samples_per_cell;
    for c in 1..=grid.n_cols {
        let x = grid.origin.x + (c - 1) as f64 * grid.spacing;
        let t0 = -overhang;
        let t1 = (grid.n_rows - 1) as f64 + overhang;
        let n_steps = (math::ceil((t1 - t0) * steps_per_cell as f64) as usize).max(1);
        let mut ground = Vec::with_capacity(n_steps + 1);
        for k in 0..=n_steps {
            let t = t0 + (t1 - t0) * k as f64 / n_steps as f64;
            ground.push(sample_ground(x, grid.origin.y + t * grid.spacing)?);
        }
        draw_polyline(&mut raster, &ground)?;
    }
    // Row lines: constant y, x swept across the columns.
    for r in 1..=grid.n_rows {
        let y = grid.origin.y + (r - 1) as f64 * grid.spacing;
        let t0 = -overhang;
        let t1 = (grid.n_cols - 1) as f64 + overhang;
        let n_steps = (math::ceil((t1 - t0) * steps_per_cell as f64) as usize).max(1);
        let mut ground = Vec::with_capacity(n_steps + 1);
        for k in 0..=n_steps {
            let t = t0 + (t1 - t0) * k as f64 / n_steps as f64;
            ground.push(sample_ground(grid.origin.x + t * grid.spacing, y)?);
        }
        draw_polyline(&mut raster, &ground)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Per-node dropout, row-major draw order.
    if cfg.noise.dropout_prob > 0.0 {
        let truth = emit_ground_truth(cfg, terrain)?;
        let radius = 1.8 * cfg.render.line_width_px + 1.0;
        for r in 1..=grid.n_rows {
            for c in 1..=grid.n_cols {
                if uniform01(&mut rng) < cfg.noise.dropout_prob {
                    raster.erase_disk(truth.pixel(r, c), radius);
                }
            }
        }
    }

    let (w, h) = (cfg.render.width, cfg.render.height);
    let mut samples = raster.samples;

    // Smooth background texture: bilinear value noise on a 16 px lattice.
    if cfg.noise.texture_amplitude > 0.0 {
        const CELL: usize = 16;
        let lat_w = w / CELL + 2;
        let lat_h = h / CELL + 2;
        let lattice: Vec<f64> = (0..lat_w * lat_h).map(|_| uniform01(&mut rng)).collect();
        for y in 0..h {
            for x in 0..w {
                let fx = x as f64 / CELL as f64;
                let fy = y as f64 / CELL as f64;
                let (ix, iy) = (fx as usize, fy as usize);
                let (tx, ty) = (fx - ix as f64, fy - iy as f64);
                let v00 = lattice[iy * lat_w + ix];
                let v01 = lattice[iy * lat_w + ix + 1];
                let v10 = lattice[(iy + 1) * lat_w + ix];
                let v11 = lattice[(iy + 1) * lat_w + ix + 1];
                let value = v00 * (1.0 - tx) * (1.0 - ty)
                    + v01 * tx * (1.0 - ty)
                    + v10 * (1.0 - tx) * ty
                    + v11 * tx * ty;
                samples[y * w + x] += cfg.noise.texture_amplitude * (value - 0.5);
            }
        }
    }

    // Per-pixel sensor noise, row-major.
    if cfg.noise.image_sigma > 0.0 {
        for s in &mut samples {
            *s += cfg.noise.image_sigma * standard_normal(&mut rng);
        }
    }

    for s in &mut samples {
        *s = s.clamp(0.0, 1.0);
    }
    GrayImage::new(w, h, samples)
}

/// Canonical synthetic scenarios at the desk scale used throughout the test
/// suites: a 7x7 grid with 0.8 mm spacing displayed 3 cm above the ground,
/// seen by a 512x512 camera mounted 6 mm to the side of the grid center with
/// a +/-10 degree film.
pub mod presets {
    use super::*;

    /// Grid/camera geometry shared by all presets.
    pub fn desk_scene() -> SceneConfig {
        let grid =
            DisplayGrid::centered(7, 7, 0.0008, 0.0, 0.0, 0.03).expect("valid preset grid");
        let intrinsics =
            Intrinsics::new(1400.0, 1400.0, 256.0, 256.0).expect("valid preset intrinsics");
        let pose = Pose::look_at(
            Vec3::new(-0.006, 0.0, 0.03),
            Vec3::ZERO,
            Vec3::new(0.0, 1.0, 0.0),
        )
        .expect("valid preset pose");
        SceneConfig {
            grid,
            intrinsics,
            pose,
            fov_limit_deg: 10.0,
            noise: NoiseParams::default(),
            render: RenderParams::default(),
        }
    }

    /// A block of the given height under the left half of the grid
    /// (columns 1..=3), spanning all rows.
    pub fn left_block(height: f64) -> Terrain {
        Terrain::new(
            vec![Block {
                x_range: (-0.0030, -0.0002),
                y_range: (-0.0030, 0.0030),
                height,
            }],
            vec![],
        )
        .expect("valid preset terrain")
    }

    /// A uniform slab covering the whole grid footprint. At 4 mm it shifts
    /// the observed pattern by roughly one grid period in the image, the
    /// witness case where nearest-neighbour matching collapses.
    pub fn full_slab(height: f64) -> Terrain {
        Terrain::new(
            vec![Block {
                x_range: (-0.02, 0.02),
                y_range: (-0.02, 0.02),
                height,
            }],
            vec![],
        )
        .expect("valid preset terrain")
    }
}
