//! Scene configuration files: a JSON schema mirroring the core scene types,
//! with defaults matching the desk-scale preset.
//!
//! Unknown fields are rejected so typos surface as config errors. Semantic
//! validation happens when converting into core types; error messages name
//! the offending field.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use gridwarp_core::dtw::{CostKind, PathMode};
use gridwarp_core::geometry::{DisplayGrid, Intrinsics, Pose};
use gridwarp_core::grid_match::MatchOptions;
use gridwarp_core::linalg::Vec3;
use gridwarp_core::pipeline::{ExtractionParams, ReconstructionParams, ValidityGates};
use gridwarp_core::scene::{Block, Bump, NoiseParams, RenderParams, SceneConfig, Terrain};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub grid: GridCfg,
    pub camera: CameraCfg,
    #[serde(default = "default_fov_limit")]
    pub fov_limit_deg: f64,
    #[serde(default)]
    pub noise: NoiseCfg,
    #[serde(default)]
    pub render: RenderCfg,
    #[serde(default)]
    pub terrain: TerrainCfg,
    #[serde(default)]
    pub matching: MatchingCfg,
    #[serde(default)]
    pub extraction: ExtractionCfg,
}

fn default_fov_limit() -> f64 {
    10.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub n_rows: usize,
    pub n_cols: usize,
    pub spacing_m: f64,
    #[serde(default)]
    pub center_xy_m: [f64; 2],
    #[serde(default = "default_height")]
    pub height_m: f64,
}

fn default_height() -> f64 {
    0.03
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraCfg {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub skew: f64,
    pub position_m: [f64; 3],
    #[serde(default)]
    pub look_at_m: [f64; 3],
    #[serde(default = "default_up")]
    pub up: [f64; 3],
}

fn default_up() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseCfg {
    pub pixel_sigma_px: f64,
    pub image_sigma: f64,
    pub dropout_prob: f64,
    pub texture_amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderCfg {
    pub width: usize,
    pub height: usize,
    pub line_width_px: f64,
    pub line_overhang: f64,
    pub samples_per_cell: usize,
}

impl Default for RenderCfg {
    fn default() -> Self {
        let p = RenderParams::default();
        Self {
            width: p.width,
            height: p.height,
            line_width_px: p.line_width_px,
            line_overhang: p.line_overhang,
            samples_per_cell: p.samples_per_cell,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct TerrainCfg {
    pub blocks: Vec<BlockCfg>,
    pub bumps: Vec<BumpCfg>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockCfg {
    pub x_range_m: [f64; 2],
    pub y_range_m: [f64; 2],
    pub height_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpCfg {
    pub center_m: [f64; 2],
    pub radius_m: f64,
    pub amplitude_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatchingCfg {
    /// "abs" or "sq".
    pub cost: String,
    /// "fixed" or "free".
    pub mode: String,
}

impl Default for MatchingCfg {
    fn default() -> Self {
        Self {
            cost: "abs".into(),
            mode: "fixed".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionCfg {
    pub blur_sigma: f64,
    pub log_sigma: f64,
    pub binarize_threshold: f64,
    pub merge_radius: f64,
}

impl Default for ExtractionCfg {
    fn default() -> Self {
        let p = ExtractionParams::default();
        Self {
            blur_sigma: p.blur_sigma,
            log_sigma: p.log_sigma,
            binarize_threshold: p.binarize_threshold,
            merge_radius: p.merge_radius,
        }
    }
}

pub fn parse_cost(s: &str) -> Result<CostKind, CliError> {
    match s {
        "abs" => Ok(CostKind::Absolute),
        "sq" => Ok(CostKind::Squared),
        other => Err(CliError::config(format!(
            "matching.cost must be \"abs\" or \"sq\", got \"{other}\""
        ))),
    }
}

pub fn parse_mode(s: &str) -> Result<PathMode, CliError> {
    match s {
        "fixed" => Ok(PathMode::Fixed),
        "free" => Ok(PathMode::FreeJ),
        other => Err(CliError::config(format!(
            "matching.mode must be \"fixed\" or \"free\", got \"{other}\""
        ))),
    }
}

/// Everything a command needs, converted and validated.
#[derive(Debug)]
pub struct LoadedConfig {
    pub scene: SceneConfig,
    pub terrain: Terrain,
    pub params: ReconstructionParams,
    /// SHA-256 of the canonical (re-serialized) config JSON, hex.
    pub digest: String,
}

impl ConfigFile {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex_string(&hasher.finalize())
    }

    pub fn into_loaded(self) -> Result<LoadedConfig, CliError> {
        let digest = self.digest();

        let grid = DisplayGrid::centered(
            self.grid.n_rows,
            self.grid.n_cols,
            self.grid.spacing_m,
            self.grid.center_xy_m[0],
            self.grid.center_xy_m[1],
            self.grid.height_m,
        )
        .map_err(|e| CliError::config(format!("grid: {e}")))?;

        let cam = &self.camera;
        let intrinsics = Intrinsics::new(cam.fx, cam.fy, cam.cx, cam.cy)
            .map_err(|e| CliError::config(format!("camera: {e}")))?
            .with_skew(cam.skew);
        let pose = Pose::look_at(
            Vec3::new(cam.position_m[0], cam.position_m[1], cam.position_m[2]),
            Vec3::new(cam.look_at_m[0], cam.look_at_m[1], cam.look_at_m[2]),
            Vec3::new(cam.up[0], cam.up[1], cam.up[2]),
        )
        .map_err(|e| CliError::config(format!("camera: {e}")))?;

        let scene = SceneConfig {
            grid,
            intrinsics,
            pose,
            fov_limit_deg: self.fov_limit_deg,
            noise: NoiseParams {
                pixel_sigma: self.noise.pixel_sigma_px,
                image_sigma: self.noise.image_sigma,
                dropout_prob: self.noise.dropout_prob,
                texture_amplitude: self.noise.texture_amplitude,
            },
            render: RenderParams {
                width: self.render.width,
                height: self.render.height,
                line_width_px: self.render.line_width_px,
                line_overhang: self.render.line_overhang,
                samples_per_cell: self.render.samples_per_cell,
            },
        };
        scene
            .validate()
            .map_err(|e| CliError::config(format!("scene: {e}")))?;

        let blocks: Vec<Block> = self
            .terrain
            .blocks
            .iter()
            .map(|b| Block {
                x_range: (b.x_range_m[0], b.x_range_m[1]),
                y_range: (b.y_range_m[0], b.y_range_m[1]),
                height: b.height_m,
            })
            .collect();
        let bumps: Vec<Bump> = self
            .terrain
            .bumps
            .iter()
            .map(|b| Bump {
                center: (b.center_m[0], b.center_m[1]),
                radius: b.radius_m,
                amplitude: b.amplitude_m,
            })
            .collect();
        let terrain =
            Terrain::new(blocks, bumps).map_err(|e| CliError::config(format!("terrain: {e}")))?;

        let params = ReconstructionParams {
            extraction: ExtractionParams {
                blur_sigma: self.extraction.blur_sigma,
                log_sigma: self.extraction.log_sigma,
                binarize_threshold: self.extraction.binarize_threshold,
                merge_radius: self.extraction.merge_radius,
            },
            matching: MatchOptions {
                cost: parse_cost(&self.matching.cost)?,
                mode: parse_mode(&self.matching.mode)?,
            },
            gates: ValidityGates::for_display_height(self.grid.height_m),
        };

        Ok(LoadedConfig {
            scene,
            terrain,
            params,
            digest,
        })
    }
}

pub fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Stage timings serialized alongside reconstruction diagnostics and merged
/// into evaluation reports.
pub type StageTimes = BTreeMap<String, f64>;
