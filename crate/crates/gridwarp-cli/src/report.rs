//! Evaluation metrics and the versioned run report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use gridwarp_core::geometry::HeightMap;

use crate::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Quantitative summary of a reconstruction against ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    /// Root-mean-square height error over valid nodes, meters.
    pub rmse_m: f64,
    /// Median absolute height error over valid nodes, meters.
    pub median_abs_error_m: f64,
    /// Fraction of grid nodes with a valid reconstructed point.
    pub success_rate: f64,
    /// Wall time per stage, seconds. Contents depend on which stages ran.
    pub stage_times_s: BTreeMap<String, f64>,
    /// SHA-256 of the producing configuration (hex), or of the evaluated
    /// inputs when no config was supplied.
    pub config_digest: String,
}

impl RunReport {
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "rmse            {:.6} mm\n",
            self.rmse_m * 1e3
        ));
        out.push_str(&format!(
            "median |error|  {:.6} mm\n",
            self.median_abs_error_m * 1e3
        ));
        out.push_str(&format!("success rate    {:.4}\n", self.success_rate));
        for (stage, secs) in &self.stage_times_s {
            out.push_str(&format!("time {stage:<11} {secs:.4} s\n"));
        }
        out.push_str(&format!("config digest   {}\n", self.config_digest));
        out
    }
}

/// Height-error metrics of a reconstruction against the true map.
///
/// Errors are measured on `z` over nodes valid in the reconstruction (truth
/// must be valid everywhere it is compared); `success_rate` is
/// valid / total.
pub fn height_metrics(map: &HeightMap, truth: &HeightMap) -> Result<(f64, f64, f64), CliError> {
    if map.n_rows() != truth.n_rows() || map.n_cols() != truth.n_cols() {
        return Err(CliError::config(format!(
            "dimension mismatch: reconstruction {}x{}, truth {}x{}",
            map.n_rows(),
            map.n_cols(),
            truth.n_rows(),
            truth.n_cols()
        )));
    }
    let mut abs_errors: Vec<f64> = Vec::new();
    for (r, c, node) in map.iter() {
        let Some(p) = node else { continue };
        let Some(t) = truth.node(r, c) else {
            return Err(CliError::config(format!(
                "truth node ({r},{c}) is invalid; cannot score against it"
            )));
        };
        abs_errors.push((p.z - t.z).abs());
    }
    let success_rate = map.valid_count() as f64 / map.total_count() as f64;
    if abs_errors.is_empty() {
        return Ok((0.0, 0.0, success_rate));
    }
    let rmse = (abs_errors.iter().map(|e| e * e).sum::<f64>() / abs_errors.len() as f64).sqrt();
    abs_errors.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = abs_errors.len();
    let median = if n % 2 == 1 {
        abs_errors[n / 2]
    } else {
        0.5 * (abs_errors[n / 2 - 1] + abs_errors[n / 2])
    };
    Ok((rmse, median, success_rate))
}
