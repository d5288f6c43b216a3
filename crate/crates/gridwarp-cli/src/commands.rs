//! The four batch commands: simulate, reconstruct, evaluate, bench.

use std::path::Path;
use std::time::Instant;

use gridwarp_core::dtw::{CostKind, PathMode};
use gridwarp_core::pipeline::{self};
use gridwarp_core::scene;

use crate::config::{ConfigFile, StageTimes};
use crate::report::{height_metrics, RunReport, REPORT_SCHEMA_VERSION};
use crate::{bench, csvio, pgm, svg, CliError};

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::pipeline(format!("cannot create {}: {e}", out.display())))
}

/// Render a scene and write `image.pgm` + `ground_truth.csv`.
pub fn cmd_simulate(config: &Path, out: &Path, seed: u64) -> Result<(), CliError> {
    let loaded = ConfigFile::from_path(config)?.into_loaded()?;
    ensure_out_dir(out)?;

    let image = scene::render_scene(&loaded.scene, &loaded.terrain, seed)
        .map_err(|e| CliError::config(format!("scene: {e}")))?;
    let truth = scene::emit_ground_truth(&loaded.scene, &loaded.terrain)
        .map_err(|e| CliError::config(format!("scene: {e}")))?;

    pgm::write(&out.join("image.pgm"), &image)?;
    csvio::write_ground_truth(&out.join("ground_truth.csv"), &truth)?;
    Ok(())
}

/// Run the full reconstruction pipeline on an image and write the height map
/// plus matching diagnostics.
pub fn cmd_reconstruct(
    image_path: &Path,
    config: &Path,
    out: &Path,
    mode: Option<PathMode>,
    cost: Option<CostKind>,
) -> Result<(), CliError> {
    let loaded = ConfigFile::from_path(config)?.into_loaded()?;
    let mut params = loaded.params;
    if let Some(mode) = mode {
        params.matching.mode = mode;
    }
    if let Some(cost) = cost {
        params.matching.cost = cost;
    }
    ensure_out_dir(out)?;

    let image = pgm::read(image_path)?;
    let mut times = StageTimes::new();

    let start = Instant::now();
    let set = pipeline::extract_intersections(&image, &params.extraction)
        .map_err(|e| CliError::pipeline(format!("extraction: {e}")))?;
    times.insert("extract".into(), start.elapsed().as_secs_f64());

    let start = Instant::now();
    let rec = pipeline::reconstruct_from_detections(&set, &loaded.scene, &params)
        .map_err(|e| CliError::pipeline(format!("matching: {e}")))?;
    times.insert("match_triangulate".into(), start.elapsed().as_secs_f64());

    csvio::write_heightmap(&out.join("heightmap.csv"), &rec.height_map)?;
    let z_img = heightmap_to_image(&rec.height_map, loaded.scene.grid.height);
    pgm::write(&out.join("heightmap.pgm"), &z_img)?;

    csvio::write_intersections(&out.join("intersections.csv"), &rec.intersections)?;
    csvio::write_landscape(&out.join("d_cols.csv"), &rec.match_result.d_cols)?;
    csvio::write_landscape(&out.join("d_rows.csv"), &rec.match_result.d_rows)?;
    csvio::write_path(&out.join("col_path.csv"), &rec.match_result.column_path)?;
    csvio::write_path(&out.join("row_path.csv"), &rec.match_result.row_path)?;
    csvio::write_mapping(&out.join("col_mapping.csv"), &rec.match_result.column_mapping)?;
    csvio::write_mapping(&out.join("row_mapping.csv"), &rec.match_result.row_mapping)?;

    let times_json = serde_json::to_string_pretty(&times).expect("times serialize");
    std::fs::write(out.join("timings.json"), times_json)
        .map_err(|e| CliError::pipeline(format!("cannot write timings: {e}")))?;
    Ok(())
}

/// Grid-node heights rescaled into an image for quick visual inspection
/// (invalid nodes render black, `z = 0` mid-gray, `z = h/2` white).
fn heightmap_to_image(
    map: &gridwarp_core::geometry::HeightMap,
    display_height: f64,
) -> gridwarp_core::image::GrayImage {
    let samples: Vec<f64> = map
        .iter()
        .map(|(_, _, node)| match node {
            Some(p) => 0.5 + p.z / display_height,
            None => 0.0,
        })
        .collect();
    gridwarp_core::image::GrayImage::new(map.n_cols(), map.n_rows(), samples)
        .expect("height map dims are nonzero")
}

/// Score a reconstructed height map against ground truth; write and print
/// the report.
pub fn cmd_evaluate(
    heightmap: &Path,
    truth_path: &Path,
    out: &Path,
    config: Option<&Path>,
    timings: Option<&Path>,
) -> Result<String, CliError> {
    ensure_out_dir(out)?;
    let mut times = StageTimes::new();

    let start = Instant::now();
    let map = csvio::read_heightmap(heightmap)?;
    let (truth_map, _pixels) = csvio::read_ground_truth(truth_path)?;
    if let Some(t) = timings {
        let text = std::fs::read_to_string(t)
            .map_err(|e| CliError::config(format!("cannot read timings {}: {e}", t.display())))?;
        let merged: StageTimes = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("timings {}: {e}", t.display())))?;
        times.extend(merged);
    }
    times.insert("evaluate".into(), start.elapsed().as_secs_f64());

    let (rmse_m, median_abs_error_m, success_rate) = height_metrics(&map, &truth_map)?;

    let config_digest = match config {
        Some(path) => ConfigFile::from_path(path)?.digest(),
        None => {
            use sha2::{Digest, Sha256};
            let mut hasher = Sha256::new();
            hasher.update(std::fs::read(heightmap).unwrap_or_default());
            hasher.update(std::fs::read(truth_path).unwrap_or_default());
            crate::config::hex_string(&hasher.finalize())
        }
    };

    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        rmse_m,
        median_abs_error_m,
        success_rate,
        stage_times_s: times,
        config_digest,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(out.join("report.json"), &json)
        .map_err(|e| CliError::pipeline(format!("cannot write report: {e}")))?;
    std::fs::write(out.join("report.txt"), report.to_human())
        .map_err(|e| CliError::pipeline(format!("cannot write report: {e}")))?;
    Ok(report.to_human())
}

/// Time the matcher on random N x N grids, write CSV + SVG, and return the
/// human-readable summary.
pub fn cmd_bench(
    sizes: &[usize],
    trials: usize,
    out: &Path,
    seed: u64,
) -> Result<String, CliError> {
    if sizes.is_empty() {
        return Err(CliError::config("bench needs at least one size"));
    }
    if sizes.iter().any(|&n| n < 4) {
        return Err(CliError::config("bench sizes must be >= 4"));
    }
    if trials == 0 {
        return Err(CliError::config("bench needs at least one trial"));
    }
    ensure_out_dir(out)?;

    let points = bench::run_scaling(sizes, trials, seed);
    let rows: Vec<(usize, f64)> = points.iter().map(|p| (p.n, p.mean_seconds)).collect();
    csvio::write_bench(&out.join("bench.csv"), &rows)?;

    // Cross-check the parallel landscape evaluation (bounded by
    // GRIDWARP_THREADS) against the sequential path on the smallest size.
    bench::verify_parallel_agreement(sizes[0], seed)
        .map_err(CliError::pipeline)?;

    let fit = bench::fit_loglog(&points);
    svg::write_loglog_plot(
        &out.join("bench.svg"),
        &rows,
        fit,
        "grid match wall time vs N",
    )?;

    let mut summary = String::from("N        mean seconds\n");
    for p in &points {
        summary.push_str(&format!("{:<8} {:.6e}\n", p.n, p.mean_seconds));
    }
    match fit {
        Some((slope, _)) => summary.push_str(&format!("log-log slope: {slope:.3}\n")),
        None => summary.push_str("log-log slope: n/a (need >= 2 sizes)\n"),
    }
    Ok(summary)
}

/// Parse `8,16,32` style size lists.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::config(format!("bad size \"{part}\" in --sizes")))
        })
        .collect()
}
