//! Closed-loop checks: the renderer's output must survive the full
//! extraction + matching + triangulation route and reproduce the terrain.

use gridwarp_core::pipeline::{
    self, ReconstructionParams,
};
use gridwarp_core::scene::{self, presets, Terrain};

fn rmse_vs_truth(
    map: &gridwarp_core::geometry::HeightMap,
    truth: &scene::GroundTruth,
) -> (f64, usize) {
    let mut sum_sq = 0.0;
    let mut n = 0usize;
    for (r, c, node) in map.iter() {
        if let Some(p) = node {
            let err = p.z - truth.node_point(r, c).z;
            sum_sq += err * err;
            n += 1;
        }
    }
    ((sum_sq / n.max(1) as f64).sqrt(), n)
}

#[test]
fn noise_free_flat_scene_round_trips() {
    let cfg = presets::desk_scene();
    let terrain = Terrain::flat();
    let img = scene::render_scene(&cfg, &terrain, 0).unwrap();

    let params = ReconstructionParams::for_scene(&cfg);
    let set = pipeline::extract_intersections(&img, &params.extraction).unwrap();
    assert_eq!(
        set.len(),
        cfg.grid.n_rows * cfg.grid.n_cols,
        "expected one detection per grid node"
    );

    // Extraction is pure: a second pass over the same image is identical.
    let set_again = pipeline::extract_intersections(&img, &params.extraction).unwrap();
    assert_eq!(set, set_again);

    // Localization: each detection within 1 px RMS of its nearest true node.
    let truth_px = scene::emit_ground_truth(&cfg, &terrain).unwrap();
    let mut sum_sq = 0.0;
    for p in set.points() {
        let mut best = f64::INFINITY;
        for r in 1..=cfg.grid.n_rows {
            for c in 1..=cfg.grid.n_cols {
                let (u, v) = truth_px.pixel(r, c);
                let d2 = (p.x - u) * (p.x - u) + (p.y - v) * (p.y - v);
                best = best.min(d2);
            }
        }
        sum_sq += best;
    }
    let rms_px = (sum_sq / set.len() as f64).sqrt();
    assert!(rms_px <= 1.0, "localization RMS {rms_px} px");

    let rec = pipeline::reconstruct_from_detections(&set, &cfg, &params).unwrap();
    let truth = scene::emit_ground_truth(&cfg, &terrain).unwrap();
    let (rmse, valid) = rmse_vs_truth(&rec.height_map, &truth);
    assert_eq!(valid, 49);
    assert!(rmse <= 0.5e-3, "rmse {rmse} m exceeds 0.5 mm");
}

#[test]
fn smooth_bump_terrain_round_trips() {
    // A 1.5 mm bump of 3 mm radius: smooth deformation well inside the
    // matcher's working regime (the lateral parallax of on-bump detections
    // stays under half a grid period, so column clustering is unaffected).
    let cfg = presets::desk_scene();
    let terrain = Terrain::new(
        vec![],
        vec![gridwarp_core::scene::Bump {
            center: (0.0005, -0.0005),
            radius: 0.003,
            amplitude: 0.0015,
        }],
    )
    .unwrap();
    let img = scene::render_scene(&cfg, &terrain, 1).unwrap();
    let params = ReconstructionParams::for_scene(&cfg);
    let rec = pipeline::reconstruct_image(&img, &cfg, &params).unwrap();
    let truth = scene::emit_ground_truth(&cfg, &terrain).unwrap();
    let (rmse, valid) = rmse_vs_truth(&rec.height_map, &truth);
    assert_eq!(valid, 49);
    assert!(rmse <= 0.3e-3, "bump rmse {rmse} m");
}

#[test]
fn non_square_grid_round_trips() {
    // 5 rows x 9 columns: catches any row/column transposition in profile
    // construction, reference structure or node assignment.
    let mut cfg = presets::desk_scene();
    cfg.grid = gridwarp_core::geometry::DisplayGrid::centered(5, 9, 0.0007, 0.0, 0.0, 0.03)
        .unwrap();
    let terrain = Terrain::flat();
    let img = scene::render_scene(&cfg, &terrain, 1).unwrap();
    let params = ReconstructionParams::for_scene(&cfg);
    let set = pipeline::extract_intersections(&img, &params.extraction).unwrap();
    assert_eq!(set.len(), 45);
    let rec = pipeline::reconstruct_from_detections(&set, &cfg, &params).unwrap();
    let truth = scene::emit_ground_truth(&cfg, &terrain).unwrap();
    let (rmse, valid) = rmse_vs_truth(&rec.height_map, &truth);
    assert_eq!(valid, 45);
    assert!(rmse <= 0.5e-3, "non-square rmse {rmse} m");
}

#[test]
fn tiny_fov_kills_extraction() {
    let mut cfg = presets::desk_scene();
    cfg.fov_limit_deg = 0.1;
    let img = scene::render_scene(&cfg, &Terrain::flat(), 0).unwrap();
    let params = ReconstructionParams::for_scene(&cfg);
    assert!(pipeline::reconstruct_image(&img, &cfg, &params).is_err());
}

#[test]
fn exact_correspondences_are_machine_precise() {
    let cfg = presets::desk_scene();
    for terrain in [Terrain::flat(), presets::left_block(0.010)] {
        let truth = scene::emit_ground_truth(&cfg, &terrain).unwrap();
        let gates = pipeline::ValidityGates::for_display_height(cfg.grid.height);
        let map = pipeline::triangulate_with_gates(&truth.correspondences(), &cfg, &gates);
        assert_eq!(map.valid_count(), 49);
        for (r, c, node) in map.iter() {
            let err = (node.unwrap().z - truth.node_point(r, c).z).abs();
            assert!(err <= 1e-9, "node ({r},{c}) err {err}");
        }
    }
}

#[test]
#[ignore]
fn dump_extraction_diagnostics() {
    use gridwarp_core::image;
    let cfg = presets::desk_scene();
    let terrain = Terrain::flat();
    let img = scene::render_scene(&cfg, &terrain, 0).unwrap();
    let params = ReconstructionParams::for_scene(&cfg);

    let save = |name: &str, g: &image::GrayImage| {
        let mut bytes = format!("P5\n{} {}\n255\n", g.width(), g.height()).into_bytes();
        bytes.extend(g.samples().iter().map(|v| (v * 255.0).round() as u8));
        std::fs::write(format!("/tmp/{name}.pgm"), bytes).unwrap();
    };
    save("render", &img);
    let blurred = image::gaussian_blur(&img, params.extraction.blur_sigma).unwrap();
    let enhanced = image::log_enhance(&blurred, params.extraction.log_sigma).unwrap();
    save("enhanced", &enhanced);
    let binary = image::binarize(&enhanced, params.extraction.binarize_threshold).unwrap();
    let bin_vis = image::GrayImage::new(
        binary.width(),
        binary.height(),
        (0..binary.width() * binary.height())
            .map(|i| if binary.get(i % binary.width(), i / binary.width()) { 1.0 } else { 0.0 })
            .collect(),
    )
    .unwrap();
    save("binary", &bin_vis);
    let skel = image::skeletonize(&binary);
    let skel_vis = image::GrayImage::new(
        skel.width(),
        skel.height(),
        (0..skel.width() * skel.height())
            .map(|i| if skel.get(i % skel.width(), i / skel.width()) { 1.0 } else { 0.0 })
            .collect(),
    )
    .unwrap();
    save("skeleton", &skel_vis);
    let set = image::detect_intersections(&skel, params.extraction.merge_radius).unwrap();
    println!("detections: {}", set.len());
    let truth = scene::emit_ground_truth(&cfg, &terrain).unwrap();
    for p in set.points() {
        println!("  det ({:.2}, {:.2})", p.x, p.y);
    }
    println!("truth pixels:");
    for r in 1..=7 {
        let row: Vec<String> = (1..=7)
            .map(|c| {
                let (u, v) = truth.pixel(r, c);
                format!("({u:.1},{v:.1})")
            })
            .collect();
        println!("  {}", row.join(" "));
    }
    let stats = |name: &str, g: &image::GrayImage| {
        let lo = g.samples().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = g.samples().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bright = g.samples().iter().filter(|&&v| v > 0.5).count();
        println!("{name}: min {lo:.3} max {hi:.3} >0.5: {bright}");
    };
    stats("render", &img);
    stats("enhanced", &enhanced);
    println!("binary on: {}", binary.count_ones());
    println!("skeleton on: {}", skel.count_ones());
}

#[test]
#[ignore]
fn dump_reconstruction_diagnostics() {
    let cfg = presets::desk_scene();
    let terrain = Terrain::flat();
    let img = scene::render_scene(&cfg, &terrain, 0).unwrap();
    let params = ReconstructionParams::for_scene(&cfg);
    let set = pipeline::extract_intersections(&img, &params.extraction).unwrap();
    let rec = pipeline::reconstruct_from_detections(&set, &cfg, &params).unwrap();
    println!("col mapping: {:?}", rec.match_result.column_mapping.values());
    println!("row mapping: {:?}", rec.match_result.row_mapping.values());
    println!("matches: {}", rec.matches.len());
    println!("valid: {}", rec.height_map.valid_count());
    for (r, c, node) in rec.height_map.iter() {
        match node {
            Some(p) => println!("  ({r},{c}) z = {:.6} mm", p.z * 1e3),
            None => println!("  ({r},{c}) INVALID"),
        }
    }
}
