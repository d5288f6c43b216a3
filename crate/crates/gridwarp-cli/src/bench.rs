//! Empirical scaling benchmark: time the landscape construction plus the
//! dynamic-programming path on random N x N grids and fit the log-log slope.

use std::time::Instant;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use gridwarp_core::dtw::{dtw_cost, CostKind, PathMode, Sequence};
use gridwarp_core::grid_match::{
    column_distance_matrix, river_path_dp, ColumnGrid, DistanceLandscape,
};

/// One benchmark size with its mean wall time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchPoint {
    pub n: usize,
    pub mean_seconds: f64,
}

fn random_grid(rng: &mut ChaCha8Rng, n: usize) -> ColumnGrid {
    ColumnGrid::from_fn(n, n, |_, _| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
        .expect("random grid entries are finite")
}

/// Time `column_distance_matrix` followed by `river_path_dp` on fresh random
/// `n x n` grids.
///
/// Each trial repeats the measured kernel until at least ~20 ms have
/// elapsed, so small sizes are not dominated by timer resolution; the per
/// -call time is the elapsed time divided by the repeat count, and the
/// reported value is the mean over `trials`.
pub fn run_scaling(sizes: &[usize], trials: usize, seed: u64) -> Vec<BenchPoint> {
    const MIN_ELAPSED: f64 = 0.02;

    sizes
        .iter()
        .map(|&n| {
            let mut trial_means = Vec::with_capacity(trials);
            for t in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32) ^ t as u64);
                let a = random_grid(&mut rng, n);
                let b = random_grid(&mut rng, n);

                let mut reps = 1usize;
                loop {
                    let start = Instant::now();
                    for _ in 0..reps {
                        let d = column_distance_matrix(&a, &b, CostKind::Absolute);
                        let path = river_path_dp(&d, PathMode::Fixed);
                        std::hint::black_box(path.cost);
                    }
                    let elapsed = start.elapsed().as_secs_f64();
                    if elapsed >= MIN_ELAPSED {
                        trial_means.push(elapsed / reps as f64);
                        break;
                    }
                    reps *= 2;
                }
            }
            BenchPoint {
                n,
                mean_seconds: trial_means.iter().sum::<f64>() / trial_means.len() as f64,
            }
        })
        .collect()
}

/// Least-squares slope and intercept of `log10(seconds)` against
/// `log10(N)`; `None` with fewer than two distinct sizes.
pub fn fit_loglog(points: &[BenchPoint]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_seconds.log10()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    Some((slope, mean_y - slope * mean_x))
}

/// Build two random grids and assert the parallel landscape equals the
/// sequential one bitwise. Cheap self-check run by the bench command.
pub fn verify_parallel_agreement(n: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let a = random_grid(&mut rng, n);
    let b = random_grid(&mut rng, n);
    let seq = column_distance_matrix(&a, &b, CostKind::Absolute);
    let par = column_distance_matrix_par(&a, &b, CostKind::Absolute);
    if seq.data() != par.data() {
        return Err("parallel landscape differs from sequential evaluation".into());
    }
    Ok(())
}

/// Rayon-parallel landscape evaluation. Every cell is an independent pure
/// DTW, so the result is bitwise identical to the sequential
/// `column_distance_matrix`; the active rayon pool (bounded by
/// `GRIDWARP_THREADS`) limits the parallelism.
pub fn column_distance_matrix_par(
    a: &ColumnGrid,
    b: &ColumnGrid,
    kind: CostKind,
) -> DistanceLandscape {
    let a_cols: Vec<Sequence> = (0..a.cols())
        .map(|c| Sequence::new(a.column(c)).expect("grid columns are valid sequences"))
        .collect();
    let b_cols: Vec<Sequence> = (0..b.cols())
        .map(|c| Sequence::new(b.column(c)).expect("grid columns are valid sequences"))
        .collect();
    let data: Vec<f64> = (0..a_cols.len() * b_cols.len())
        .into_par_iter()
        .map(|idx| dtw_cost(&a_cols[idx / b_cols.len()], &b_cols[idx % b_cols.len()], kind))
        .collect();
    DistanceLandscape::new(a_cols.len(), b_cols.len(), data)
        .expect("DTW costs are finite and nonnegative")
}
