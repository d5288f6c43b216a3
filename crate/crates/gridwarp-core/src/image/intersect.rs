//! Intersection detection on skeletons and conversion of detections into
//! column profiles.

use alloc::{vec, vec::Vec};

use super::{BinaryImage, IntersectionSet, Point2};
use crate::error::Error;
use crate::grid_match::ColumnGrid;
use crate::math;

/// Detect grid intersections on a skeleton image.
///
/// Candidate pixels are skeleton pixels with at least 3 skeleton neighbors
/// in their 8-neighborhood. Candidates within `merge_radius` of each other
/// are clustered (single link), each cluster contributing one sub-pixel
/// point at its centroid; centroids that still fall within the radius are
/// merged again, so no two output points are closer than `merge_radius`.
/// The output is sorted by (y, x).
pub fn detect_intersections(
    skel: &BinaryImage,
    merge_radius: f64,
) -> Result<IntersectionSet, Error> {
    if !(merge_radius >= 1.0) {
        return Err(Error::invalid_input("merge radius must be >= 1 pixel"));
    }
    let (w, h) = (skel.width(), skel.height());

    let mut candidates: Vec<Point2> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !skel.get(x, y) {
                continue;
            }
            let mut count = 0;
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    if (dx, dy) == (0, 0) {
                        continue;
                    }
                    if skel.get_or_false(x as isize + dx, y as isize + dy) {
                        count += 1;
                    }
                }
            }
            if count >= 3 {
                candidates.push(Point2::new(x as f64, y as f64));
            }
        }
    }

    // Single-link clustering via union-find.
    let n = candidates.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if candidates[i].distance(candidates[j]) <= merge_radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }

    // Cluster centroids, weighted by member count for the re-merge pass.
    let mut clusters: Vec<(f64, f64, usize)> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        let slot = match root_slot[root] {
            Some(s) => s,
            None => {
                clusters.push((0.0, 0.0, 0));
                root_slot[root] = Some(clusters.len() - 1);
                clusters.len() - 1
            }
        };
        clusters[slot].0 += candidates[i].x;
        clusters[slot].1 += candidates[i].y;
        clusters[slot].2 += 1;
    }
    let mut centroids: Vec<(f64, f64, usize)> = clusters
        .into_iter()
        .map(|(sx, sy, c)| (sx / c as f64, sy / c as f64, c))
        .collect();

    // Centroids of separate single-link clusters can still end up within the
    // radius; merge until stable so the spacing invariant holds.
    loop {
        let mut merged = false;
        'outer: for i in 0..centroids.len() {
            for j in (i + 1)..centroids.len() {
                let (ax, ay, ac) = centroids[i];
                let (bx, by, bc) = centroids[j];
                if math::hypot(ax - bx, ay - by) < merge_radius {
                    let total = (ac + bc) as f64;
                    centroids[i] = (
                        (ax * ac as f64 + bx * bc as f64) / total,
                        (ay * ac as f64 + by * bc as f64) / total,
                        ac + bc,
                    );
                    centroids.swap_remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }

    let mut points: Vec<Point2> = centroids
        .into_iter()
        .map(|(x, y, _)| {
            Point2::new(
                x.clamp(0.0, (w - 1) as f64),
                y.clamp(0.0, (h - 1) as f64),
            )
        })
        .collect();
    points.sort_by(|a, b| (a.y, a.x).partial_cmp(&(b.y, b.x)).expect("finite coords"));
    IntersectionSet::new(w, h, points)
}

/// One ranked grid point inside a column: sub-pixel position plus whether it
/// was actually observed or filled in by rank interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub observed: bool,
}

/// Detections organized into `n_cols` columns of `n_rows` ranked points,
/// together with the column-profile matrix they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredGrid {
    /// `columns[c][k]` is the rank-`k` point of column `c` (top to bottom).
    pub columns: Vec<Vec<GridPoint>>,
    /// `n_rows x n_cols`; entry `(k, c)` is the y coordinate of rank `k` in
    /// column `c`, normalized by the image height.
    pub profile: ColumnGrid,
}

/// Cluster detections into `n_cols` columns by 1D k-means on x (centers
/// initialized at uniform quantiles; ties toward the lower column index).
/// Returns per-column point lists sorted by y.
fn cluster_columns(
    points: &[Point2],
    n_cols: usize,
) -> Result<Vec<Vec<Point2>>, Error> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite coords"));

    let mut centers: Vec<f64> = (0..n_cols)
        .map(|k| {
            let q = (k as f64 + 0.5) / n_cols as f64;
            xs[((q * xs.len() as f64) as usize).min(xs.len() - 1)]
        })
        .collect();

    let mut assignment = vec![0usize; points.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (idx, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (k, &c) in centers.iter().enumerate() {
                let d = math::abs(p.x - c);
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            if assignment[idx] != best {
                assignment[idx] = best;
                changed = true;
            }
        }
        let mut sums = vec![0.0f64; n_cols];
        let mut counts = vec![0usize; n_cols];
        for (idx, p) in points.iter().enumerate() {
            sums[assignment[idx]] += p.x;
            counts[assignment[idx]] += 1;
        }
        for k in 0..n_cols {
            if counts[k] > 0 {
                centers[k] = sums[k] / counts[k] as f64;
            }
        }
        if !changed {
            break;
        }
    }

    let mut columns: Vec<Vec<Point2>> = vec![Vec::new(); n_cols];
    for (idx, p) in points.iter().enumerate() {
        columns[assignment[idx]].push(*p);
    }
    if columns.iter().any(|c| c.is_empty()) {
        return Err(Error::extraction(
            "column clustering produced an empty column",
        ));
    }

    // Order columns left to right and points top to bottom.
    columns.sort_by(|a, b| {
        let ax = a.iter().map(|p| p.x).sum::<f64>() / a.len() as f64;
        let bx = b.iter().map(|p| p.x).sum::<f64>() / b.len() as f64;
        ax.partial_cmp(&bx).expect("finite coords")
    });
    for col in &mut columns {
        col.sort_by(|a, b| (a.y, a.x).partial_cmp(&(b.y, b.x)).expect("finite coords"));
    }
    Ok(columns)
}

/// Median of a slice (not numerically sorted in place).
fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Assign the `count` observed points of a column to ranks `0..n_rows`.
///
/// Uses the gap structure: a vertical gap close to `k` times the typical
/// spacing skips `k - 1` ranks. Falls back to uniform spreading when the gap
/// pattern is inconsistent with `n_rows`.
fn assign_ranks(ys: &[f64], n_rows: usize, typical_gap: f64) -> Vec<usize> {
    let count = ys.len();
    let mut ranks = Vec::with_capacity(count);
    ranks.push(0usize);
    for i in 1..count {
        let gap = ys[i] - ys[i - 1];
        let skip = if typical_gap > 0.0 {
            (math::round(gap / typical_gap) as usize).max(1)
        } else {
            1
        };
        ranks.push(ranks[i - 1] + skip);
    }
    let last = *ranks.last().expect("non-empty");
    if last >= n_rows {
        // Inconsistent gaps; spread uniformly instead.
        return (0..count)
            .map(|i| {
                if count == 1 {
                    0
                } else {
                    (i * (n_rows - 1) + (count - 1) / 2) / (count - 1)
                }
            })
            .collect();
    }
    ranks
}

/// Organize detections into `n_cols` columns x `n_rows` ranks, interpolating
/// points for missing ranks so every column has uniform length.
///
/// The induced profile entry `(k, c)` is the rank-`k` y coordinate of column
/// `c` normalized by the image height. Fails when there are fewer detections
/// than columns or a column comes out empty.
pub fn extract_structured_grid(
    set: &IntersectionSet,
    n_cols: usize,
    n_rows: usize,
) -> Result<StructuredGrid, Error> {
    if n_cols == 0 || n_rows == 0 {
        return Err(Error::invalid_input("grid dimensions must be >= 1"));
    }
    if set.is_empty() {
        return Err(Error::extraction("no intersections detected"));
    }
    if set.len() < n_cols {
        return Err(Error::extraction(
            "fewer intersections than requested columns",
        ));
    }

    let columns_raw = cluster_columns(set.points(), n_cols)?;

    // Typical vertical spacing between consecutive ranks, estimated from all
    // per-column gaps (robust to a few missing detections).
    let mut gaps: Vec<f64> = Vec::new();
    for col in &columns_raw {
        for pair in col.windows(2) {
            gaps.push(pair[1].y - pair[0].y);
        }
    }
    let typical_gap = if gaps.is_empty() { 0.0 } else { median(&gaps) };

    let mut columns: Vec<Vec<GridPoint>> = Vec::with_capacity(n_cols);
    for col in &columns_raw {
        // Collapse accidental near-duplicates if a column over-fills.
        let mut pts: Vec<Point2> = col.clone();
        while pts.len() > n_rows {
            let mut min_gap = f64::INFINITY;
            let mut min_at = 0usize;
            for (i, pair) in pts.windows(2).enumerate() {
                let gap = pair[1].y - pair[0].y;
                if gap < min_gap {
                    min_gap = gap;
                    min_at = i;
                }
            }
            let merged = Point2::new(
                0.5 * (pts[min_at].x + pts[min_at + 1].x),
                0.5 * (pts[min_at].y + pts[min_at + 1].y),
            );
            pts[min_at] = merged;
            pts.remove(min_at + 1);
        }

        let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
        let ranks = assign_ranks(&ys, n_rows, typical_gap);

        let mut slots: Vec<Option<GridPoint>> = vec![None; n_rows];
        for (p, &rank) in pts.iter().zip(&ranks) {
            slots[rank] = Some(GridPoint {
                x: p.x,
                y: p.y,
                observed: true,
            });
        }

        // Fill missing ranks by linear interpolation between the nearest
        // observed neighbors; extrapolate at the ends with the typical gap.
        let filled: Vec<GridPoint> = (0..n_rows)
            .map(|k| {
                if let Some(p) = slots[k] {
                    return p;
                }
                let below = (0..k).rev().find(|&i| slots[i].is_some());
                let above = ((k + 1)..n_rows).find(|&i| slots[i].is_some());
                match (below, above) {
                    (Some(b), Some(a)) => {
                        let (pb, pa) = (slots[b].unwrap(), slots[a].unwrap());
                        let t = (k - b) as f64 / (a - b) as f64;
                        GridPoint {
                            x: pb.x + t * (pa.x - pb.x),
                            y: pb.y + t * (pa.y - pb.y),
                            observed: false,
                        }
                    }
                    (Some(b), None) => {
                        let pb = slots[b].unwrap();
                        GridPoint {
                            x: pb.x,
                            y: pb.y + (k - b) as f64 * typical_gap,
                            observed: false,
                        }
                    }
                    (None, Some(a)) => {
                        let pa = slots[a].unwrap();
                        GridPoint {
                            x: pa.x,
                            y: pa.y - (a - k) as f64 * typical_gap,
                            observed: false,
                        }
                    }
                    (None, None) => unreachable!("columns are non-empty"),
                }
            })
            .collect();
        columns.push(filled);
    }

    let height = set.height() as f64;
    let profile = ColumnGrid::from_fn(n_rows, n_cols, |k, c| columns[c][k].y / height)?;
    Ok(StructuredGrid { columns, profile })
}

/// Column profiles only; see [`extract_structured_grid`].
pub fn intersections_to_column_profiles(
    set: &IntersectionSet,
    n_cols: usize,
    n_rows: usize,
) -> Result<ColumnGrid, Error> {
    extract_structured_grid(set, n_cols, n_rows).map(|s| s.profile)
}
