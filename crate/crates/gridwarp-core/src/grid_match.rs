//! Column-to-column distance landscapes and minimum-cost monotone path
//! extraction.
//!
//! Two grids are compared column by column: every pair of column profiles is
//! scored with 1D DTW, giving a nonnegative matrix that reads as a height
//! field ("distance landscape") over (column of A) x (column of B). The
//! correspondence between the grids is the minimum-cost monotone path through
//! that landscape, the valley a river would follow, extracted exactly by
//! dynamic programming or approximately by a cheap greedy walk. Applying the
//! identical procedure to the transposed grids yields the row correspondence.

use alloc::{vec, vec::Vec};

use crate::dtw::{self, CostKind, PathMode, WarpPath};
use crate::error::Error;

/// A `rows x cols` real matrix whose columns are vertical profiles.
///
/// Storage is row-major and 0-indexed; the 1-based indexing of the domain
/// model appears only in paths and mappings.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnGrid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ColumnGrid {
    /// Build from row-major data. Dimensions must be at least 1x1 and every
    /// entry finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid_input("grid dimensions must be >= 1"));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid_input("grid data length must equal rows*cols"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("grid entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build by evaluating `f(row, col)` over the grid.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, Error> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// Copy of column `col` (the vertical profile).
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn transposed(&self) -> ColumnGrid {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        ColumnGrid {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Matrix of pairwise column DTW distances between two grids.
///
/// Entry `(i, j)` (0-indexed) is the distance between column `i` of the
/// first grid and column `j` of the second; all entries are finite and
/// nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceLandscape {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistanceLandscape {
    /// Build from row-major data, validating nonnegativity and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid_input("landscape dimensions must be >= 1"));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid_input(
                "landscape data length must equal rows*cols",
            ));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid_input(
                "landscape entries must be finite and nonnegative",
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Minimum-cost monotone path through a distance landscape, together with
/// the endpoint mode it was extracted under and its summed cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RiverPath {
    pub path: WarpPath,
    pub mode: PathMode,
    pub cost: f64,
}

/// Real-valued monotone column correspondence induced by a path: entry `i`
/// (0-indexed) is the mean 1-based `j` index the path visits at `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMapping(Vec<f64>);

impl ColumnMapping {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// DTW distance between every pair of column profiles.
///
/// `a` provides the landscape rows, `b` the columns; row counts of the two
/// grids may differ. Cells are independent, so the result does not depend on
/// evaluation order.
pub fn column_distance_matrix(a: &ColumnGrid, b: &ColumnGrid, kind: CostKind) -> DistanceLandscape {
    let a_cols: Vec<Vec<f64>> = (0..a.cols()).map(|c| a.column(c)).collect();
    let b_cols: Vec<Vec<f64>> = (0..b.cols()).map(|c| b.column(c)).collect();
    let mut data = Vec::with_capacity(a_cols.len() * b_cols.len());
    for ac in &a_cols {
        for bc in &b_cols {
            data.push(dtw::dtw_cost_only(ac, bc, kind));
        }
    }
    DistanceLandscape {
        rows: a_cols.len(),
        cols: b_cols.len(),
        data,
    }
}

/// Per-row argmin baseline: entry `i` is the smallest 1-based `j` minimizing
/// `D[i][j]`.
///
/// Unlike path-derived mappings this may jump non-monotonically when the
/// landscape is noisy; it is returned as a raw index list and serves as the
/// baseline the river path improves upon.
pub fn local_min_mapping(d: &DistanceLandscape) -> Vec<usize> {
    (0..d.rows())
        .map(|i| {
            let mut best_j = 0;
            let mut best = d.get(i, 0);
            for j in 1..d.cols() {
                let v = d.get(i, j);
                if v < best {
                    best = v;
                    best_j = j;
                }
            }
            best_j + 1
        })
        .collect()
}

const DIR_DIAG: u8 = 0;
const DIR_VERT: u8 = 1;
const DIR_HORIZ: u8 = 2;
const DIR_START: u8 = 3;

/// Globally minimum-cost monotone path through the landscape.
///
/// Fixed mode pins the path to `(1,1)..(q,s)`. Free mode initializes the
/// whole first row (free start) and backtracks from the cheapest cell of the
/// last row (free end), ties broken toward the smallest column. Backtracking
/// prefers the diagonal, then the vertical, then the horizontal predecessor.
pub fn river_path_dp(d: &DistanceLandscape, mode: PathMode) -> RiverPath {
    let (q, s) = (d.rows(), d.cols());
    let mut acc = vec![0.0f64; q * s];
    let mut dir = vec![DIR_START; q * s];

    for i in 0..q {
        for j in 0..s {
            let cell = d.get(i, j);
            let idx = i * s + j;
            if i == 0 {
                match mode {
                    PathMode::Fixed => {
                        if j == 0 {
                            acc[idx] = cell;
                        } else {
                            acc[idx] = cell + acc[idx - 1];
                            dir[idx] = DIR_HORIZ;
                        }
                    }
                    // Free start: every first-row cell begins a path. A
                    // horizontal move inside row 1 only prepends nonnegative
                    // cells to a path that could start later, so dropping it
                    // never loses the optimum.
                    PathMode::FreeJ => acc[idx] = cell,
                }
            } else if j == 0 {
                acc[idx] = cell + acc[idx - s];
                dir[idx] = DIR_VERT;
            } else {
                let diag = acc[idx - s - 1];
                let vert = acc[idx - s];
                let horiz = acc[idx - 1];
                let (best, dd) = if diag <= vert && diag <= horiz {
                    (diag, DIR_DIAG)
                } else if vert <= horiz {
                    (vert, DIR_VERT)
                } else {
                    (horiz, DIR_HORIZ)
                };
                acc[idx] = cell + best;
                dir[idx] = dd;
            }
        }
    }

    let end_j = match mode {
        PathMode::Fixed => s - 1,
        PathMode::FreeJ => {
            let base = (q - 1) * s;
            let mut best_j = 0;
            for j in 1..s {
                if acc[base + j] < acc[base + best_j] {
                    best_j = j;
                }
            }
            best_j
        }
    };

    let mut steps = Vec::new();
    let (mut i, mut j) = (q - 1, end_j);
    loop {
        steps.push((i + 1, j + 1));
        match dir[i * s + j] {
            DIR_DIAG => {
                i -= 1;
                j -= 1;
            }
            DIR_VERT => i -= 1,
            DIR_HORIZ => j -= 1,
            _ => break,
        }
    }
    steps.reverse();

    RiverPath {
        path: WarpPath::new(steps, (q, s)),
        mode,
        cost: acc[(q - 1) * s + end_j],
    }
}

/// Greedy valley walk from a 1-based starting cell.
///
/// From each cell the walk moves to the cheapest of `(i+1,j)`, `(i,j+1)`,
/// `(i+1,j+1)` (ties: diagonal, then down, then right) until it reaches
/// `(q,s)`. Much cheaper than [`river_path_dp`] but without its optimality
/// guarantee: its cost is an upper bound on the DP cost for any start
/// consistent with the DP's endpoint mode. The returned `mode` tag reflects
/// the start cell (`Fixed` from `(1,1)`, `FreeJ` otherwise); starts below
/// the first row produce paths admissible in neither mode.
pub fn river_path_greedy(d: &DistanceLandscape, start: (usize, usize)) -> Result<RiverPath, Error> {
    let (q, s) = (d.rows(), d.cols());
    if start.0 < 1 || start.0 > q || start.1 < 1 || start.1 > s {
        return Err(Error::invalid_input("greedy start cell out of range"));
    }
    let (mut i, mut j) = (start.0 - 1, start.1 - 1);
    let mut cost = d.get(i, j);
    let mut steps = vec![(i + 1, j + 1)];

    while (i, j) != (q - 1, s - 1) {
        // Candidate forward moves in tie-break preference order.
        let mut best: Option<((usize, usize), f64)> = None;
        let candidates = [
            (i + 1 < q && j + 1 < s, (i + 1, j + 1)),
            (i + 1 < q, (i + 1, j)),
            (j + 1 < s, (i, j + 1)),
        ];
        for (available, cell) in candidates {
            if !available {
                continue;
            }
            let v = d.get(cell.0, cell.1);
            if best.map_or(true, |(_, bv)| v < bv) {
                best = Some((cell, v));
            }
        }
        let ((ni, nj), v) = best.expect("a forward neighbor always exists before (q,s)");
        i = ni;
        j = nj;
        cost += v;
        steps.push((i + 1, j + 1));
    }

    let mode = if start == (1, 1) {
        PathMode::Fixed
    } else {
        PathMode::FreeJ
    };
    Ok(RiverPath {
        path: WarpPath::new(steps, (q, s)),
        mode,
        cost,
    })
}

/// Default greedy start: the cheapest cell of the first landscape row
/// (1-based; ties toward the smallest column).
pub fn greedy_default_start(d: &DistanceLandscape) -> (usize, usize) {
    let mut best_j = 0;
    for j in 1..d.cols() {
        if d.get(0, j) < d.get(0, best_j) {
            best_j = j;
        }
    }
    (1, best_j + 1)
}

/// Collapse a path into the induced column correspondence: for each first
/// index `i` the mean of the 1-based `j` values the path visits there.
///
/// The path's boundary and step constraints guarantee every `i` in `1..=q`
/// is visited, and monotonicity of the path makes the output non-decreasing.
pub fn path_to_mapping(path: &RiverPath) -> ColumnMapping {
    let (q, _) = path.path.dims();
    let mut sums = vec![0.0f64; q];
    let mut counts = vec![0usize; q];
    for &(i, j) in path.path.steps() {
        sums[i - 1] += j as f64;
        counts[i - 1] += 1;
    }
    let values = sums
        .iter()
        .zip(&counts)
        .map(|(&sum, &count)| {
            debug_assert!(count > 0, "admissible paths visit every row index");
            sum / count as f64
        })
        .collect();
    ColumnMapping(values)
}

/// Maximum `q + s` accepted by [`enumerate_paths_oracle`].
pub const ENUMERATION_GUARD: usize = 14;

/// Exact optimal path cost by exhaustive enumeration of every admissible
/// path in the given mode.
///
/// Testing oracle for [`river_path_dp`]; refuses landscapes with
/// `q + s > 14`.
pub fn enumerate_paths_oracle(d: &DistanceLandscape, mode: PathMode) -> Result<f64, Error> {
    let (q, s) = (d.rows(), d.cols());
    if q + s > ENUMERATION_GUARD {
        return Err(Error::SizeGuardExceeded {
            limit: ENUMERATION_GUARD,
            actual: q + s,
        });
    }

    fn walk(d: &DistanceLandscape, mode: PathMode, i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + d.get(i, j);
        let at_last_row = i == d.rows() - 1;
        let complete = match mode {
            PathMode::Fixed => at_last_row && j == d.cols() - 1,
            PathMode::FreeJ => at_last_row,
        };
        if complete && acc < *best {
            *best = acc;
        }
        if i + 1 < d.rows() {
            walk(d, mode, i + 1, j, acc, best);
        }
        if j + 1 < d.cols() {
            walk(d, mode, i, j + 1, acc, best);
        }
        if i + 1 < d.rows() && j + 1 < d.cols() {
            walk(d, mode, i + 1, j + 1, acc, best);
        }
    }

    let mut best = f64::INFINITY;
    match mode {
        PathMode::Fixed => walk(d, mode, 0, 0, 0.0, &mut best),
        PathMode::FreeJ => {
            for j0 in 0..s {
                walk(d, mode, 0, j0, 0.0, &mut best);
            }
        }
    }
    Ok(best)
}

/// Options for [`match_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOptions {
    pub cost: CostKind,
    pub mode: PathMode,
}

impl Default for MatchOptions {
    /// Absolute cost with fixed endpoints. Fixed is the right default when
    /// the grids are known to share dimensions (shallow valleys then cannot
    /// slip at the ends); switch to free endpoints when one grid may be
    /// offset by whole columns.
    fn default() -> Self {
        Self {
            cost: CostKind::Absolute,
            mode: PathMode::Fixed,
        }
    }
}

/// Column and row correspondences between two grids, with the landscapes and
/// paths they came from for inspection.
#[derive(Debug, Clone)]
pub struct GridMatchResult {
    pub column_mapping: ColumnMapping,
    pub row_mapping: ColumnMapping,
    pub d_cols: DistanceLandscape,
    pub d_rows: DistanceLandscape,
    pub column_path: RiverPath,
    pub row_path: RiverPath,
}

/// Match two grids column-wise and row-wise.
///
/// Columns: distance landscape over column profiles, optimal path, induced
/// mapping. Rows: the identical procedure on the transposed grids.
pub fn match_grid(a: &ColumnGrid, b: &ColumnGrid, options: MatchOptions) -> GridMatchResult {
    let d_cols = column_distance_matrix(a, b, options.cost);
    let column_path = river_path_dp(&d_cols, options.mode);
    let column_mapping = path_to_mapping(&column_path);

    let d_rows = column_distance_matrix(&a.transposed(), &b.transposed(), options.cost);
    let row_path = river_path_dp(&d_rows, options.mode);
    let row_mapping = path_to_mapping(&row_path);

    GridMatchResult {
        column_mapping,
        row_mapping,
        d_cols,
        d_rows,
        column_path,
        row_path,
    }
}
