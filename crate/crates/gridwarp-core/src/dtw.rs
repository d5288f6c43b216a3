//! One-dimensional dynamic time warping under boundary, monotonicity and
//! step constraints, plus an exhaustive-enumeration oracle used for testing.

use alloc::{vec, vec::Vec};

use crate::error::Error;
use crate::math;

/// Pointwise cost between two aligned samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostKind {
    /// `|a - b|`.
    #[default]
    Absolute,
    /// `|a - b|^2`.
    Squared,
}

impl CostKind {
    /// Local cost of aligning sample `a` with sample `b`. Symmetric and
    /// nonnegative.
    #[inline]
    pub fn local_cost(self, a: f64, b: f64) -> f64 {
        let d = math::abs(a - b);
        match self {
            CostKind::Absolute => d,
            CostKind::Squared => d * d,
        }
    }
}

/// Endpoint discipline for a warping path over an `(m, n)` index grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathMode {
    /// Path starts at `(1, 1)` and ends at `(m, n)`.
    #[default]
    Fixed,
    /// The first index is pinned to rows `1` and `m`; the second index is
    /// free at both ends.
    FreeJ,
}

/// A non-empty sequence of finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence(Vec<f64>);

impl Sequence {
    /// Build a sequence, rejecting empty input and non-finite samples.
    pub fn new(values: Vec<f64>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::invalid_input("sequence must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("sequence samples must be finite"));
        }
        Ok(Self(values))
    }

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

/// An alignment path: 1-based index pairs over an `(m, n)` index grid.
///
/// Consecutive steps move by `(1,0)`, `(0,1)` or `(1,1)`, which makes the
/// path monotone in both indices; [`WarpPath::is_valid`] checks this
/// together with the boundary conditions of a [`PathMode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpPath {
    steps: Vec<(usize, usize)>,
    dims: (usize, usize),
}

impl WarpPath {
    /// Wrap a raw step list. No validation happens here; call
    /// [`WarpPath::is_valid`] to check the constraints.
    pub fn new(steps: Vec<(usize, usize)>, dims: (usize, usize)) -> Self {
        Self { steps, dims }
    }

    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// True iff the boundary, monotonicity and step constraints all hold for
    /// the given endpoint mode.
    pub fn is_valid(&self, mode: PathMode) -> bool {
        let (m, n) = self.dims;
        let (Some(&first), Some(&last)) = (self.steps.first(), self.steps.last()) else {
            return false;
        };
        if !self
            .steps
            .iter()
            .all(|&(i, j)| (1..=m).contains(&i) && (1..=n).contains(&j))
        {
            return false;
        }
        let boundary_ok = match mode {
            PathMode::Fixed => first == (1, 1) && last == (m, n),
            PathMode::FreeJ => first.0 == 1 && last.0 == m,
        };
        if !boundary_ok {
            return false;
        }
        // The admissible step set excludes (0,0) and any negative move, so
        // checking it also enforces monotonicity.
        self.steps.windows(2).all(|w| {
            let di = w[1].0 as i64 - w[0].0 as i64;
            let dj = w[1].1 as i64 - w[0].1 as i64;
            matches!((di, dj), (1, 0) | (0, 1) | (1, 1))
        })
    }
}

/// Result of a DTW alignment: the minimal cost and one path attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct DtwAlignment {
    pub cost: f64,
    pub path: WarpPath,
}

// Predecessor directions for backtracking.
const DIR_DIAG: u8 = 0;
const DIR_VERT: u8 = 1;
const DIR_HORIZ: u8 = 2;
const DIR_START: u8 = 3;

/// Minimum-cost fixed-endpoint alignment between two sequences.
///
/// The returned cost is the minimum of the summed local cost over all
/// admissible paths, and the returned path attains it. Non-empty input is
/// guaranteed by [`Sequence`], so this cannot fail.
///
/// Ties in the recursion are broken deterministically: diagonal first, then
/// the vertical predecessor `(i-1, j)`, then the horizontal one `(i, j-1)`.
pub fn dtw(x: &Sequence, y: &Sequence, kind: CostKind) -> DtwAlignment {
    let xs = x.values();
    let ys = y.values();
    let (m, n) = (xs.len(), ys.len());

    let mut acc = vec![0.0f64; m * n];
    let mut dir = vec![DIR_START; m * n];

    for i in 0..m {
        for j in 0..n {
            let cost = kind.local_cost(xs[i], ys[j]);
            let idx = i * n + j;
            if i == 0 && j == 0 {
                acc[idx] = cost;
            } else if i == 0 {
                acc[idx] = cost + acc[idx - 1];
                dir[idx] = DIR_HORIZ;
            } else if j == 0 {
                acc[idx] = cost + acc[idx - n];
                dir[idx] = DIR_VERT;
            } else {
                let diag = acc[idx - n - 1];
                let vert = acc[idx - n];
                let horiz = acc[idx - 1];
                let (best, d) = if diag <= vert && diag <= horiz {
                    (diag, DIR_DIAG)
                } else if vert <= horiz {
                    (vert, DIR_VERT)
                } else {
                    (horiz, DIR_HORIZ)
                };
                acc[idx] = cost + best;
                dir[idx] = d;
            }
        }
    }

    let mut steps = Vec::new();
    let (mut i, mut j) = (m - 1, n - 1);
    loop {
        steps.push((i + 1, j + 1));
        match dir[i * n + j] {
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

    DtwAlignment {
        cost: acc[m * n - 1],
        path: WarpPath::new(steps, (m, n)),
    }
}

/// Cost-only DTW between two sequences.
///
/// Exactly [`dtw`]'s cost without materializing the path; use it when
/// building distance matrices.
pub fn dtw_cost(x: &Sequence, y: &Sequence, kind: CostKind) -> f64 {
    dtw_cost_only(x.values(), y.values(), kind)
}

/// Cost-only DTW over raw slices with a rolling two-row buffer.
///
/// Same recursion as [`dtw`]; used where the path is not needed (building
/// distance landscapes), so no `O(m*n)` allocation happens per pair.
pub(crate) fn dtw_cost_only(xs: &[f64], ys: &[f64], kind: CostKind) -> f64 {
    let n = ys.len();
    let mut prev = vec![0.0f64; n];
    let mut curr = vec![0.0f64; n];

    for (i, &xv) in xs.iter().enumerate() {
        for j in 0..n {
            let cost = kind.local_cost(xv, ys[j]);
            curr[j] = if i == 0 && j == 0 {
                cost
            } else if i == 0 {
                cost + curr[j - 1]
            } else if j == 0 {
                cost + prev[j]
            } else {
                cost + prev[j].min(prev[j - 1]).min(curr[j - 1])
            };
        }
        core::mem::swap(&mut prev, &mut curr);
    }
    prev[n - 1]
}

/// Maximum `m + n` accepted by [`dtw_bruteforce`].
pub const BRUTEFORCE_GUARD: usize = 16;

/// Exact minimum path cost by exhaustive enumeration of every admissible
/// fixed-endpoint path.
///
/// This is the testing oracle for [`dtw`]; it shares nothing with the
/// dynamic-programming recursion. Inputs with `m + n > 16` are refused.
pub fn dtw_bruteforce(x: &Sequence, y: &Sequence, kind: CostKind) -> Result<f64, Error> {
    let (m, n) = (x.len(), y.len());
    if m + n > BRUTEFORCE_GUARD {
        return Err(Error::SizeGuardExceeded {
            limit: BRUTEFORCE_GUARD,
            actual: m + n,
        });
    }

    fn walk(xs: &[f64], ys: &[f64], kind: CostKind, i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + kind.local_cost(xs[i], ys[j]);
        if i == xs.len() - 1 && j == ys.len() - 1 {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        if i + 1 < xs.len() {
            walk(xs, ys, kind, i + 1, j, acc, best);
        }
        if j + 1 < ys.len() {
            walk(xs, ys, kind, i, j + 1, acc, best);
        }
        if i + 1 < xs.len() && j + 1 < ys.len() {
            walk(xs, ys, kind, i + 1, j + 1, acc, best);
        }
    }

    let mut best = f64::INFINITY;
    walk(x.values(), y.values(), kind, 0, 0, 0.0, &mut best);
    Ok(best)
}
