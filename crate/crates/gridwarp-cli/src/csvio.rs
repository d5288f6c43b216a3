//! CSV serialization for matrices, mappings, paths, height maps and ground
//! truth.
//!
//! All floats are written with Rust's shortest round-trip formatting, so
//! re-parsing reproduces the exact bit pattern and identical runs produce
//! identical bytes.

use std::path::Path;

use gridwarp_core::geometry::HeightMap;
use gridwarp_core::grid_match::{ColumnMapping, DistanceLandscape, RiverPath};
use gridwarp_core::image::IntersectionSet;
use gridwarp_core::linalg::Vec3;
use gridwarp_core::scene::GroundTruth;

use crate::CliError;

fn write_file(path: &Path, contents: String) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::pipeline(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::pipeline(format!("cannot read {}: {e}", path.display())))
}

/// Headerless row-major matrix CSV.
pub fn write_landscape(path: &Path, d: &DistanceLandscape) -> Result<(), CliError> {
    let mut out = String::new();
    for i in 0..d.rows() {
        let row: Vec<String> = (0..d.cols()).map(|j| d.get(i, j).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, out)
}

/// One mapping value per line.
pub fn write_mapping(path: &Path, mapping: &ColumnMapping) -> Result<(), CliError> {
    let mut out = String::new();
    for v in mapping.values() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    write_file(path, out)
}

/// One `i,j` step per line (1-based).
pub fn write_path(path: &Path, river: &RiverPath) -> Result<(), CliError> {
    let mut out = String::new();
    for &(i, j) in river.path.steps() {
        out.push_str(&format!("{i},{j}\n"));
    }
    write_file(path, out)
}

/// One `x,y` detection per line.
pub fn write_intersections(path: &Path, set: &IntersectionSet) -> Result<(), CliError> {
    let mut out = String::new();
    for p in set.points() {
        out.push_str(&format!("{},{}\n", p.x, p.y));
    }
    write_file(path, out)
}

/// Height map rows: `row,col,x,y,z,valid` (1-based indices; invalid nodes
/// write zeros with `valid = 0`).
pub fn write_heightmap(path: &Path, map: &HeightMap) -> Result<(), CliError> {
    let mut out = String::new();
    for (r, c, node) in map.iter() {
        match node {
            Some(p) => out.push_str(&format!("{r},{c},{},{},{},1\n", p.x, p.y, p.z)),
            None => out.push_str(&format!("{r},{c},0,0,0,0\n")),
        }
    }
    write_file(path, out)
}

pub fn read_heightmap(path: &Path) -> Result<HeightMap, CliError> {
    let text = read_file(path)?;
    let mut rows: Vec<(usize, usize, Option<Vec3>)> = Vec::new();
    let (mut n_rows, mut n_cols) = (0usize, 0usize);
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::pipeline(format!(
                "{}:{}: expected 6 fields, got {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let parse_idx = |s: &str| -> Result<usize, CliError> {
            s.trim()
                .parse()
                .map_err(|_| CliError::pipeline(format!("{}:{}: bad index", path.display(), lineno + 1)))
        };
        let parse_f = |s: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|_| CliError::pipeline(format!("{}:{}: bad number", path.display(), lineno + 1)))
        };
        let (r, c) = (parse_idx(fields[0])?, parse_idx(fields[1])?);
        let point = Vec3::new(parse_f(fields[2])?, parse_f(fields[3])?, parse_f(fields[4])?);
        let valid = fields[5].trim() == "1";
        if r == 0 || c == 0 {
            return Err(CliError::pipeline(format!(
                "{}:{}: node indices are 1-based",
                path.display(),
                lineno + 1
            )));
        }
        n_rows = n_rows.max(r);
        n_cols = n_cols.max(c);
        rows.push((r, c, valid.then_some(point)));
    }
    if rows.is_empty() {
        return Err(CliError::pipeline(format!(
            "{}: empty height map",
            path.display()
        )));
    }
    let mut map = HeightMap::empty(n_rows, n_cols);
    for (r, c, node) in rows {
        map.set_node(r, c, node);
    }
    Ok(map)
}

/// Ground truth rows: `row,col,x,y,z,u,v` (1-based indices).
pub fn write_ground_truth(path: &Path, truth: &GroundTruth) -> Result<(), CliError> {
    let mut out = String::new();
    for r in 1..=truth.n_rows() {
        for c in 1..=truth.n_cols() {
            let p = truth.node_point(r, c);
            let (u, v) = truth.pixel(r, c);
            out.push_str(&format!("{r},{c},{},{},{},{},{}\n", p.x, p.y, p.z, u, v));
        }
    }
    write_file(path, out)
}

/// Truth read back as a height map (validity always true) plus pixel list.
pub fn read_ground_truth(path: &Path) -> Result<(HeightMap, Vec<(f64, f64)>), CliError> {
    let text = read_file(path)?;
    let mut entries: Vec<(usize, usize, Vec3, (f64, f64))> = Vec::new();
    let (mut n_rows, mut n_cols) = (0usize, 0usize);
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CliError::pipeline(format!(
                "{}:{}: expected 7 fields, got {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|_| CliError::pipeline(format!("{}:{}: bad number", path.display(), lineno + 1)))
        };
        let idx = |s: &str| -> Result<usize, CliError> {
            s.trim()
                .parse()
                .map_err(|_| CliError::pipeline(format!("{}:{}: bad index", path.display(), lineno + 1)))
        };
        let (r, c) = (idx(fields[0])?, idx(fields[1])?);
        let point = Vec3::new(num(fields[2])?, num(fields[3])?, num(fields[4])?);
        let pixel = (num(fields[5])?, num(fields[6])?);
        n_rows = n_rows.max(r);
        n_cols = n_cols.max(c);
        entries.push((r, c, point, pixel));
    }
    if entries.is_empty() {
        return Err(CliError::pipeline(format!(
            "{}: empty ground truth",
            path.display()
        )));
    }
    let mut map = HeightMap::empty(n_rows, n_cols);
    let mut pixels = vec![(0.0, 0.0); n_rows * n_cols];
    for (r, c, point, pixel) in entries {
        map.set_node(r, c, Some(point));
        pixels[(r - 1) * n_cols + (c - 1)] = pixel;
    }
    Ok((map, pixels))
}

/// Bench rows: `n,mean_seconds`.
pub fn write_bench(path: &Path, points: &[(usize, f64)]) -> Result<(), CliError> {
    let mut out = String::new();
    for (n, secs) in points {
        out.push_str(&format!("{n},{secs}\n"));
    }
    write_file(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn heightmap_round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("map.csv");
        let mut map = HeightMap::empty(2, 3);
        map.set_node(1, 1, Some(Vec3::new(0.1, -0.25, 1e-9)));
        map.set_node(2, 3, Some(Vec3::new(-4.0, 0.333333333333333315, 2.5)));
        write_heightmap(&path, &map).unwrap();
        let back = read_heightmap(&path).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn malformed_heightmap_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,1,0,0,0\n").unwrap();
        assert!(read_heightmap(&path).is_err());
        std::fs::write(&path, "0,1,0,0,0,1\n").unwrap();
        assert!(read_heightmap(&path).is_err());
    }
}
