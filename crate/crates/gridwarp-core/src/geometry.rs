//! Pinhole camera model, display/ground plane geometry, ray construction and
//! least-squares triangulation of matched grid nodes.
//!
//! World frame convention: z up, nominal ground plane at `z = 0`, display
//! plane at `z = h`. Display nodes emit light along the display normal
//! (straight down), so each node defines a vertical ray; the camera ray of a
//! matched pixel intersects it at the reconstructed ground point, whose `z`
//! is the terrain height at that node. Grid node indices are 1-based, like
//! the path indices in [`crate::grid_match`].

use alloc::{vec, vec::Vec};

use crate::error::Error;
use crate::linalg::{Mat3, Vec3};
use crate::math;

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub skew: f64,
}

impl Intrinsics {
    /// Zero-skew intrinsics. Focal lengths must be positive.
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self, Error> {
        if !(fx > 0.0) || !(fy > 0.0) {
            return Err(Error::invalid_input("focal lengths must be positive"));
        }
        if ![fx, fy, cx, cy].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid_input("intrinsics must be finite"));
        }
        Ok(Self { fx, fy, cx, cy, skew: 0.0 })
    }

    pub fn with_skew(mut self, skew: f64) -> Self {
        self.skew = skew;
        self
    }

    /// The calibration matrix.
    pub fn matrix(&self) -> Mat3 {
        Mat3::from_rows(
            [self.fx, self.skew, self.cx],
            [0.0, self.fy, self.cy],
            [0.0, 0.0, 1.0],
        )
    }

    pub(crate) fn inverse_matrix(&self) -> Mat3 {
        self.matrix()
            .inverse()
            .expect("calibration matrix is upper triangular with positive diagonal")
    }
}

/// Rigid world-to-camera transform: `x_cam = R * X + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    rotation: Mat3,
    translation: Vec3,
}

impl Pose {
    const ORTHONORMALITY_TOL: f64 = 1e-9;

    /// Validates that `rotation` is a proper rotation: `R^T R = I` and
    /// `det R = +1`, both within `1e-9`.
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self, Error> {
        let gram = rotation.transpose().mul_mat(&rotation);
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { 1.0 } else { 0.0 };
                if math::abs(gram.get(r, c) - expect) > Self::ORTHONORMALITY_TOL {
                    return Err(Error::invalid_input("rotation is not orthonormal"));
                }
            }
        }
        if math::abs(rotation.det() - 1.0) > Self::ORTHONORMALITY_TOL {
            return Err(Error::invalid_input("rotation determinant must be +1"));
        }
        if !translation.is_finite() {
            return Err(Error::invalid_input("translation must be finite"));
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Mat3::IDENTITY,
            translation: Vec3::ZERO,
        }
    }

    /// Camera at `eye` with the optical axis through `target`.
    ///
    /// `up_hint` fixes the roll: image u grows along `normalize(z_cam x up)`
    /// and image v along `z_cam x x_cam`, so v points "down" relative to the
    /// hint, the usual image convention.
    pub fn look_at(eye: Vec3, target: Vec3, up_hint: Vec3) -> Result<Self, Error> {
        let forward = (target - eye)
            .normalized()
            .ok_or_else(|| Error::invalid_input("look_at: eye and target coincide"))?;
        let x_cam = forward
            .cross(up_hint)
            .normalized()
            .ok_or_else(|| Error::invalid_input("look_at: up is parallel to view direction"))?;
        let y_cam = forward.cross(x_cam);
        let rotation = Mat3::from_rows(
            [x_cam.x, x_cam.y, x_cam.z],
            [y_cam.x, y_cam.y, y_cam.z],
            [forward.x, forward.y, forward.z],
        );
        let translation = rotation.mul_vec(-eye);
        Pose::new(rotation, translation)
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    /// Camera center in world coordinates: `-R^T t`.
    pub fn camera_center(&self) -> Vec3 {
        self.rotation.transpose().mul_vec(-self.translation)
    }

    /// Camera optical axis (the +z camera direction) in world coordinates.
    pub fn optical_axis(&self) -> Vec3 {
        self.rotation.row(2)
    }
}

/// A ray with unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    origin: Vec3,
    direction: Vec3,
}

impl Ray {
    /// Normalizes `direction`; rejects (near-)zero or non-finite input.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self, Error> {
        if !origin.is_finite() || !direction.is_finite() {
            return Err(Error::invalid_input("ray components must be finite"));
        }
        let direction = direction
            .normalized()
            .ok_or_else(|| Error::invalid_input("ray direction must be nonzero"))?;
        Ok(Self { origin, direction })
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    /// Unit direction (||d|| = 1 to within 1e-12 by construction).
    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn point_at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// Plane `{X : normal . X = offset}` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    normal: Vec3,
    offset: f64,
}

impl Plane {
    /// Normalizes `normal` (rescaling `offset` accordingly).
    pub fn new(normal: Vec3, offset: f64) -> Result<Self, Error> {
        let norm = normal.norm();
        let unit = normal
            .normalized()
            .ok_or_else(|| Error::invalid_input("plane normal must be nonzero"))?;
        if !offset.is_finite() {
            return Err(Error::invalid_input("plane offset must be finite"));
        }
        Ok(Self {
            normal: unit,
            offset: offset / norm,
        })
    }

    /// Horizontal plane `z = height`.
    pub fn horizontal(height: f64) -> Self {
        Self {
            normal: Vec3::new(0.0, 0.0, 1.0),
            offset: height,
        }
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// The displayed grid: `n_rows x n_cols` nodes on the display plane
/// `z = height`, spaced `spacing` meters apart, node (1,1) at `origin`.
///
/// Node (r, c) sits at `origin + ((c-1) * spacing, (r-1) * spacing, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplayGrid {
    pub n_rows: usize,
    pub n_cols: usize,
    pub spacing: f64,
    pub origin: Vec3,
    pub height: f64,
}

impl DisplayGrid {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        spacing: f64,
        origin: Vec3,
        height: f64,
    ) -> Result<Self, Error> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::invalid_input("grid must have at least one node"));
        }
        if !(spacing > 0.0) {
            return Err(Error::invalid_input("grid spacing must be positive"));
        }
        if !(height > 0.0) {
            return Err(Error::invalid_input("display height must be positive"));
        }
        if math::abs(origin.z - height) > 1e-12 {
            return Err(Error::invalid_input(
                "grid origin must lie on the display plane z = height",
            ));
        }
        Ok(Self { n_rows, n_cols, spacing, origin, height })
    }

    /// Grid centered on `(center_x, center_y)` at the display height.
    pub fn centered(
        n_rows: usize,
        n_cols: usize,
        spacing: f64,
        center_x: f64,
        center_y: f64,
        height: f64,
    ) -> Result<Self, Error> {
        let origin = Vec3::new(
            center_x - 0.5 * (n_cols.saturating_sub(1)) as f64 * spacing,
            center_y - 0.5 * (n_rows.saturating_sub(1)) as f64 * spacing,
            height,
        );
        Self::new(n_rows, n_cols, spacing, origin, height)
    }

    /// World position of the 1-based node `(row, col)`.
    pub fn node_position(&self, row: usize, col: usize) -> Result<Vec3, Error> {
        if row < 1 || row > self.n_rows || col < 1 || col > self.n_cols {
            return Err(Error::invalid_input("grid node out of range"));
        }
        Ok(self.origin
            + Vec3::new(
                (col - 1) as f64 * self.spacing,
                (row - 1) as f64 * self.spacing,
                0.0,
            ))
    }
}

/// Grid-indexed reconstructed 3D points with a per-node validity mask
/// (`None` = reconstruction failed for that node).
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap {
    n_rows: usize,
    n_cols: usize,
    nodes: Vec<Option<Vec3>>,
}

impl HeightMap {
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            nodes: vec![None; n_rows * n_cols],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Access by 1-based node index.
    pub fn node(&self, row: usize, col: usize) -> Option<Vec3> {
        self.nodes[(row - 1) * self.n_cols + (col - 1)]
    }

    /// Set by 1-based node index.
    pub fn set_node(&mut self, row: usize, col: usize, point: Option<Vec3>) {
        self.nodes[(row - 1) * self.n_cols + (col - 1)] = point;
    }

    pub fn valid_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_some()).count()
    }

    pub fn total_count(&self) -> usize {
        self.nodes.len()
    }

    /// Iterate `(row, col, node)` with 1-based indices, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Option<Vec3>)> + '_ {
        let cols = self.n_cols;
        self.nodes
            .iter()
            .enumerate()
            .map(move |(idx, node)| (idx / cols + 1, idx % cols + 1, *node))
    }
}

const PROJECTION_EPS: f64 = 1e-12;
const PARALLEL_EPS: f64 = 1e-12;
/// Rays meeting at less than this angle (radians) are rejected as
/// ill-conditioned: at desk scale this keeps the conditioning error of the
/// least-squares point below the 1e-9 m exactness budget.
const MIN_RAY_ANGLE: f64 = 1e-6;

/// Project a world point to pixel coordinates: `lambda (u,v,1)^T = K (R X + t)`.
pub fn project(intrinsics: &Intrinsics, pose: &Pose, point: Vec3) -> Result<(f64, f64), Error> {
    let cam = pose.rotation().mul_vec(point) + pose.translation();
    let hom = intrinsics.matrix().mul_vec(cam);
    if math::abs(hom.z) < PROJECTION_EPS {
        return Err(Error::DegenerateProjection);
    }
    Ok((hom.x / hom.z, hom.y / hom.z))
}

/// Viewing ray of a pixel: origin at the camera center, direction
/// `normalize(R^T K^-1 (u, v, 1))`.
pub fn back_project(intrinsics: &Intrinsics, pose: &Pose, pixel: (f64, f64)) -> Ray {
    let dir_cam = intrinsics
        .inverse_matrix()
        .mul_vec(Vec3::new(pixel.0, pixel.1, 1.0));
    let dir_world = pose.rotation().transpose().mul_vec(dir_cam);
    Ray::new(pose.camera_center(), dir_world)
        .expect("K^-1 (u,v,1) has unit z component in camera frame, never zero")
}

/// Ray cast by a display node: starts at the node and travels along the
/// display normal toward the ground, `(0, 0, -1)`.
pub fn display_ray(grid: &DisplayGrid, node: (usize, usize)) -> Result<Ray, Error> {
    let origin = grid.node_position(node.0, node.1)?;
    Ray::new(origin, Vec3::new(0.0, 0.0, -1.0))
}

/// Intersection of a ray with a plane, requiring a nonnegative ray parameter.
pub fn ray_plane_intersect(ray: &Ray, plane: &Plane) -> Result<Vec3, Error> {
    let denom = plane.normal().dot(ray.direction());
    if math::abs(denom) < PARALLEL_EPS {
        return Err(Error::RayParallelToPlane);
    }
    let t = (plane.offset() - plane.normal().dot(ray.origin())) / denom;
    if t < 0.0 {
        return Err(Error::IntersectionBehindOrigin);
    }
    Ok(ray.point_at(t))
}

/// Least-squares intersection of two rays: the midpoint of their common
/// perpendicular, plus the RMS of the two orthogonal line distances.
///
/// Line parameters are unrestricted (the minimizing points may lie behind
/// either origin). Near-parallel lines are rejected with the angle between
/// them attached.
pub fn two_ray_lsq_point(a: &Ray, b: &Ray) -> Result<(Vec3, f64), Error> {
    let da = a.direction();
    let db = b.direction();
    let sin_angle = da.cross(db).norm();
    if sin_angle < MIN_RAY_ANGLE {
        return Err(Error::IllConditionedRays {
            angle_rad: math::asin_clamped(sin_angle),
        });
    }

    let w = b.origin() - a.origin();
    let d = da.dot(db);
    let denom = 1.0 - d * d; // = sin^2(angle), bounded away from 0 above
    let ta = (w.dot(da) - d * w.dot(db)) / denom;
    let tb = (d * w.dot(da) - w.dot(db)) / denom;

    let pa = a.point_at(ta);
    let pb = b.point_at(tb);
    let midpoint = (pa + pb) * 0.5;
    // The midpoint is equidistant from both lines, so the RMS of the two
    // distances equals half the perpendicular gap.
    let residual = 0.5 * (pb - pa).norm();
    Ok((midpoint, residual))
}

/// Triangulate matched (display node, image pixel) pairs into a height map.
///
/// Each match intersects the camera ray of the pixel with the vertical ray
/// of the display node; `z` of the result is the reconstructed terrain
/// height at that node. Failures (out-of-range node, ill-conditioned rays)
/// leave the node invalid instead of aborting. If a node appears in several
/// matches, the first successful one wins.
pub fn triangulate_matches(
    matches: &[((usize, usize), (f64, f64))],
    intrinsics: &Intrinsics,
    pose: &Pose,
    grid: &DisplayGrid,
) -> HeightMap {
    let mut map = HeightMap::empty(grid.n_rows, grid.n_cols);
    for &((row, col), pixel) in matches {
        if row < 1 || row > grid.n_rows || col < 1 || col > grid.n_cols {
            continue;
        }
        if map.node(row, col).is_some() {
            continue;
        }
        let Ok(node_ray) = display_ray(grid, (row, col)) else {
            continue;
        };
        let camera_ray = back_project(intrinsics, pose, pixel);
        if let Ok((point, _residual)) = two_ray_lsq_point(&camera_ray, &node_ray) {
            map.set_node(row, col, Some(point));
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn default_intrinsics() -> Intrinsics {
        Intrinsics::new(100.0, 100.0, 50.0, 50.0).unwrap()
    }

    #[test]
    fn optical_axis_projects_to_principal_point() {
        let k = default_intrinsics();
        let (u, v) = project(&k, &Pose::identity(), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!((u, v), (50.0, 50.0));
    }

    #[test]
    fn projection_scales_with_focal_length() {
        let k = default_intrinsics();
        let (u, _) = project(&k, &Pose::identity(), Vec3::new(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(u, 150.0);
    }

    #[test]
    fn point_on_principal_plane_is_degenerate() {
        let k = default_intrinsics();
        assert!(matches!(
            project(&k, &Pose::identity(), Vec3::new(1.0, 0.0, 0.0)),
            Err(Error::DegenerateProjection)
        ));
    }

    #[test]
    fn back_projection_through_principal_point_is_axis() {
        let ray = back_project(&default_intrinsics(), &Pose::identity(), (50.0, 50.0));
        assert_eq!(ray.origin(), Vec3::ZERO);
        assert!((ray.direction() - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn camera_center_shifts_with_translation() {
        let t = Vec3::new(0.3, -0.2, 0.9);
        let pose = Pose::new(Mat3::IDENTITY, t).unwrap();
        let ray = back_project(&default_intrinsics(), &pose, (12.0, 34.0));
        assert!((ray.origin() - (-t)).norm() < 1e-15);
    }

    #[test]
    fn pose_rejects_non_rotation() {
        let scaled = Mat3::from_rows([2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]);
        assert!(Pose::new(scaled, Vec3::ZERO).is_err());
        // A reflection has determinant -1.
        let reflect = Mat3::from_rows([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]);
        assert!(Pose::new(reflect, Vec3::ZERO).is_err());
    }

    #[test]
    fn display_rays_are_vertical_and_parallel() {
        let grid = DisplayGrid::new(3, 3, 0.5, Vec3::new(0.0, 0.0, 0.03), 0.03).unwrap();
        let r11 = display_ray(&grid, (1, 1)).unwrap();
        assert_eq!(r11.origin(), Vec3::new(0.0, 0.0, 0.03));
        assert_eq!(r11.direction(), Vec3::new(0.0, 0.0, -1.0));
        let r12 = display_ray(&grid, (1, 2)).unwrap();
        assert_eq!(r12.origin(), Vec3::new(0.5, 0.0, 0.03));
        assert_eq!(r12.direction(), r11.direction());
        assert!(display_ray(&grid, (4, 1)).is_err());
    }

    #[test]
    fn ray_plane_basic_cases() {
        let down = Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let ground = Plane::horizontal(0.0);
        assert_eq!(ray_plane_intersect(&down, &ground).unwrap(), Vec3::ZERO);

        let slanted = Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, -1.0)).unwrap();
        let hit = ray_plane_intersect(&slanted, &ground).unwrap();
        assert!((hit - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);

        let horizontal = Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(
            ray_plane_intersect(&horizontal, &ground),
            Err(Error::RayParallelToPlane)
        ));

        let up = Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(matches!(
            ray_plane_intersect(&up, &ground),
            Err(Error::IntersectionBehindOrigin)
        ));
    }

    #[test]
    fn exact_ray_intersection_has_zero_residual() {
        let a = Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, -1.0)).unwrap();
        let b = Ray::new(Vec3::new(2.0, 0.0, 1.0), Vec3::new(-1.0, 0.0, -1.0)).unwrap();
        let (p, residual) = two_ray_lsq_point(&a, &b).unwrap();
        assert!((p - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!(residual < 1e-12);
    }

    #[test]
    fn skew_rays_meet_at_perpendicular_midpoint() {
        // x-axis line at z=0 and y-axis line at z=1: the common perpendicular
        // runs along z through the origin column; midpoint z = 0.5 and each
        // line is 0.5 away.
        let a = Ray::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let b = Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 0.0)).unwrap();
        let (p, residual) = two_ray_lsq_point(&a, &b).unwrap();
        assert!((p - Vec3::new(0.0, 0.0, 0.5)).norm() < 1e-12);
        assert!((residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn parallel_rays_rejected_with_angle() {
        let a = Ray::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let b = Ray::new(Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        match two_ray_lsq_point(&a, &b) {
            Err(Error::IllConditionedRays { angle_rad }) => assert!(angle_rad < 1e-6),
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
    }

    #[test]
    fn two_ray_point_is_symmetric_in_arguments() {
        let a = Ray::new(Vec3::new(0.1, -0.2, 1.0), Vec3::new(0.3, 0.1, -1.0)).unwrap();
        let b = Ray::new(Vec3::new(-0.4, 0.5, 1.2), Vec3::new(-0.2, 0.05, -0.9)).unwrap();
        let (p_ab, r_ab) = two_ray_lsq_point(&a, &b).unwrap();
        let (p_ba, r_ba) = two_ray_lsq_point(&b, &a).unwrap();
        assert!((p_ab - p_ba).norm() < 1e-12);
        assert!((r_ab - r_ba).abs() < 1e-12);
    }

    #[test]
    fn triangulation_marks_failures_invalid() {
        let grid = DisplayGrid::centered(2, 2, 0.001, 0.0, 0.0, 0.03).unwrap();
        let k = Intrinsics::new(1000.0, 1000.0, 256.0, 256.0).unwrap();
        // Camera looking straight down from directly above node (1,1): its
        // principal ray is parallel to that node's display ray.
        let node11 = grid.node_position(1, 1).unwrap();
        let eye = Vec3::new(node11.x, node11.y, 0.05);
        let pose = Pose::look_at(eye, Vec3::new(node11.x, node11.y, 0.0), Vec3::new(0.0, 1.0, 0.0))
            .unwrap();
        let matches = alloc::vec![
            ((1usize, 1usize), (256.0, 256.0)), // parallel rays: invalid
            ((9, 9), (10.0, 10.0)),             // out of range: ignored
        ];
        let map = triangulate_matches(&matches, &k, &pose, &grid);
        assert_eq!(map.node(1, 1), None);
        assert_eq!(map.valid_count(), 0);
    }

    proptest! {
        #[test]
        fn project_back_project_round_trip(
            x in -0.02f64..0.02,
            y in -0.02f64..0.02,
            z in 0.0f64..0.015,
            eye_x in -0.01f64..0.01,
            eye_y in -0.01f64..0.01,
        ) {
            // Desk-scale camera above the scene with a lateral offset; the
            // point stays inside a sane frustum (no grazing rays).
            let k = Intrinsics::new(1400.0, 1400.0, 256.0, 256.0).unwrap();
            let eye = Vec3::new(eye_x - 0.006, eye_y, 0.03);
            let pose = Pose::look_at(eye, Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0)).unwrap();
            let point = Vec3::new(x, y, z);
            let pixel = project(&k, &pose, point).unwrap();
            let ray = back_project(&k, &pose, pixel);
            // Intersect with the horizontal plane through the point and
            // re-project: the pixel must come back to within 1e-9 px.
            let plane = Plane::horizontal(z);
            let hit = ray_plane_intersect(&ray, &plane).unwrap();
            let pixel2 = project(&k, &pose, hit).unwrap();
            prop_assert!((pixel.0 - pixel2.0).abs() < 1e-9);
            prop_assert!((pixel.1 - pixel2.1).abs() < 1e-9);
        }

        #[test]
        fn two_ray_equivariance_under_rigid_motion(
            yaw in 0.0f64..core::f64::consts::TAU,
            shift_x in -2.0f64..2.0,
            shift_z in -2.0f64..2.0,
        ) {
            let a = Ray::new(Vec3::new(0.1, -0.2, 1.0), Vec3::new(0.3, 0.1, -1.0)).unwrap();
            let b = Ray::new(Vec3::new(-0.4, 0.5, 1.2), Vec3::new(-0.2, 0.05, -0.9)).unwrap();
            let (c, s) = (libm::cos(yaw), libm::sin(yaw));
            let rot = Mat3::from_rows([c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]);
            let shift = Vec3::new(shift_x, 0.0, shift_z);
            let map = |r: &Ray| {
                Ray::new(rot.mul_vec(r.origin()) + shift, rot.mul_vec(r.direction())).unwrap()
            };
            let (p, res) = two_ray_lsq_point(&a, &b).unwrap();
            let (p2, res2) = two_ray_lsq_point(&map(&a), &map(&b)).unwrap();
            prop_assert!((p2 - (rot.mul_vec(p) + shift)).norm() < 1e-9);
            prop_assert!((res - res2).abs() < 1e-9);
        }
    }
}
