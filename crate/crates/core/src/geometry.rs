//! Circular image-token index projection.
//!
//! Image grids are centered, mapped onto a circle whose angular layout
//! mixes each token's polar angle with its raster rank, and the circle is
//! then rotated into the plane orthogonal to the text index direction.
//! [`dual_frame_fusion`] blends that projection back toward the centered
//! grid.
//!
//! Index space has three axes: axis 0 is the temporal/sequential axis
//! (always 0 for a single image), axis 1 carries the row (height) and
//! axis 2 the column (width). The 2D working plane used for the circular
//! mapping reads width as `x` and height as `y`.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for orthonormality checks.
pub const GEOMETRY_TOL: f64 = 1e-9;

/// One token's position as a real-valued 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexPoint {
    pub coords: [f64; 3],
}

impl IndexPoint {
    pub const ZERO: IndexPoint = IndexPoint { coords: [0.0; 3] };

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { coords: [a, b, c] }
    }

    /// The point `(s, s, s)` on the text line.
    pub const fn replicated(s: f64) -> Self {
        Self { coords: [s, s, s] }
    }

    pub fn dot(&self, other: &IndexPoint) -> f64 {
        dot3(&self.coords, &other.coords)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &IndexPoint) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// Returns `Some(s)` when all three components are bit-identical.
    pub fn as_scalar(&self) -> Option<f64> {
        let [a, b, c] = self.coords;
        (a == b && b == c).then_some(a)
    }

    pub fn height(&self) -> f64 {
        self.coords[1]
    }

    pub fn width(&self) -> f64 {
        self.coords[2]
    }
}

impl Add for IndexPoint {
    type Output = IndexPoint;
    fn add(self, rhs: IndexPoint) -> IndexPoint {
        let [a, b, c] = self.coords;
        let [x, y, z] = rhs.coords;
        IndexPoint::new(a + x, b + y, c + z)
    }
}

impl Sub for IndexPoint {
    type Output = IndexPoint;
    fn sub(self, rhs: IndexPoint) -> IndexPoint {
        let [a, b, c] = self.coords;
        let [x, y, z] = rhs.coords;
        IndexPoint::new(a - x, b - y, c - z)
    }
}

impl Mul<f64> for IndexPoint {
    type Output = IndexPoint;
    fn mul(self, k: f64) -> IndexPoint {
        let [a, b, c] = self.coords;
        IndexPoint::new(a * k, b * k, c * k)
    }
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Token grid of an image after patchification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    width: usize,
    height: usize,
}

impl GridSpec {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// How the circle radius is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum RadiusStrategy {
    /// Constant radius.
    Fixed(f64),
    /// `k` times the largest in-plane norm of the centered grid.
    Auto(f64),
}

impl RadiusStrategy {
    fn validate(&self) -> Result<()> {
        let (name, value) = match *self {
            RadiusStrategy::Fixed(r) => ("fixed radius", r),
            RadiusStrategy::Auto(k) => ("auto scale k", k),
        };
        if value.is_finite() && value > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")))
        }
    }
}

impl std::fmt::Display for RadiusStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadiusStrategy::Fixed(r) => write!(f, "fixed:{r}"),
            RadiusStrategy::Auto(k) => write!(f, "auto:{k}"),
        }
    }
}

impl std::str::FromStr for RadiusStrategy {
    type Err = Error;

    /// Parses `fixed:<R>` or `auto:<k>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("radius `{s}` is not fixed:<R> or auto:<k>"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        let strategy = match kind.trim() {
            "fixed" => RadiusStrategy::Fixed(value),
            "auto" => RadiusStrategy::Auto(value),
            _ => return Err(bad()),
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

/// Parameters of the circular projection and the fusion step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CipConfig {
    /// Weight on the spatial-origin angle; `1 - alpha` goes to the grid-index angle.
    pub alpha: f64,
    pub radius: RadiusStrategy,
    /// Weight on the projected coordinates during fusion.
    pub beta: f64,
    /// Normal of the target plane.
    pub text_direction: [f64; 3],
}

impl Default for CipConfig {
    fn default() -> Self {
        Self { alpha: 0.5, radius: RadiusStrategy::Fixed(10.0), beta: 0.1, text_direction: [1.0, 1.0, 1.0] }
    }
}

impl CipConfig {
    pub fn validate(&self) -> Result<()> {
        check_unit_interval("alpha", self.alpha)?;
        check_unit_interval("beta", self.beta)?;
        self.radius.validate()?;
        if !self.text_direction.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidConfig("text direction must be finite".into()));
        }
        if norm3(&self.text_direction) == 0.0 {
            return Err(Error::ZeroTextDirection);
        }
        Ok(())
    }
}

fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {value}")))
    }
}

/// Right-handed orthonormal frame `(u, v, n)` of the target plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneBasis {
    pub n: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl PlaneBasis {
    /// Maps working-plane coordinates `(x, y)` to `x·u + y·v`.
    pub fn embed(&self, x: f64, y: f64) -> IndexPoint {
        IndexPoint::new(x * self.u[0] + y * self.v[0], x * self.u[1] + y * self.v[1], x * self.u[2] + y * self.v[2])
    }

    pub fn normal(&self) -> IndexPoint {
        IndexPoint { coords: self.n }
    }
}

/// Raster-order grid coordinates `(0, row, col)`, rows outermost.
pub fn grid_coords(grid: GridSpec) -> Vec<IndexPoint> {
    (0..grid.height).flat_map(|j| (0..grid.width).map(move |i| IndexPoint::new(0.0, j as f64, i as f64))).collect()
}

/// Shifts the points so the midpoint of their bounding box sits at the origin.
pub fn centralize(points: &[IndexPoint]) -> Result<(Vec<IndexPoint>, IndexPoint)> {
    let first = points.first().ok_or(Error::EmptyPointSet)?;
    let mut lo = first.coords;
    let mut hi = first.coords;
    for p in &points[1..] {
        for a in 0..3 {
            lo[a] = lo[a].min(p.coords[a]);
            hi[a] = hi[a].max(p.coords[a]);
        }
    }
    let center = IndexPoint::new(0.5 * (hi[0] + lo[0]), 0.5 * (hi[1] + lo[1]), 0.5 * (hi[2] + lo[2]));
    let centered = points.iter().map(|&p| p - center).collect();
    Ok((centered, center))
}

/// Polar angles of centered points, min-max stretched onto `[0, 2π]`.
///
/// The angle is taken in the working plane `(x, y) = (width, height)`.
/// `atan2(0, 0)` evaluates to 0. When every point has the same raw angle
/// all outputs are 0. Otherwise the point(s) at the largest raw angle land
/// exactly on `2π`, which coincides with 0 on the circle.
pub fn spatial_origin_angles(centered: &[IndexPoint]) -> Vec<f64> {
    let raw: Vec<f64> = centered.iter().map(|p| p.height().atan2(p.width())).collect();
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span > 0.0 {
        raw.iter().map(|r| (r - min) / span * TAU).collect()
    } else {
        vec![0.0; raw.len()]
    }
}

/// Uniformly spaced angles `k/N · 2π` over the raster order of the grid.
pub fn grid_index_angles(grid: GridSpec) -> Vec<f64> {
    let n = grid.len();
    (0..n).map(|k| k as f64 / n as f64 * TAU).collect()
}

pub fn mix_angles(sa: &[f64], ga: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if sa.len() != ga.len() {
        return Err(Error::LengthMismatch { left: sa.len(), right: ga.len() });
    }
    check_unit_interval("alpha", alpha)?;
    Ok(sa.iter().zip(ga).map(|(s, g)| alpha * s + (1.0 - alpha) * g).collect())
}

pub fn compute_radius(centered: &[IndexPoint], strategy: RadiusStrategy) -> Result<f64> {
    strategy.validate()?;
    match strategy {
        RadiusStrategy::Fixed(r) => Ok(r),
        RadiusStrategy::Auto(k) => {
            if centered.is_empty() {
                return Err(Error::EmptyPointSet);
            }
            let max_norm = centered.iter().map(|p| p.height().hypot(p.width())).fold(0.0, f64::max);
            if max_norm == 0.0 {
                return Err(Error::DegenerateRadius);
            }
            Ok(k * max_norm)
        }
    }
}

/// Points `(R cos θ, R sin θ, 0)` in working-plane coordinates.
pub fn map_to_circle(angles: &[f64], radius: f64) -> Vec<IndexPoint> {
    angles.iter().map(|&t| IndexPoint::new(radius * t.cos(), radius * t.sin(), 0.0)).collect()
}

pub fn build_plane_basis(text_direction: [f64; 3]) -> Result<PlaneBasis> {
    let len = norm3(&text_direction);
    if len == 0.0 || !len.is_finite() {
        return Err(Error::ZeroTextDirection);
    }
    let n = text_direction.map(|c| c / len);
    let u_raw = [-n[1], n[0], 0.0];
    let u_len = norm3(&u_raw);
    // Normal along axis 2: any in-plane direction works, pick axis 0.
    let u = if u_len == 0.0 { [1.0, 0.0, 0.0] } else { u_raw.map(|c| c / u_len) };
    let v = cross3(&n, &u);
    Ok(PlaneBasis { n, u, v })
}

pub fn rotate_to_plane(circle_points: &[IndexPoint], basis: &PlaneBasis) -> Vec<IndexPoint> {
    circle_points.iter().map(|p| basis.embed(p.coords[0], p.coords[1])).collect()
}

/// Every intermediate of the projection for one grid, in raster order.
#[derive(Debug, Clone, PartialEq)]
pub struct CipStages {
    pub original: Vec<IndexPoint>,
    pub center: IndexPoint,
    pub centered: Vec<IndexPoint>,
    pub spatial_angles: Vec<f64>,
    pub grid_angles: Vec<f64>,
    pub mixed_angles: Vec<f64>,
    pub radius: f64,
    pub circle: Vec<IndexPoint>,
    pub basis: PlaneBasis,
    pub projected: Vec<IndexPoint>,
}

pub fn cip_stages(grid: GridSpec, config: &CipConfig) -> Result<CipStages> {
    config.validate()?;
    let original = grid_coords(grid);
    let (centered, center) = centralize(&original)?;
    let spatial_angles = spatial_origin_angles(&centered);
    let grid_angles = grid_index_angles(grid);
    let mixed_angles = mix_angles(&spatial_angles, &grid_angles, config.alpha)?;
    let radius = compute_radius(&centered, config.radius)?;
    let circle = map_to_circle(&mixed_angles, radius);
    let basis = build_plane_basis(config.text_direction)?;
    let projected = rotate_to_plane(&circle, &basis);
    Ok(CipStages {
        original,
        center,
        centered,
        spatial_angles,
        grid_angles,
        mixed_angles,
        radius,
        circle,
        basis,
        projected,
    })
}

/// Returns `(projected, centered)` for the grid.
pub fn cip_transform(grid: GridSpec, config: &CipConfig) -> Result<(Vec<IndexPoint>, Vec<IndexPoint>)> {
    let stages = cip_stages(grid, config)?;
    Ok((stages.projected, stages.centered))
}

/// Component-wise `beta · projected + (1 - beta) · centered`.
pub fn dual_frame_fusion(projected: &[IndexPoint], centered: &[IndexPoint], beta: f64) -> Result<Vec<IndexPoint>> {
    if projected.len() != centered.len() {
        return Err(Error::LengthMismatch { left: projected.len(), right: centered.len() });
    }
    check_unit_interval("beta", beta)?;
    Ok(projected.iter().zip(centered).map(|(&p, &c)| p * beta + c * (1.0 - beta)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn grid(w: usize, h: usize) -> GridSpec {
        GridSpec::new(w, h).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn grid_rejects_zero_sides() {
        assert!(GridSpec::new(0, 3).is_err());
        assert!(GridSpec::new(3, 0).is_err());
    }

    #[test]
    fn grid_coords_raster_order() {
        assert_eq!(grid_coords(grid(1, 1)), vec![IndexPoint::ZERO]);

        let pts = grid_coords(grid(2, 3));
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], IndexPoint::new(0.0, 0.0, 1.0));
        assert_eq!(pts[2], IndexPoint::new(0.0, 1.0, 0.0));
        assert!(pts.iter().all(|p| p.width() <= 1.0 && p.height() <= 2.0));

        let pts = grid_coords(grid(3, 3));
        for j in 0..3 {
            for i in 0..3 {
                assert_eq!(pts[j * 3 + i], IndexPoint::new(0.0, j as f64, i as f64));
            }
        }
    }

    #[test]
    fn centralize_examples() {
        let (c, center) = centralize(&grid_coords(grid(3, 3))).unwrap();
        assert_eq!(center, IndexPoint::new(0.0, 1.0, 1.0));
        assert!(c.iter().all(|p| [-1.0, 0.0, 1.0].contains(&p.height())));

        let (c, center) = centralize(&grid_coords(grid(2, 2))).unwrap();
        assert_eq!(center, IndexPoint::new(0.0, 0.5, 0.5));
        assert!(c.iter().all(|p| p.width().abs() == 0.5 && p.height().abs() == 0.5));

        let single = IndexPoint::new(0.0, 5.0, 7.0);
        let (c, center) = centralize(&[single]).unwrap();
        assert_eq!(center, single);
        assert_eq!(c, vec![IndexPoint::ZERO]);

        assert_eq!(centralize(&[]), Err(Error::EmptyPointSet));
        assert_eq!(Error::EmptyPointSet.to_string(), "empty point set");
    }

    #[test]
    fn spatial_angles_on_centered_3x3() {
        let (c, _) = centralize(&grid_coords(grid(3, 3))).unwrap();
        let sa = spatial_origin_angles(&c);
        // Independent hand/numpy evaluation, in units of π.
        let expected = [0.0, 2.0 / 7.0, 4.0 / 7.0, 2.0, 6.0 / 7.0, 6.0 / 7.0, 12.0 / 7.0, 10.0 / 7.0, 8.0 / 7.0];
        for (got, want) in sa.iter().zip(expected) {
            assert!(close(*got, want * PI, 1e-12), "{got} vs {}", want * PI);
        }
        // (x', y') = (1, 0) and the exact center both map to 6π/7.
        assert!(close(sa[5], 6.0 * PI / 7.0, 1e-12));
        assert!(close(sa[4], 6.0 * PI / 7.0, 1e-12));
    }

    #[test]
    fn spatial_angles_degenerate_span() {
        // Points on the positive width axis share raw angle 0.
        let pts = [IndexPoint::new(0.0, 0.0, 1.0), IndexPoint::new(0.0, 0.0, 2.0), IndexPoint::new(0.0, 0.0, 3.0)];
        assert_eq!(spatial_origin_angles(&pts), vec![0.0; 3]);
        assert_eq!(spatial_origin_angles(&[IndexPoint::ZERO]), vec![0.0]);
    }

    #[test]
    fn grid_angles() {
        let ga = grid_index_angles(grid(3, 3));
        assert_eq!(ga[0], 0.0);
        assert!(close(ga[4], 8.0 * PI / 9.0, 1e-15));
        assert_eq!(grid_index_angles(grid(1, 1)), vec![0.0]);
    }

    #[test]
    fn mixing_endpoints_and_midpoint() {
        let sa = [0.3, 1.7, PI];
        let ga = [2.0, 0.1, 0.0];
        assert_eq!(mix_angles(&sa, &ga, 0.0).unwrap(), ga.to_vec());
        assert_eq!(mix_angles(&sa, &ga, 1.0).unwrap(), sa.to_vec());
        assert_eq!(mix_angles(&[PI], &[0.0], 0.5).unwrap(), vec![PI / 2.0]);
        assert!(matches!(mix_angles(&sa, &ga[..2], 0.5), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn radius_strategies() {
        let (c, _) = centralize(&grid_coords(grid(3, 3))).unwrap();
        assert_eq!(compute_radius(&c, RadiusStrategy::Fixed(10.0)).unwrap(), 10.0);
        assert!(close(compute_radius(&c, RadiusStrategy::Auto(1.0)).unwrap(), SQRT_2, 1e-15));
        assert!(close(compute_radius(&c, RadiusStrategy::Auto(2.0)).unwrap(), 2.0 * SQRT_2, 1e-15));
        assert_eq!(compute_radius(&[IndexPoint::ZERO], RadiusStrategy::Auto(1.0)), Err(Error::DegenerateRadius));
        assert!(compute_radius(&c, RadiusStrategy::Fixed(0.0)).is_err());
    }

    #[test]
    fn circle_points() {
        assert_eq!(map_to_circle(&[0.0], 1.0), vec![IndexPoint::new(1.0, 0.0, 0.0)]);
        let p = map_to_circle(&[PI / 2.0], 10.0)[0];
        assert!(close(p.coords[0], 0.0, 1e-9) && close(p.coords[1], 10.0, 1e-9) && p.coords[2] == 0.0);

        let pts = map_to_circle(&grid_index_angles(grid(3, 3)), 1.0);
        let chords: Vec<f64> = (0..9).map(|k| pts[k].distance(&pts[(k + 1) % 9])).collect();
        assert!(chords.iter().all(|c| close(*c, chords[0], 1e-9)));
        assert!(pts.iter().all(|p| close(p.norm(), 1.0, 1e-9)));
    }

    #[test]
    fn plane_basis_examples() {
        let b = build_plane_basis([1.0, 1.0, 1.0]).unwrap();
        let s3 = 3f64.sqrt();
        let s6 = 6f64.sqrt();
        let want_n = [1.0 / s3; 3];
        let want_u = [-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        let want_v = [-1.0 / s6, -1.0 / s6, 2.0 / s6];
        for a in 0..3 {
            assert!(close(b.n[a], want_n[a], 1e-15));
            assert!(close(b.u[a], want_u[a], 1e-15));
            assert!(close(b.v[a], want_v[a], 1e-15));
        }

        let b = build_plane_basis([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(b.u, [1.0, 0.0, 0.0]);
        assert_eq!(b.v, [0.0, 1.0, 0.0]);

        let scaled = build_plane_basis([2.0, 2.0, 2.0]).unwrap();
        let unit = build_plane_basis([1.0, 1.0, 1.0]).unwrap();
        for a in 0..3 {
            assert!(close(scaled.u[a], unit.u[a], 1e-15));
            assert!(close(scaled.v[a], unit.v[a], 1e-15));
        }

        assert_eq!(build_plane_basis([0.0; 3]), Err(Error::ZeroTextDirection));
    }

    #[test]
    fn plane_basis_is_right_handed() {
        for dir in [[1.0, 1.0, 1.0], [0.0, 0.0, -3.0], [2.0, -1.0, 0.5], [0.0, 1.0, 0.0]] {
            let b = build_plane_basis(dir).unwrap();
            for vec in [b.n, b.u, b.v] {
                assert!(close(norm3(&vec), 1.0, GEOMETRY_TOL));
            }
            assert!(dot3(&b.n, &b.u).abs() < GEOMETRY_TOL);
            assert!(dot3(&b.n, &b.v).abs() < GEOMETRY_TOL);
            assert!(dot3(&b.u, &b.v).abs() < GEOMETRY_TOL);
            assert_eq!(b.v, cross3(&b.n, &b.u));
        }
    }

    #[test]
    fn rotation_of_axis_points() {
        let b = build_plane_basis([1.0, 1.0, 1.0]).unwrap();
        let r = 4.0;
        let out = rotate_to_plane(&[IndexPoint::new(r, 0.0, 0.0), IndexPoint::new(0.0, r, 0.0)], &b);
        assert_eq!(out[0], IndexPoint { coords: b.u.map(|c| c * r) });
        assert_eq!(out[1], IndexPoint { coords: b.v.map(|c| c * r) });
    }

    #[test]
    fn cip_3x3_matches_frozen_coordinates() {
        let config = CipConfig { alpha: 0.5, radius: RadiusStrategy::Fixed(10.0), beta: 1.0, text_direction: [1.0; 3] };
        let (proj, centered) = cip_transform(grid(3, 3), &config).unwrap();
        // Frozen from an independent numpy evaluation of the same steps.
        let expected = [
            [-7.0710678118654755, 7.0710678118654755, 0.0],
            [-7.85979406352812, 2.0147657153274787, 5.845028348200641],
            [-3.904927383593881, -4.257500607347136, 8.162427990941017],
            [7.071067811865477, -3.9968028886505635e-15, -7.071067811865474],
            [4.930042365798342, -8.101599196514803, 3.1715568307164603],
            [6.858782941432615, -7.265772893585353, 0.40698995215273864],
            [3.542645895096243, 4.599489013769551, -8.142134908865794],
            [4.257500607347138, 3.904927383593879, -8.162427990941017],
            [4.9300423657983385, 3.171556830716462, -8.101599196514801],
        ];
        for (p, want) in proj.iter().zip(expected) {
            for a in 0..3 {
                assert!(close(p.coords[a], want[a], 1e-9), "{p:?} vs {want:?}");
            }
            assert!(close(p.norm(), 10.0, 1e-9));
            assert!((p.coords[0] + p.coords[1] + p.coords[2]).abs() < 1e-9);
        }
        assert_eq!(centered[0], IndexPoint::new(0.0, -1.0, -1.0));
    }

    #[test]
    fn cip_single_token() {
        let auto = CipConfig { radius: RadiusStrategy::Auto(1.0), ..CipConfig::default() };
        assert_eq!(cip_transform(grid(1, 1), &auto), Err(Error::DegenerateRadius));

        let fixed = CipConfig { radius: RadiusStrategy::Fixed(3.0), ..CipConfig::default() };
        let (proj, _) = cip_transform(grid(1, 1), &fixed).unwrap();
        let u = build_plane_basis(fixed.text_direction).unwrap().u;
        assert_eq!(proj, vec![IndexPoint { coords: u.map(|c| c * 3.0) }]);
    }

    #[test]
    fn alpha_endpoints_share_the_circle() {
        let base = CipConfig { beta: 1.0, ..CipConfig::default() };
        let sa_only = cip_stages(grid(4, 3), &CipConfig { alpha: 1.0, ..base }).unwrap();
        let ga_only = cip_stages(grid(4, 3), &CipConfig { alpha: 0.0, ..base }).unwrap();
        assert_eq!(sa_only.radius, ga_only.radius);
        assert_eq!(sa_only.mixed_angles, sa_only.spatial_angles);
        assert_eq!(ga_only.mixed_angles, ga_only.grid_angles);
        assert_ne!(sa_only.mixed_angles, ga_only.mixed_angles);
    }

    #[test]
    fn fusion_examples() {
        let p = [IndexPoint::new(2.0, 0.0, 0.0)];
        let c = [IndexPoint::new(0.0, 2.0, 0.0)];
        assert_eq!(dual_frame_fusion(&p, &c, 0.5).unwrap(), vec![IndexPoint::new(1.0, 1.0, 0.0)]);
        assert_eq!(dual_frame_fusion(&p, &c, 1.0).unwrap(), p.to_vec());
        assert_eq!(dual_frame_fusion(&p, &c, 0.0).unwrap(), c.to_vec());
        assert!(matches!(dual_frame_fusion(&p, &[], 0.5), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(CipConfig::default().validate().is_ok());
        assert!(CipConfig { alpha: 1.5, ..CipConfig::default() }.validate().is_err());
        assert!(CipConfig { beta: -0.1, ..CipConfig::default() }.validate().is_err());
        assert_eq!(
            CipConfig { text_direction: [0.0; 3], ..CipConfig::default() }.validate(),
            Err(Error::ZeroTextDirection)
        );
        assert_eq!("auto:2".parse::<RadiusStrategy>().unwrap(), RadiusStrategy::Auto(2.0));
        assert_eq!("fixed:10".parse::<RadiusStrategy>().unwrap(), RadiusStrategy::Fixed(10.0));
        assert!("auto:-1".parse::<RadiusStrategy>().is_err());
        assert!("10".parse::<RadiusStrategy>().is_err());
    }
}
