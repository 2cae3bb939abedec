//! Planar geometry kernels in a local metric frame.
//!
//! Every coordinate handled here is in meters on a local projected plane;
//! longitude/latitude never reach this module (see [`crate::ingest::projection`]).

mod hull;
mod mst;
mod polygon;
mod polygonize;

pub use hull::{convex_hull, min_obb_area};
pub use mst::{delaunay_mst, EdgeSet};
pub use polygon::{aabb_area, perimeter, point_in_polygon, polygon_area, PolygonM, Ring};
pub use polygonize::polygonize;

use serde::{Deserialize, Serialize};

/// Resolution of the snapping grid applied before noding and when writing corpus files.
pub const SNAP_RESOLUTION: f64 = 1e-6;

/// A point on the local projected plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(&self, other: &Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn dot(&self, other: &Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(&self, other: &Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Rounds both coordinates to the [`SNAP_RESOLUTION`] grid.
    pub fn snapped(&self) -> Point2 {
        Point2::new(snap(self.x), snap(self.y))
    }

    pub(crate) fn snap_key(&self) -> (i64, i64) {
        (
            (self.x * 1e6).round() as i64,
            (self.y * 1e6).round() as i64,
        )
    }

    pub(crate) fn from_snap_key(key: (i64, i64)) -> Point2 {
        Point2::new(key.0 as f64 / 1e6, key.1 as f64 / 1e6)
    }
}

/// Rounds a coordinate to 6 decimal places (the snapping grid).
pub fn snap(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Twice the signed area of triangle (a, b, c); positive when counter-clockwise.
pub(crate) fn orient(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    b.sub(a).cross(&c.sub(a))
}
