use serde::{Deserialize, Serialize};

use super::{orient, Point2};
use crate::error::{Error, Result};

/// Polygons with less area than this are rejected as degenerate (m²).
pub const MIN_POLYGON_AREA: f64 = 1e-6;

/// Distance under which a point counts as lying on a polygon edge (m).
const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// A closed ring of vertices. The closing vertex is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    vertices: Vec<Point2>,
}

impl Ring {
    /// Builds a ring, dropping an explicit closing vertex and consecutive duplicates.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if let Some(bad) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "non-finite vertex ({}, {})",
                bad.x, bad.y
            )));
        }
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::DegenerateGeometry(format!(
                "ring has {} distinct vertices, need at least 3",
                vertices.len()
            )));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterates over the edges `(v[i], v[i+1])`, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace signed area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        // Accumulate relative to the first vertex to keep large offsets from
        // eating the significant digits.
        let origin = self.vertices[0];
        let mut twice = 0.0;
        for (a, b) in self.edges() {
            twice += a.sub(&origin).cross(&b.sub(&origin));
        }
        0.5 * twice
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(&b)).sum()
    }

    fn reversed(mut self) -> Self {
        self.vertices.reverse();
        self
    }

    fn oriented(self, ccw: bool) -> Self {
        if (self.signed_area() > 0.0) == ccw {
            self
        } else {
            self.reversed()
        }
    }

    /// True when no two edges intersect other than adjacent edges at their shared vertex.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let v = &self.vertices;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                let (c, d) = (v[j], v[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges share one vertex; they may only fold back onto each other.
                    let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    if orient(&shared, &p, &q) == 0.0 && p.sub(&shared).dot(&q.sub(&shared)) > 0.0 {
                        return false;
                    }
                    continue;
                }
                if segments_intersect(&a, &b, &c, &d) {
                    return false;
                }
            }
        }
        true
    }

    fn bounds(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    fn on_boundary(&self, pt: &Point2) -> bool {
        self.edges()
            .any(|(a, b)| point_segment_distance(pt, &a, &b) <= BOUNDARY_TOLERANCE)
    }

    /// Crossing-number test; boundary behaviour is unspecified, check `on_boundary` first.
    fn crossing_contains(&self, pt: &Point2) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > pt.y) != (b.y > pt.y) {
                let x_cross = a.x + (pt.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if pt.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// A polygon with an outer ring and optional holes.
///
/// After construction the outer ring is counter-clockwise and every hole
/// clockwise, so signed-area formulas hold without case analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRepr", into = "PolygonRepr")]
pub struct PolygonM {
    outer: Ring,
    holes: Vec<Ring>,
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    outer: Vec<Point2>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    holes: Vec<Vec<Point2>>,
}

impl TryFrom<PolygonRepr> for PolygonM {
    type Error = Error;

    fn try_from(r: PolygonRepr) -> Result<Self> {
        PolygonM::new(r.outer, r.holes)
    }
}

impl From<PolygonM> for PolygonRepr {
    fn from(p: PolygonM) -> Self {
        PolygonRepr {
            outer: p.outer.vertices,
            holes: p.holes.into_iter().map(|h| h.vertices).collect(),
        }
    }
}

impl PolygonM {
    /// Validates and orientation-normalizes a polygon.
    ///
    /// Fails with `DegenerateGeometry` when the net area is at most 1e-6 m²,
    /// and with `InvalidGeometry` for self-intersecting rings or holes that
    /// escape the outer ring or nest inside each other.
    pub fn new(outer: Vec<Point2>, holes: Vec<Vec<Point2>>) -> Result<Self> {
        let outer = Ring::new(outer)?.oriented(true);
        let holes = holes
            .into_iter()
            .map(|h| Ring::new(h).map(|r| r.oriented(false)))
            .collect::<Result<Vec<_>>>()?;
        let poly = Self { outer, holes };

        let area = poly.area();
        if !(area > MIN_POLYGON_AREA) {
            return Err(Error::DegenerateGeometry(format!(
                "polygon area {area:e} m2 is not above {MIN_POLYGON_AREA:e}"
            )));
        }
        if !poly.outer.is_simple() {
            return Err(Error::InvalidGeometry("outer ring self-intersects".into()));
        }
        for (i, hole) in poly.holes.iter().enumerate() {
            if !hole.is_simple() {
                return Err(Error::InvalidGeometry(format!("hole {i} self-intersects")));
            }
            for v in hole.vertices() {
                if !(poly.outer.on_boundary(v) || poly.outer.crossing_contains(v)) {
                    return Err(Error::InvalidGeometry(format!("hole {i} leaves the outer ring")));
                }
            }
            for (j, other) in poly.holes.iter().enumerate() {
                if i != j
                    && hole
                        .vertices()
                        .iter()
                        .any(|v| !other.on_boundary(v) && other.crossing_contains(v))
                {
                    return Err(Error::InvalidGeometry(format!("hole {i} overlaps hole {j}")));
                }
            }
        }
        Ok(poly)
    }

    /// Convenience constructor for a hole-free polygon.
    pub fn simple(outer: Vec<Point2>) -> Result<Self> {
        Self::new(outer, Vec::new())
    }

    pub fn outer(&self) -> &Ring {
        &self.outer
    }

    pub fn holes(&self) -> &[Ring] {
        &self.holes
    }

    /// Net area: outer ring minus holes.
    pub fn area(&self) -> f64 {
        self.outer.signed_area() + self.holes.iter().map(Ring::signed_area).sum::<f64>()
    }

    /// Area-weighted centroid, holes subtracted.
    pub fn centroid(&self) -> Point2 {
        let origin = self.outer.vertices[0];
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut twice_area = 0.0;
        for ring in std::iter::once(&self.outer).chain(self.holes.iter()) {
            for (a, b) in ring.edges() {
                let (a, b) = (a.sub(&origin), b.sub(&origin));
                let c = a.cross(&b);
                twice_area += c;
                cx += (a.x + b.x) * c;
                cy += (a.y + b.y) * c;
            }
        }
        Point2::new(
            origin.x + cx / (3.0 * twice_area),
            origin.y + cy / (3.0 * twice_area),
        )
    }

    /// Axis-aligned bounds of the outer ring as (min, max).
    pub fn bounds(&self) -> (Point2, Point2) {
        self.outer.bounds()
    }

    /// Applies `f` to every vertex and re-validates.
    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> Result<Self> {
        PolygonM::new(
            self.outer.vertices.iter().copied().map(&f).collect(),
            self.holes
                .iter()
                .map(|h| h.vertices.iter().copied().map(&f).collect())
                .collect(),
        )
    }
}

/// Shoelace area of the outer ring minus the holes.
pub fn polygon_area(p: &PolygonM) -> f64 {
    p.area()
}

/// Length of the outer ring. Hole rings do not contribute.
pub fn perimeter(p: &PolygonM) -> f64 {
    p.outer.length()
}

/// Area of the axis-aligned bounding rectangle of the outer ring.
pub fn aabb_area(p: &PolygonM) -> f64 {
    let (lo, hi) = p.bounds();
    (hi.x - lo.x) * (hi.y - lo.y)
}

/// Containment test; points on any ring boundary count as inside.
pub fn point_in_polygon(pt: &Point2, p: &PolygonM) -> bool {
    let (lo, hi) = p.bounds();
    if pt.x < lo.x - BOUNDARY_TOLERANCE
        || pt.x > hi.x + BOUNDARY_TOLERANCE
        || pt.y < lo.y - BOUNDARY_TOLERANCE
        || pt.y > hi.y + BOUNDARY_TOLERANCE
    {
        return false;
    }
    if p.outer.on_boundary(pt) || p.holes.iter().any(|h| h.on_boundary(pt)) {
        return true;
    }
    p.outer.crossing_contains(pt) && !p.holes.iter().any(|h| h.crossing_contains(pt))
}

pub(crate) fn point_segment_distance(p: &Point2, a: &Point2, b: &Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(&ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (p.sub(a).dot(&ab) / len2).clamp(0.0, 1.0);
    let proj = Point2::new(a.x + t * ab.x, a.y + t * ab.y);
    p.distance(&proj)
}

fn on_segment(p: &Point2, a: &Point2, b: &Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}
