//! Bounded faces of a planar segment arrangement.
//!
//! Segments are snapped to the 1e-6 m grid and noded (split at every
//! intersection) before a half-edge walk extracts the faces. Dangling edges
//! and bridges never bound a face and are removed up front; a connected
//! component nested inside a face of another component becomes a hole of
//! the smallest face that contains it.

use std::collections::{BTreeMap, BTreeSet};

use rstar::{RTree, RTreeObject, AABB};

use super::polygon::point_in_polygon;
use super::{Point2, PolygonM, Ring};

type Key = (i64, i64);

/// Parametric tolerance for intersection tests.
const PARAM_EPS: f64 = 1e-12;

struct SegEnvelope {
    index: usize,
    envelope: AABB<[f64; 2]>,
}

impl RTreeObject for SegEnvelope {
    type Envelope = AABB<[f64; 2]>;

    fn envelope(&self) -> Self::Envelope {
        self.envelope
    }
}

/// Returns the bounded faces of the arrangement formed by `segments`,
/// sorted by their lowest-leftmost vertex.
pub fn polygonize(segments: &[(Point2, Point2)]) -> Vec<PolygonM> {
    let edges = node(segments);
    let mut graph = Graph::new(&edges);
    let faces = loop {
        graph.prune_dangles();
        let faces = graph.trace_faces();
        let bridges = graph.bridges(&faces);
        if bridges.is_empty() {
            break faces;
        }
        for e in bridges {
            graph.remove_edge(e);
        }
    };
    assemble(&graph, faces)
}

/// Splits every segment at its intersections with the others and returns
/// the unique non-degenerate snapped sub-segments.
fn node(segments: &[(Point2, Point2)]) -> BTreeSet<(Key, Key)> {
    let segs: Vec<(Point2, Point2)> = segments
        .iter()
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.snapped(), b.snapped()))
        .filter(|(a, b)| a.snap_key() != b.snap_key())
        .collect();

    let tree = RTree::bulk_load(
        segs.iter()
            .enumerate()
            .map(|(index, (a, b))| SegEnvelope {
                index,
                envelope: AABB::from_corners([a.x, a.y], [b.x, b.y]),
            })
            .collect(),
    );

    let mut splits: Vec<Vec<Point2>> = segs.iter().map(|(a, b)| vec![*a, *b]).collect();
    for (i, (a, b)) in segs.iter().enumerate() {
        let query = AABB::from_corners([a.x, a.y], [b.x, b.y]);
        for other in tree.locate_in_envelope_intersecting(&query) {
            let j = other.index;
            if j <= i {
                continue;
            }
            let (c, d) = segs[j];
            for p in intersections(a, b, &c, &d) {
                splits[i].push(p);
                splits[j].push(p);
            }
        }
    }

    let mut out = BTreeSet::new();
    for ((a, b), mut pts) in segs.iter().zip(splits) {
        let dir = b.sub(a);
        pts.sort_by(|p, q| p.sub(a).dot(&dir).total_cmp(&q.sub(a).dot(&dir)));
        let keys: Vec<Key> = pts.iter().map(Point2::snap_key).collect();
        for w in keys.windows(2) {
            if w[0] != w[1] {
                out.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }
    out
}

/// Intersection points of closed segments ab and cd (0, 1 or 2 points).
fn intersections(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> Vec<Point2> {
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = r.cross(&s);
    let qp = c.sub(a);
    let scale = r.dot(&r).sqrt() * s.dot(&s).sqrt();
    if denom.abs() > PARAM_EPS * scale {
        let t = qp.cross(&s) / denom;
        let u = qp.cross(&r) / denom;
        let tol = 1e-9;
        if (-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u) {
            return vec![Point2::new(a.x + t * r.x, a.y + t * r.y)];
        }
        return Vec::new();
    }
    // parallel: only collinear overlaps matter
    if qp.cross(&r).abs() > PARAM_EPS * scale.max(r.dot(&r)) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let rr = r.dot(&r);
    let ss = s.dot(&s);
    for p in [c, d] {
        let t = p.sub(a).dot(&r) / rr;
        if t > 0.0 && t < 1.0 {
            out.push(*p);
        }
    }
    for p in [a, b] {
        let u = p.sub(c).dot(&s) / ss;
        if u > 0.0 && u < 1.0 {
            out.push(*p);
        }
    }
    out
}

struct Graph {
    coords: Vec<Point2>,
    /// Outgoing neighbours of each vertex, sorted counter-clockwise by angle.
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    fn new(edges: &BTreeSet<(Key, Key)>) -> Self {
        let mut ids: BTreeMap<Key, usize> = BTreeMap::new();
        for (a, b) in edges {
            for k in [a, b] {
                let next = ids.len();
                ids.entry(*k).or_insert(next);
            }
        }
        let mut coords = vec![Point2::new(0.0, 0.0); ids.len()];
        for (k, &i) in &ids {
            coords[i] = Point2::from_snap_key(*k);
        }
        let mut adjacency = vec![Vec::new(); ids.len()];
        for (a, b) in edges {
            let (i, j) = (ids[a], ids[b]);
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        let mut g = Self { coords, adjacency };
        for v in 0..g.adjacency.len() {
            g.sort_around(v);
        }
        g
    }

    fn angle(&self, from: usize, to: usize) -> f64 {
        let d = self.coords[to].sub(&self.coords[from]);
        d.y.atan2(d.x)
    }

    fn sort_around(&mut self, v: usize) {
        let mut nbrs = std::mem::take(&mut self.adjacency[v]);
        nbrs.sort_by(|&a, &b| self.angle(v, a).total_cmp(&self.angle(v, b)).then(a.cmp(&b)));
        self.adjacency[v] = nbrs;
    }

    fn remove_edge(&mut self, (a, b): (usize, usize)) {
        self.adjacency[a].retain(|&x| x != b);
        self.adjacency[b].retain(|&x| x != a);
    }

    fn prune_dangles(&mut self) {
        let mut stack: Vec<usize> = (0..self.adjacency.len())
            .filter(|&v| self.adjacency[v].len() == 1)
            .collect();
        while let Some(v) = stack.pop() {
            if self.adjacency[v].len() != 1 {
                continue;
            }
            let u = self.adjacency[v][0];
            self.remove_edge((v, u));
            if self.adjacency[u].len() == 1 {
                stack.push(u);
            }
        }
    }

    /// Next half-edge of the face to the left of `from -> to`.
    fn next(&self, from: usize, to: usize) -> usize {
        let around = &self.adjacency[to];
        let pos = around.iter().position(|&x| x == from).expect("twin half-edge");
        around[(pos + around.len() - 1) % around.len()]
    }

    /// Every face cycle as a vertex list; each half-edge appears in exactly one cycle.
    fn trace_faces(&self) -> Vec<Vec<usize>> {
        let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut faces = Vec::new();
        for start in 0..self.adjacency.len() {
            for &first in &self.adjacency[start] {
                if visited.contains(&(start, first)) {
                    continue;
                }
                let mut cycle = Vec::new();
                let (mut from, mut to) = (start, first);
                while visited.insert((from, to)) {
                    cycle.push(from);
                    let nxt = self.next(from, to);
                    from = to;
                    to = nxt;
                }
                faces.push(cycle);
            }
        }
        faces
    }

    /// Edges whose two sides belong to the same face cycle.
    fn bridges(&self, faces: &[Vec<usize>]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for cycle in faces {
            let n = cycle.len();
            let half: BTreeSet<(usize, usize)> =
                (0..n).map(|i| (cycle[i], cycle[(i + 1) % n])).collect();
            for &(a, b) in &half {
                if a < b && half.contains(&(b, a)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn signed_area(&self, cycle: &[usize]) -> f64 {
        let o = self.coords[cycle[0]];
        let n = cycle.len();
        0.5 * (0..n)
            .map(|i| {
                self.coords[cycle[i]]
                    .sub(&o)
                    .cross(&self.coords[cycle[(i + 1) % n]].sub(&o))
            })
            .sum::<f64>()
    }
}

fn assemble(graph: &Graph, faces: Vec<Vec<usize>>) -> Vec<PolygonM> {
    let mut bounded: Vec<(Vec<Point2>, f64, Vec<Vec<Point2>>)> = Vec::new();
    let mut outer_cycles: Vec<Vec<Point2>> = Vec::new();
    for cycle in faces {
        if cycle.len() < 3 {
            continue;
        }
        let area = graph.signed_area(&cycle);
        let pts: Vec<Point2> = cycle.iter().map(|&v| graph.coords[v]).collect();
        if area > 0.0 {
            bounded.push((pts, area, Vec::new()));
        } else if area < 0.0 {
            outer_cycles.push(pts);
        }
    }

    // Outer boundary of a nested component: hole of the smallest face strictly containing it.
    let shells: Vec<Option<PolygonM>> = bounded
        .iter()
        .map(|(pts, _, _)| PolygonM::simple(pts.clone()).ok())
        .collect();
    for cycle in outer_cycles {
        let probe = cycle[0];
        let host = shells
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (i, s)))
            .filter(|(_, s)| {
                point_in_polygon(&probe, s) && !on_ring(&probe, s.outer())
            })
            .min_by(|a, b| bounded[a.0].1.total_cmp(&bounded[b.0].1).then(a.0.cmp(&b.0)));
        if let Some((i, _)) = host {
            bounded[i].2.push(cycle);
        }
    }

    let mut polys: Vec<PolygonM> = Vec::with_capacity(bounded.len());
    for (outer, _, holes) in bounded {
        match PolygonM::new(outer, holes) {
            Ok(p) => polys.push(p),
            Err(e) => log::warn!(target: "polygonize", "dropping face: {e}"),
        }
    }
    polys.sort_by(|a, b| {
        let ka = lowest_vertex(a);
        let kb = lowest_vertex(b);
        ka.cmp(&kb)
    });
    polys
}

fn on_ring(p: &Point2, ring: &Ring) -> bool {
    ring.edges()
        .any(|(a, b)| super::polygon::point_segment_distance(p, &a, &b) <= 1e-9)
}

fn lowest_vertex(p: &PolygonM) -> (i64, i64) {
    p.outer()
        .vertices()
        .iter()
        .map(|v| {
            let k = v.snap_key();
            (k.1, k.0)
        })
        .min()
        .expect("non-empty ring")
}
