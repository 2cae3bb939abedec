use std::collections::HashMap;

use super::Point2;
use crate::error::{Error, Result};

/// A spanning tree over a point list.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSet {
    pub points: Vec<Point2>,
    /// Index pairs into `points`, each with `i < j`.
    pub edges: Vec<(usize, usize)>,
    pub total_length: f64,
}

/// Euclidean minimum spanning tree restricted to the Delaunay graph.
///
/// The Euclidean MST is a subgraph of the Delaunay triangulation, so Kruskal
/// over the triangulation edges gives the exact MST with O(n log n) edges.
/// Collinear inputs have no triangulation and fall back to the complete graph.
/// Duplicate points are attached to their first occurrence by zero-length
/// edges, so the result always has exactly `points.len() - 1` edges.
pub fn delaunay_mst(points: &[Point2]) -> Result<EdgeSet> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientPoints(n));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidGeometry(format!("non-finite point ({}, {})", p.x, p.y)));
    }

    let mut first_seen: HashMap<(u64, u64), usize> = HashMap::with_capacity(n);
    let mut distinct: Vec<usize> = Vec::with_capacity(n);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
    for (i, p) in points.iter().enumerate() {
        let key = (p.x.to_bits(), p.y.to_bits());
        match first_seen.get(&key) {
            Some(&j) => edges.push((j.min(i), j.max(i))),
            None => {
                first_seen.insert(key, i);
                distinct.push(i);
            }
        }
    }

    let candidates = candidate_edges(points, &distinct);
    edges.extend(kruskal(points, n, candidates));
    edges.sort_unstable();

    let total_length = edges
        .iter()
        .map(|&(i, j)| points[i].distance(&points[j]))
        .sum();
    Ok(EdgeSet {
        points: points.to_vec(),
        edges,
        total_length,
    })
}

/// Candidate edges (original indices) among the distinct points.
fn candidate_edges(points: &[Point2], distinct: &[usize]) -> Vec<(usize, usize)> {
    if distinct.len() < 2 {
        return Vec::new();
    }
    if distinct.len() >= 3 {
        let coords: Vec<delaunator::Point> = distinct
            .iter()
            .map(|&i| delaunator::Point {
                x: points[i].x,
                y: points[i].y,
            })
            .collect();
        let tri = delaunator::triangulate(&coords);
        if !tri.triangles.is_empty() {
            let mut out = Vec::with_capacity(tri.triangles.len());
            for t in tri.triangles.chunks_exact(3) {
                for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                    let (a, b) = (distinct[a], distinct[b]);
                    out.push((a.min(b), a.max(b)));
                }
            }
            out.sort_unstable();
            out.dedup();
            return out;
        }
    }
    // two points, or a collinear set: complete graph
    let mut out = Vec::with_capacity(distinct.len() * (distinct.len() - 1) / 2);
    for (k, &a) in distinct.iter().enumerate() {
        for &b in &distinct[k + 1..] {
            out.push((a.min(b), a.max(b)));
        }
    }
    out
}

fn kruskal(points: &[Point2], n: usize, mut candidates: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let len = |e: &(usize, usize)| points[e.0].distance(&points[e.1]);
    candidates.sort_by(|a, b| len(a).total_cmp(&len(b)).then(a.cmp(b)));

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut tree = Vec::new();
    for (a, b) in candidates {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
            tree.push((a, b));
        }
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_rejected() {
        assert!(matches!(
            delaunay_mst(&[Point2::new(0.0, 0.0)]),
            Err(Error::InsufficientPoints(1))
        ));
    }

    #[test]
    fn two_points() {
        let e = delaunay_mst(&[Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)]).unwrap();
        assert_eq!(e.edges, vec![(0, 1)]);
        assert_eq!(e.total_length, 5.0);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let e = delaunay_mst(&[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, h),
        ])
        .unwrap();
        assert_eq!(e.edges.len(), 2);
        assert!((e.total_length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_square_corners() {
        let e = delaunay_mst(&[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(e.edges.len(), 3);
        assert!((e.total_length - 3.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_fall_back_to_complete_graph() {
        let pts: Vec<Point2> = [0.0, 3.0, 1.0, 7.0].iter().map(|&x| Point2::new(x, 2.0 * x)).collect();
        let e = delaunay_mst(&pts).unwrap();
        assert_eq!(e.edges.len(), 3);
        assert!((e.total_length - 7.0 * 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn duplicates_get_zero_length_edges() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        let e = delaunay_mst(&pts).unwrap();
        assert_eq!(e.edges.len(), 2);
        assert_eq!(e.total_length, 2.0);
    }
}
