//! Independent reference implementations and fixtures shared by the
//! integration tests. Nothing here calls into the code it checks.

#![allow(dead_code)]

use blockmorph::geometry::{Point2, PolygonM};
use blockmorph::ingest::{Block, Building};
use blockmorph::som::SeededRng;

pub fn square(x0: f64, y0: f64, side: f64) -> Vec<Point2> {
    vec![
        Point2::new(x0, y0),
        Point2::new(x0 + side, y0),
        Point2::new(x0 + side, y0 + side),
        Point2::new(x0, y0 + side),
    ]
}

pub fn building(id: &str, ring: Vec<Point2>, height: f64, storeys: u32) -> Building {
    Building {
        id: id.into(),
        footprint: PolygonM::simple(ring).unwrap(),
        height,
        storeys,
    }
}

/// 10×10 block with unit buildings centred at (2.5, 2.5) and (7.5, 7.5),
/// 10 m / 3 storeys and 20 m / 7 storeys.
pub fn two_box_block() -> Block {
    Block {
        id: "two-box".into(),
        boundary: PolygonM::simple(square(0.0, 0.0, 10.0)).unwrap(),
        buildings: vec![
            building("a", square(2.0, 2.0, 1.0), 10.0, 3),
            building("b", square(7.0, 7.0, 1.0), 20.0, 7),
        ],
    }
}

/// Minimum axis-aligned bounding box area over rotations of 0.01° in [0°, 90°).
pub fn sweep_obb_area(points: &[Point2]) -> f64 {
    let mut best = f64::INFINITY;
    for step in 0..9000 {
        let t = (step as f64 * 0.01).to_radians();
        let (s, c) = t.sin_cos();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            let (x, y) = (p.x * c - p.y * s, p.x * s + p.y * c);
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        best = best.min((x1 - x0) * (y1 - y0));
    }
    best
}

/// Prim's algorithm on the complete graph.
pub fn complete_graph_mst(points: &[Point2]) -> f64 {
    let n = points.len();
    let d = |a: usize, b: usize| ((points[a].x - points[b].x).powi(2) + (points[a].y - points[b].y).powi(2)).sqrt();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&i| !in_tree[i])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[u] = true;
        total += best[u];
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(d(u, v));
            }
        }
    }
    total
}

/// Vertices of a random convex polygon: sorted angles on a rotated ellipse.
pub fn random_convex(rng: &mut SeededRng) -> Vec<Point2> {
    let n = 3 + rng.below(12);
    let (a, b) = (1.0 + 50.0 * rng.next_f64(), 1.0 + 50.0 * rng.next_f64());
    let rot = rng.next_f64() * std::f64::consts::PI;
    let (cx, cy) = (rng.next_f64() * 1000.0 - 500.0, rng.next_f64() * 1000.0 - 500.0);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.next_f64() * std::f64::consts::TAU).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
    let (s, c) = rot.sin_cos();
    angles
        .iter()
        .map(|t| {
            let (x, y) = (a * t.cos(), b * t.sin());
            Point2::new(cx + x * c - y * s, cy + x * s + y * c)
        })
        .collect()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s.sqrt()
}

/// Full scan: (distance, id) ascending with `origin` first among equal
/// distances, or left out when `exclude` is set.
pub fn scan(query: &[f64], corpus: &[(String, Vec<f64>)], k: usize, origin: Option<&str>, exclude: bool) -> Vec<(String, f64)> {
    let mut all: Vec<(f64, u8, String)> = corpus
        .iter()
        .filter(|(id, _)| !(exclude && Some(id.as_str()) == origin))
        .map(|(id, v)| (euclid(query, v), u8::from(Some(id.as_str()) != origin), id.clone()))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    all.into_iter().take(k).map(|(d, _, id)| (id, d)).collect()
}

/// Textbook two-pass Pearson coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    sxy / (sxx.sqrt() * syy.sqrt())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
