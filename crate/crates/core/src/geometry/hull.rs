use super::{orient, aabb_area, Point2, PolygonM};

/// Convex hull by Andrew's monotone chain.
///
/// Returns the hull vertices counter-clockwise with collinear points removed.
/// Fewer than three points come back for degenerate (collinear) input.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }

    let mut hull: Vec<Point2> = Vec::with_capacity(pts.len() * 2);
    for p in pts.iter() {
        while hull.len() >= 2 && orient(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

/// Area of the minimum-area oriented rectangle enclosing the outer ring.
///
/// Rotating calipers over the convex hull: one side of the optimal rectangle
/// is collinear with a hull edge, and the three other support points only
/// ever advance as the base edge rotates. The result is clamped to the
/// axis-aligned box area so `min_obb_area(p) <= aabb_area(p)` holds exactly.
pub fn min_obb_area(p: &PolygonM) -> f64 {
    let hull = convex_hull(p.outer().vertices());
    let n = hull.len();
    if n < 3 {
        return 0.0;
    }
    let origin = hull[0];
    let h: Vec<Point2> = hull.iter().map(|q| q.sub(&origin)).collect();

    let edge_dir = |i: usize| {
        let e = h[(i + 1) % n].sub(&h[i]);
        let len = e.x.hypot(e.y);
        Point2::new(e.x / len, e.y / len)
    };

    // Support indices: furthest along the edge (right), furthest from the
    // edge (top) and furthest against the edge (left).
    let u0 = edge_dir(0);
    let v0 = Point2::new(-u0.y, u0.x);
    let argmax = |f: &dyn Fn(&Point2) -> f64| {
        (0..n).fold(0, |best, k| if f(&h[k]) > f(&h[best]) { k } else { best })
    };
    let mut right = argmax(&|q| q.dot(&u0));
    let mut top = argmax(&|q| q.dot(&v0));
    let mut left = argmax(&|q| -q.dot(&u0));

    let mut best = f64::INFINITY;
    for i in 0..n {
        let u = edge_dir(i);
        let v = Point2::new(-u.y, u.x);
        for _ in 0..n {
            let next = (right + 1) % n;
            if h[next].dot(&u) > h[right].dot(&u) {
                right = next;
            } else {
                break;
            }
        }
        for _ in 0..n {
            let next = (top + 1) % n;
            if h[next].dot(&v) > h[top].dot(&v) {
                top = next;
            } else {
                break;
            }
        }
        for _ in 0..n {
            let next = (left + 1) % n;
            if h[next].dot(&u) < h[left].dot(&u) {
                left = next;
            } else {
                break;
            }
        }
        let width = h[right].sub(&h[left]).dot(&u);
        let height = h[top].sub(&h[i]).dot(&v);
        best = best.min(width * height);
    }
    best.min(aabb_area(p))
}
