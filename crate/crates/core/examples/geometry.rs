//! Polygon measures, oriented bounding boxes, spanning trees and face extraction.
//!
//!     cargo run --example geometry

use blockmorph::geometry::{aabb_area, delaunay_mst, min_obb_area, perimeter, point_in_polygon, polygonize, Point2, PolygonM};

fn main() -> blockmorph::Result<()> {
    let (s, c) = std::f64::consts::FRAC_PI_6.sin_cos();
    let rect: Vec<Point2> = [(0.0, 0.0), (1.0, 0.0), (1.0, 3.0), (0.0, 3.0)]
        .iter()
        .map(|&(x, y)| Point2::new(x * c - y * s, x * s + y * c))
        .collect();
    let p = PolygonM::simple(rect)?;
    println!("1x3 rectangle rotated 30 deg");
    println!("  area {:.6}  perimeter {:.6}", p.area(), perimeter(&p));
    println!("  axis-aligned box {:.6}  minimum oriented box {:.6}", aabb_area(&p), min_obb_area(&p));

    let holed = PolygonM::new(
        vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(10.0, 10.0), Point2::new(0.0, 10.0)],
        vec![vec![Point2::new(3.0, 3.0), Point2::new(7.0, 3.0), Point2::new(7.0, 7.0), Point2::new(3.0, 7.0)]],
    )?;
    println!("10x10 square with a 4x4 hole: area {}, (5,5) inside: {}", holed.area(), point_in_polygon(&Point2::new(5.0, 5.0), &holed));

    let pts: Vec<Point2> = (0..5).map(|i| Point2::new(i as f64, (i * i) as f64 * 0.5)).collect();
    let mst = delaunay_mst(&pts)?;
    println!("spanning tree over {} points: edges {:?}, length {:.4}", pts.len(), mst.edges, mst.total_length);

    let mut lines = Vec::new();
    for i in 0..=3 {
        let v = i as f64 * 100.0;
        lines.push((Point2::new(0.0, v), Point2::new(300.0, v)));
        lines.push((Point2::new(v, 0.0), Point2::new(v, 300.0)));
    }
    let faces = polygonize(&lines);
    println!("3x3 line grid -> {} faces of area {}", faces.len(), faces[0].area());
    Ok(())
}
