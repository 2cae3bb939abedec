//! Seeded synthetic cities and feature fixtures.
//!
//! A city is a jittered grid of road nodes joined by residential and primary
//! streets, with a few interior street segments left out so that
//! neighbouring cells merge into larger blocks. Each cell is cut into lots
//! and most lots get one rectangular building, so footprints never overlap.
//! A cell draws a character (low-rise, mid-rise or towers) that sets its
//! typical height. Some buildings carry only a storey count and some no
//! height at all, which exercises imputation.

use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{point_in_polygon, Point2, PolygonM};
use crate::ingest::{
    run_pipeline, Corpus, GeoData, IngestConfig, LocalProjection, LonLatBuilding, LonLatRoad, Provenance, RoadClass,
};
use crate::metrics::{FeatureMatrix, MetricSet, NormParam, SetName};
use crate::som::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CityConfig {
    /// Road-grid cells along x and y.
    pub cells_x: usize,
    pub cells_y: usize,
    /// Mean spacing between parallel streets (m).
    pub spacing: f64,
    /// Node displacement as a fraction of the spacing.
    pub jitter: f64,
    /// Probability that an interior street segment is missing.
    pub drop_street: f64,
    /// Probability that a building has no height and no storey count.
    pub missing_height: f64,
    pub origin_lon: f64,
    pub origin_lat: f64,
    pub seed: u64,
}

impl Default for CityConfig {
    fn default() -> Self {
        Self {
            cells_x: 10,
            cells_y: 10,
            spacing: 110.0,
            jitter: 0.15,
            drop_street: 0.04,
            missing_height: 0.05,
            origin_lon: -73.98,
            origin_lat: 40.75,
            seed: 7,
        }
    }
}

impl CityConfig {
    /// A square-ish grid with about `blocks` cells.
    pub fn with_blocks(blocks: usize, seed: u64) -> Self {
        let side = (blocks as f64).sqrt().ceil() as usize;
        let rows = blocks.div_ceil(side);
        Self {
            cells_x: side,
            cells_y: rows.max(1),
            seed,
            ..Self::default()
        }
    }
}

/// Generates a city in WGS84 lon/lat.
pub fn city(cfg: &CityConfig) -> GeoData {
    let mut rng = SeededRng::new(cfg.seed);
    let (nx, ny) = (cfg.cells_x + 1, cfg.cells_y + 1);
    let mut nodes = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let mut jit = || (rng.next_f64() * 2.0 - 1.0) * cfg.jitter * cfg.spacing;
            let (dx, dy) = (jit(), jit());
            // the outer frame stays straight so every cell is bounded
            let dx = if i == 0 || i == nx - 1 { 0.0 } else { dx };
            let dy = if j == 0 || j == ny - 1 { 0.0 } else { dy };
            nodes.push(Point2::new(i as f64 * cfg.spacing + dx, j as f64 * cfg.spacing + dy));
        }
    }
    let node = |i: usize, j: usize| nodes[j * nx + i];

    let proj = LocalProjection::new(cfg.origin_lon, cfg.origin_lat);
    let to_ll = |p: Point2| {
        let (lon, lat) = proj.inverse(p);
        [lon, lat]
    };

    let mut roads = Vec::new();
    let street_class = |k: usize| if k % 5 == 0 { RoadClass::Primary } else { RoadClass::Residential };
    let mut street = |a: Point2, b: Point2, class: RoadClass, interior: bool, rng: &mut SeededRng| {
        if interior && rng.next_f64() < cfg.drop_street {
            return;
        }
        roads.push(LonLatRoad {
            points: vec![to_ll(a), to_ll(b)],
            class,
        });
    };
    for j in 0..ny {
        for i in 0..nx - 1 {
            let interior = j > 0 && j < ny - 1;
            street(node(i, j), node(i + 1, j), street_class(j), interior, &mut rng);
        }
    }
    for i in 0..nx {
        for j in 0..ny - 1 {
            let interior = i > 0 && i < nx - 1;
            street(node(i, j), node(i, j + 1), street_class(i), interior, &mut rng);
        }
    }
    // footpaths across the first row of cells; they must not split blocks
    for i in 0..cfg.cells_x.min(3) {
        let (a, b) = (node(i, 0), node(i + 1, 1));
        roads.push(LonLatRoad {
            points: vec![to_ll(a), to_ll(b)],
            class: RoadClass::Other,
        });
    }

    let mut buildings = Vec::new();
    for j in 0..cfg.cells_y {
        for i in 0..cfg.cells_x {
            let quad = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
            cell_buildings(&quad, &format!("c{i:04}_{j:04}"), cfg, &mut rng, &to_ll, &mut buildings);
        }
    }
    GeoData { buildings, roads }
}

fn cell_buildings(
    quad: &[Point2; 4],
    prefix: &str,
    cfg: &CityConfig,
    rng: &mut SeededRng,
    to_ll: &impl Fn(Point2) -> [f64; 2],
    out: &mut Vec<LonLatBuilding>,
) {
    let Ok(cell) = PolygonM::simple(quad.to_vec()) else { return };
    let c = cell.centroid();
    // keep buildings well off the street centrelines
    let inset: Vec<Point2> = quad
        .iter()
        .map(|p| Point2::new(c.x + (p.x - c.x) * 0.82, c.y + (p.y - c.y) * 0.82))
        .collect();
    let Ok(inset) = PolygonM::simple(inset) else { return };
    let (lo, hi) = inset.bounds();

    let base = match rng.below(10) {
        0..=4 => 6.0 + 10.0 * rng.next_f64(),
        5..=8 => 15.0 + 25.0 * rng.next_f64(),
        _ => 40.0 + 110.0 * rng.next_f64(),
    };
    let (lots_x, lots_y) = (1 + rng.below(4), 1 + rng.below(4));
    let fill = 0.35 + 0.55 * rng.next_f64();
    let (lw, lh) = ((hi.x - lo.x) / lots_x as f64, (hi.y - lo.y) / lots_y as f64);

    let mut n = 0;
    for ly in 0..lots_y {
        for lx in 0..lots_x {
            let skip = rng.next_f64() < 0.15;
            let fw = fill * (0.7 + 0.3 * rng.next_f64());
            let fh = fill * (0.7 + 0.3 * rng.next_f64());
            let angle = (rng.next_f64() - 0.5) * 0.5;
            let height = base * (0.7 + 0.6 * rng.next_f64());
            let tag = rng.next_f64();
            if skip {
                continue;
            }
            let centre = Point2::new(lo.x + (lx as f64 + 0.5) * lw, lo.y + (ly as f64 + 0.5) * lh);
            let (hw, hh) = (lw * fw / 2.0, lh * fh / 2.0);
            let (s, co) = angle.sin_cos();
            let mut corners: Vec<Point2> = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
                .iter()
                .map(|&(u, v)| Point2::new(centre.x + u * co - v * s, centre.y + u * s + v * co))
                .collect();
            let in_lot = |p: &Point2| {
                p.x >= lo.x + lx as f64 * lw
                    && p.x <= lo.x + (lx + 1) as f64 * lw
                    && p.y >= lo.y + ly as f64 * lh
                    && p.y <= lo.y + (ly + 1) as f64 * lh
            };
            if !corners.iter().all(in_lot) {
                corners = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
                    .iter()
                    .map(|&(u, v)| Point2::new(centre.x + u, centre.y + v))
                    .collect();
            }
            if !corners.iter().all(|p| point_in_polygon(p, &inset)) {
                continue;
            }
            let (height, storeys) = if tag < cfg.missing_height {
                (None, None)
            } else if tag < 0.3 {
                let levels = ((height / 3.0).round() as u32).max(1);
                (None, Some(levels))
            } else {
                (Some((height * 10.0).round() / 10.0), None)
            };
            let mut ring: Vec<[f64; 2]> = corners.iter().map(|&p| to_ll(p)).collect();
            ring.push(ring[0]);
            out.push(LonLatBuilding {
                id: format!("{prefix}_{n}"),
                rings: vec![ring],
                height,
                storeys,
            });
            n += 1;
        }
    }
}

/// Runs the ingest pipeline on generated cities, growing the grid until at
/// least `blocks` blocks survive, then keeps the first `blocks` by id.
pub fn corpus(blocks: usize, seed: u64) -> Result<Corpus> {
    let ingest = IngestConfig::default();
    let mut cfg = CityConfig::with_blocks(blocks, seed);
    loop {
        let mut c = run_pipeline(&city(&cfg), &ingest, Provenance::in_memory(ingest))?;
        if c.blocks.len() >= blocks {
            c.blocks.truncate(blocks);
            return Ok(c);
        }
        let grow = (blocks as f64 / c.blocks.len().max(1) as f64).sqrt() * 1.02;
        cfg.cells_x = ((cfg.cells_x as f64 * grow).ceil() as usize).max(cfg.cells_x + 1);
        cfg.cells_y = ((cfg.cells_y as f64 * grow).ceil() as usize).max(cfg.cells_y + 1);
    }
}

/// GeoJSON FeatureCollections for the buildings and roads of `data`.
pub fn to_geojson(data: &GeoData) -> (Value, Value) {
    let buildings: Vec<Value> = data
        .buildings
        .iter()
        .map(|b| {
            let mut props = serde_json::Map::new();
            props.insert("building".into(), json!("yes"));
            if let Some(h) = b.height {
                // alternate the two spellings the loader accepts
                let v = if b.id.len() % 2 == 0 { json!(h) } else { json!(format!("{h} m")) };
                props.insert("height".into(), v);
            }
            if let Some(s) = b.storeys {
                props.insert("building:levels".into(), json!(s.to_string()));
            }
            json!({
                "type": "Feature",
                "id": b.id,
                "properties": props,
                "geometry": {"type": "Polygon", "coordinates": b.rings},
            })
        })
        .collect();
    let roads: Vec<Value> = data
        .roads
        .iter()
        .map(|r| {
            let highway = match r.class {
                RoadClass::Primary => "primary",
                RoadClass::Secondary => "secondary",
                RoadClass::Residential => "residential",
                RoadClass::Other => "footway",
            };
            json!({
                "type": "Feature",
                "properties": {"highway": highway},
                "geometry": {"type": "LineString", "coordinates": r.points},
            })
        })
        .collect();
    (
        json!({"type": "FeatureCollection", "features": buildings}),
        json!({"type": "FeatureCollection", "features": roads}),
    )
}

/// Writes the two GeoJSON layers of `data`.
pub fn write_geojson(data: &GeoData, buildings_path: &Path, roads_path: &Path) -> Result<()> {
    let (b, r) = to_geojson(data);
    for (value, path) in [(b, buildings_path), (r, roads_path)] {
        let text = serde_json::to_string(&value)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// 200 four-dimensional samples: ids `A000..A099` uniform in [0, 0.1]⁴ and
/// `B000..B099` uniform in [0.9, 1]⁴. Scaled as if the corpus range were [0, 1].
pub fn two_clusters(seed: u64) -> FeatureMatrix {
    let mut rng = SeededRng::new(seed);
    let mut block_ids = Vec::with_capacity(200);
    let mut rows = Vec::with_capacity(200);
    for (label, base) in [("A", 0.0), ("B", 0.9)] {
        for i in 0..100 {
            block_ids.push(format!("{label}{i:03}"));
            rows.push((0..4).map(|_| base + 0.1 * rng.next_f64()).collect());
        }
    }
    let mut set = MetricSet::new(SetName::Spacemate);
    set.norm_params = set
        .indicators
        .iter()
        .map(|&indicator| NormParam { indicator, min: 0.0, max: 1.0 })
        .collect();
    FeatureMatrix { set, block_ids, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_city_ingests() {
        let cfg = CityConfig { cells_x: 4, cells_y: 3, ..Default::default() };
        let data = city(&cfg);
        assert_eq!(city(&cfg), data);
        let corpus = run_pipeline(&data, &IngestConfig::default(), Provenance::in_memory(IngestConfig::default())).unwrap();
        assert!(corpus.blocks.len() >= 8 && corpus.blocks.len() <= 12, "{}", corpus.blocks.len());
        corpus.validate().unwrap();
    }

    #[test]
    fn corpus_has_requested_size() {
        let c = corpus(60, 3).unwrap();
        assert_eq!(c.blocks.len(), 60);
    }

    #[test]
    fn geojson_round_trip() {
        let cfg = CityConfig { cells_x: 2, cells_y: 2, ..Default::default() };
        let data = city(&cfg);
        let (b, r) = to_geojson(&data);
        let back_b = crate::ingest::geojson::parse_buildings(&b.to_string(), "b").unwrap();
        let back_r = crate::ingest::geojson::parse_roads(&r.to_string(), "r").unwrap();
        assert_eq!(back_b.len(), data.buildings.len());
        assert_eq!(back_r.len(), data.roads.len());
        for (x, y) in back_b.iter().zip(&data.buildings) {
            assert_eq!(x.height, y.height.or(y.storeys.map(|s| 3.0 * s as f64)));
        }
    }
}
