use rstar::primitives::{GeomWithData, Rectangle};
use rstar::RTree;

use super::{Block, Building, RawBuilding, RoadSegment, STOREY_HEIGHT};
use crate::error::{Error, Result};
use crate::geometry::{point_in_polygon, polygonize, Point2, PolygonM};

/// A block whose buildings may still lack heights.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignedBlock {
    pub id: String,
    pub boundary: PolygonM,
    pub buildings: Vec<RawBuilding>,
}

/// Carves blocks out of the primary, secondary and residential road network.
///
/// Faces smaller than `min_area` m² are discarded. The returned order is
/// deterministic (sorted by lowest vertex).
pub fn slice_blocks(roads: &[RoadSegment], min_area: f64) -> Result<Vec<PolygonM>> {
    let segments: Vec<(Point2, Point2)> = roads
        .iter()
        .filter(|r| r.road_class.delimits_blocks())
        .flat_map(|r| r.polyline.windows(2).map(|w| (w[0], w[1])))
        .collect();
    let faces: Vec<PolygonM> = polygonize(&segments)
        .into_iter()
        .filter(|f| f.area() >= min_area)
        .collect();
    if faces.is_empty() {
        return Err(Error::NoBlocksFound);
    }
    Ok(faces)
}

/// Block id for the face at `index` of the sliced arrangement.
pub(crate) fn block_id(index: usize) -> String {
    format!("B{index:06}")
}

/// Places each building in the block containing its footprint centroid.
///
/// A centroid on a shared boundary goes to the block with the lowest id.
/// Buildings outside every block are discarded, and so are blocks left
/// without buildings.
pub fn assign_buildings(blocks: Vec<PolygonM>, buildings: Vec<RawBuilding>) -> Vec<AssignedBlock> {
    let tree = RTree::bulk_load(
        blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let (lo, hi) = b.bounds();
                GeomWithData::new(Rectangle::from_corners([lo.x, lo.y], [hi.x, hi.y]), i)
            })
            .collect(),
    );
    let mut members: Vec<Vec<RawBuilding>> = vec![Vec::new(); blocks.len()];
    let mut discarded = 0usize;
    for b in buildings {
        let c = b.footprint.centroid();
        let host = tree
            .locate_all_at_point(&[c.x, c.y])
            .map(|r| r.data)
            .filter(|&i| point_in_polygon(&c, &blocks[i]))
            .min();
        match host {
            Some(i) => members[i].push(b),
            None => {
                log::debug!(target: "ingest.assign", "building {} lies outside every block", b.id);
                discarded += 1;
            }
        }
    }
    if discarded > 0 {
        log::info!(target: "ingest.assign", "discarded {discarded} buildings outside all blocks");
    }

    blocks
        .into_iter()
        .zip(members)
        .enumerate()
        .filter(|(_, (_, m))| !m.is_empty())
        .map(|(i, (boundary, buildings))| AssignedBlock {
            id: block_id(i),
            boundary,
            buildings,
        })
        .collect()
}

/// Storey count implied by a height at 3 m per storey, at least 1.
pub fn storeys_from_height(height: f64) -> u32 {
    ((height / STOREY_HEIGHT).round() as u32).max(1)
}

/// Fills in missing building heights.
///
/// A building without height takes the mean of the known heights in its
/// block; failing that, the mean of known-height buildings whose centroids
/// lie within `radius` m of its own centroid. Blocks where some building
/// still has no height are dropped. Missing storeys are backfilled from height.
pub fn impute_heights(blocks: Vec<AssignedBlock>, radius: f64) -> Vec<Block> {
    let known: Vec<GeomWithData<[f64; 2], f64>> = blocks
        .iter()
        .flat_map(|b| b.buildings.iter())
        .filter_map(|b| {
            let c = b.footprint.centroid();
            b.height.map(|h| GeomWithData::new([c.x, c.y], h))
        })
        .collect();
    let tree = RTree::bulk_load(known);
    let radius2 = radius * radius;

    let mut out = Vec::with_capacity(blocks.len());
    'blocks: for block in blocks {
        let heights: Vec<f64> = block.buildings.iter().filter_map(|b| b.height).collect();
        let block_mean = (!heights.is_empty()).then(|| mean(&heights));

        let mut buildings = Vec::with_capacity(block.buildings.len());
        for b in block.buildings {
            let height = match b.height.or(block_mean) {
                Some(h) => h,
                None => {
                    let c = b.footprint.centroid();
                    let mut near: Vec<(f64, f64, f64)> = tree
                        .locate_within_distance([c.x, c.y], radius2)
                        .map(|p| (p.geom()[0], p.geom()[1], p.data))
                        .collect();
                    if near.is_empty() {
                        log::info!(
                            target: "ingest.impute",
                            "dropping block {}: no known heights within {radius} m of building {}",
                            block.id, b.id
                        );
                        continue 'blocks;
                    }
                    // fixed summation order
                    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
                    near.iter().map(|p| p.2).sum::<f64>() / near.len() as f64
                }
            };
            let storeys = b.storeys.unwrap_or_else(|| storeys_from_height(height));
            buildings.push(Building {
                id: b.id,
                footprint: b.footprint,
                height,
                storeys,
            });
        }
        out.push(Block {
            id: block.id,
            boundary: block.boundary,
            buildings,
        });
    }
    out
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
