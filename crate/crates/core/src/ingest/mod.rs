//! From raw GeoJSON building and road layers to a corpus of city blocks.
//!
//! The pipeline is: [`load_geodata`] → [`project_local`] → [`slice_blocks`]
//! → [`assign_buildings`] → [`impute_heights`]. [`run_pipeline`] chains the
//! steps and [`Corpus`] is the on-disk contract with everything downstream.

mod blocks;
mod corpus;
pub mod geojson;
pub mod projection;

use serde::{Deserialize, Serialize};

pub use blocks::{assign_buildings, impute_heights, slice_blocks, AssignedBlock};
pub use corpus::{Building, Block, Corpus, Provenance, CORPUS_VERSION};
pub use geojson::{load_geodata, GeoData, LonLatBuilding, LonLatRoad, STOREY_HEIGHT};
pub use projection::LocalProjection;

use crate::error::Result;
use crate::geometry::{Point2, PolygonM};

/// OSM `highway` classes that delimit blocks, plus a catch-all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoadClass {
    Primary,
    Secondary,
    Residential,
    Other,
}

impl RoadClass {
    pub fn from_highway(tag: &str) -> Self {
        match tag {
            "primary" => RoadClass::Primary,
            "secondary" => RoadClass::Secondary,
            "residential" => RoadClass::Residential,
            _ => RoadClass::Other,
        }
    }

    /// Whether roads of this class bound blocks.
    pub fn delimits_blocks(self) -> bool {
        !matches!(self, RoadClass::Other)
    }
}

/// A projected building whose height may still be unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBuilding {
    pub id: String,
    pub footprint: PolygonM,
    pub height: Option<f64>,
    pub storeys: Option<u32>,
}

/// A projected road centerline.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadSegment {
    pub polyline: Vec<Point2>,
    pub road_class: RoadClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Faces smaller than this are not blocks (m²).
    pub min_block_area: f64,
    /// Search radius for neighbour-height imputation (m).
    pub impute_radius: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            min_block_area: 1_000.0,
            impute_radius: 300.0,
        }
    }
}

/// Projects every feature onto a local metric plane centred on the dataset.
///
/// Footprint coordinates are snapped to the 1e-6 m grid; footprints that do
/// not survive validation are dropped with a warning.
pub fn project_local(data: &GeoData) -> (LocalProjection, Vec<RawBuilding>, Vec<RoadSegment>) {
    let proj = LocalProjection::centered_on(data.coordinates()).unwrap_or(LocalProjection::new(0.0, 0.0));
    let to_local = |c: &[f64; 2]| proj.forward(c[0], c[1]).snapped();

    let mut buildings = Vec::with_capacity(data.buildings.len());
    for b in &data.buildings {
        let mut rings = b.rings.iter().map(|r| r.iter().map(to_local).collect::<Vec<_>>());
        let Some(outer) = rings.next() else { continue };
        match PolygonM::new(outer, rings.collect()) {
            Ok(footprint) => buildings.push(RawBuilding {
                id: b.id.clone(),
                footprint,
                height: b.height,
                storeys: b.storeys,
            }),
            Err(e) => log::warn!(target: "ingest.footprint", "dropping building {}: {e}", b.id),
        }
    }
    let roads = data
        .roads
        .iter()
        .map(|r| RoadSegment {
            polyline: r.points.iter().map(to_local).collect(),
            road_class: r.class,
        })
        .collect();
    (proj, buildings, roads)
}

/// Runs the whole ingest pipeline on already-parsed geodata.
pub fn run_pipeline(data: &GeoData, cfg: &IngestConfig, provenance: Provenance) -> Result<Corpus> {
    let (proj, buildings, roads) = project_local(data);
    let faces = slice_blocks(&roads, cfg.min_block_area)?;
    let assigned = assign_buildings(faces, buildings);
    let blocks = impute_heights(assigned, cfg.impute_radius);
    if blocks.is_empty() {
        return Err(crate::Error::NoBlocksFound);
    }
    Ok(Corpus::new(proj, provenance, blocks))
}

/// Reads both files, runs the pipeline and records file digests.
pub fn ingest_files(
    buildings_path: &std::path::Path,
    roads_path: &std::path::Path,
    cfg: &IngestConfig,
) -> Result<Corpus> {
    let data = load_geodata(buildings_path, roads_path)?;
    let provenance = Provenance::from_files(buildings_path, roads_path, *cfg)?;
    run_pipeline(&data, cfg, provenance)
}
