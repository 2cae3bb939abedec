use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{IngestConfig, LocalProjection};
use crate::error::{Error, Result};
use crate::geometry::{point_in_polygon, PolygonM};
use crate::json::{read_json, write_json};

pub const CORPUS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub id: String,
    pub footprint: PolygonM,
    /// Meters, always > 0.
    pub height: f64,
    /// Always ≥ 1.
    pub storeys: u32,
}

/// A bounded face of the road arrangement and the buildings whose centroids it contains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub id: String,
    pub boundary: PolygonM,
    pub buildings: Vec<Building>,
}

impl Block {
    /// Checks the per-block invariants: positive heights, storeys ≥ 1, building
    /// centroids inside the boundary and a boundary of at least `min_area` m².
    pub fn validate(&self, min_area: f64) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidGeometry(format!("block {}: {msg}", self.id)));
        if self.boundary.area() < min_area {
            return invalid(format!("area {} below minimum {min_area}", self.boundary.area()));
        }
        for b in &self.buildings {
            if !(b.height.is_finite() && b.height > 0.0) {
                return invalid(format!("building {} has height {}", b.id, b.height));
            }
            if b.storeys < 1 {
                return invalid(format!("building {} has no storeys", b.id));
            }
            if !point_in_polygon(&b.footprint.centroid(), &self.boundary) {
                return invalid(format!("building {} centroid outside the block", b.id));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Hex SHA-256 digests of the input files.
    pub buildings_sha256: String,
    pub roads_sha256: String,
    pub config: IngestConfig,
}

impl Provenance {
    pub fn from_files(buildings: &Path, roads: &Path, config: IngestConfig) -> Result<Self> {
        Ok(Self {
            buildings_sha256: file_digest(buildings)?,
            roads_sha256: file_digest(roads)?,
            config,
        })
    }

    /// Provenance for corpora built in memory.
    pub fn in_memory(config: IngestConfig) -> Self {
        Self {
            buildings_sha256: String::new(),
            roads_sha256: String::new(),
            config,
        }
    }
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub version: u32,
    pub crs_note: String,
    pub origin: LocalProjection,
    pub provenance: Provenance,
    /// Sorted by id; ids are unique.
    pub blocks: Vec<Block>,
}

impl Corpus {
    pub fn new(origin: LocalProjection, provenance: Provenance, mut blocks: Vec<Block>) -> Self {
        blocks.sort_by(|a, b| a.id.cmp(&b.id));
        for b in &mut blocks {
            b.buildings.sort_by(|x, y| x.id.cmp(&y.id));
        }
        Self {
            version: CORPUS_VERSION,
            crs_note: origin.describe(),
            origin,
            provenance,
            blocks,
        }
    }

    pub fn block(&self, id: &str) -> Option<&Block> {
        self.blocks
            .binary_search_by(|b| b.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.blocks[i])
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.blocks.len());
        for w in self.blocks.windows(2) {
            if w[0].id >= w[1].id {
                return Err(Error::InvalidGeometry(format!(
                    "corpus blocks not strictly sorted by id at {:?}",
                    w[1].id
                )));
            }
        }
        for b in &self.blocks {
            if !seen.insert(b.id.as_str()) {
                return Err(Error::InvalidGeometry(format!("duplicate block id {:?}", b.id)));
            }
            b.validate(self.provenance.config.min_block_area)?;
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let corpus: Corpus = read_json(path)?;
        corpus.validate()?;
        Ok(corpus)
    }
}
