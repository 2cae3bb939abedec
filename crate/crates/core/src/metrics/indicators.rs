use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{aabb_area, delaunay_mst, min_obb_area, perimeter, Point2};
use crate::ingest::{Block, Corpus};

/// One of the 15 morphology indicators, in canonical table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Indicator {
    MaxH,
    MinH,
    AveH,
    #[serde(rename = "SDH")]
    Sdh,
    #[serde(rename = "WAH")]
    Wah,
    #[serde(rename = "AS")]
    As,
    #[serde(rename = "BCR")]
    Bcr,
    #[serde(rename = "FAR")]
    Far,
    #[serde(rename = "CAR")]
    Car,
    #[serde(rename = "OSR")]
    Osr,
    #[serde(rename = "GHWR")]
    Ghwr,
    #[serde(rename = "NOB")]
    Nob,
    #[serde(rename = "BA")]
    Ba,
    #[serde(rename = "BSF")]
    Bsf,
    #[serde(rename = "BSS")]
    Bss,
}

impl Indicator {
    pub const ALL: [Indicator; 15] = [
        Indicator::MaxH,
        Indicator::MinH,
        Indicator::AveH,
        Indicator::Sdh,
        Indicator::Wah,
        Indicator::As,
        Indicator::Bcr,
        Indicator::Far,
        Indicator::Car,
        Indicator::Osr,
        Indicator::Ghwr,
        Indicator::Nob,
        Indicator::Ba,
        Indicator::Bsf,
        Indicator::Bss,
    ];

    /// Short name, e.g. `"WAH"`.
    pub fn abbrev(self) -> &'static str {
        match self {
            Indicator::MaxH => "MaxH",
            Indicator::MinH => "MinH",
            Indicator::AveH => "AveH",
            Indicator::Sdh => "SDH",
            Indicator::Wah => "WAH",
            Indicator::As => "AS",
            Indicator::Bcr => "BCR",
            Indicator::Far => "FAR",
            Indicator::Car => "CAR",
            Indicator::Osr => "OSR",
            Indicator::Ghwr => "GHWR",
            Indicator::Nob => "NOB",
            Indicator::Ba => "BA",
            Indicator::Bsf => "BSF",
            Indicator::Bss => "BSS",
        }
    }

    /// Field name in [`MetricRecord`] serialization, e.g. `"max_h"`.
    pub fn field(self) -> &'static str {
        match self {
            Indicator::MaxH => "max_h",
            Indicator::MinH => "min_h",
            Indicator::AveH => "ave_h",
            Indicator::Sdh => "sdh",
            Indicator::Wah => "wah",
            Indicator::As => "as",
            Indicator::Bcr => "bcr",
            Indicator::Far => "far",
            Indicator::Car => "car",
            Indicator::Osr => "osr",
            Indicator::Ghwr => "ghwr",
            Indicator::Nob => "nob",
            Indicator::Ba => "ba",
            Indicator::Bsf => "bsf",
            Indicator::Bss => "bss",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.abbrev())
    }
}

impl FromStr for Indicator {
    type Err = Error;

    /// Accepts the abbreviation or the record field name, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.abbrev().eq_ignore_ascii_case(s) || i.field().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownIndicator(s.to_string()))
    }
}

/// Indicator values of one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub block_id: String,
    pub max_h: f64,
    pub min_h: f64,
    pub ave_h: f64,
    pub sdh: f64,
    pub wah: f64,
    #[serde(rename = "as")]
    pub as_: f64,
    pub bcr: f64,
    pub far: f64,
    pub car: f64,
    pub osr: f64,
    pub ghwr: f64,
    pub nob: u32,
    pub ba: f64,
    pub bsf: f64,
    pub bss: f64,
}

impl MetricRecord {
    pub fn value(&self, ind: Indicator) -> f64 {
        match ind {
            Indicator::MaxH => self.max_h,
            Indicator::MinH => self.min_h,
            Indicator::AveH => self.ave_h,
            Indicator::Sdh => self.sdh,
            Indicator::Wah => self.wah,
            Indicator::As => self.as_,
            Indicator::Bcr => self.bcr,
            Indicator::Far => self.far,
            Indicator::Car => self.car,
            Indicator::Osr => self.osr,
            Indicator::Ghwr => self.ghwr,
            Indicator::Nob => self.nob as f64,
            Indicator::Ba => self.ba,
            Indicator::Bsf => self.bsf,
            Indicator::Bss => self.bss,
        }
    }

    /// All 15 values in canonical order.
    pub fn values(&self) -> [f64; 15] {
        Indicator::ALL.map(|i| self.value(i))
    }

    /// Describes every violated record invariant; empty when the record is sound.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(i) = Indicator::ALL.into_iter().find(|&i| !self.value(i).is_finite()) {
            out.push(format!("{i} is not finite"));
        }
        if !(self.min_h <= self.ave_h && self.ave_h <= self.max_h) {
            out.push(format!("AveH {} outside [{}, {}]", self.ave_h, self.min_h, self.max_h));
        }
        if !(self.min_h <= self.wah && self.wah <= self.max_h) {
            out.push(format!("WAH {} outside [{}, {}]", self.wah, self.min_h, self.max_h));
        }
        if !(self.bcr > 0.0 && self.bcr <= 1.0) {
            out.push(format!("BCR {} outside (0, 1]", self.bcr));
        }
        if !(self.bsf <= self.bss) {
            out.push(format!("BSF {} exceeds BSS {}", self.bsf, self.bss));
        }
        out
    }
}

/// Relative slack allowed when footprints tile the block exactly.
const COVERAGE_SLACK: f64 = 1e-9;

/// Computes the 15 indicators for one block.
///
/// Floor plates are uniform (every storey has the footprint area), SDH uses
/// the N−1 denominator and is 0 for a single building, and GHWR uses the
/// Delaunay-restricted minimum spanning tree over building centroids as the
/// spacing network (0 for a single building).
pub fn compute_metrics(b: &Block) -> Result<MetricRecord> {
    let n = b.buildings.len();
    if n == 0 {
        return Err(Error::InvalidGeometry(format!("block {} has no buildings", b.id)));
    }
    let nf = n as f64;
    let block_area = b.boundary.area();

    let heights: Vec<f64> = b.buildings.iter().map(|x| x.height).collect();
    let areas: Vec<f64> = b.buildings.iter().map(|x| x.footprint.area()).collect();
    let storeys: Vec<f64> = b.buildings.iter().map(|x| x.storeys as f64).collect();

    let footprint_area: f64 = areas.iter().sum();
    if footprint_area > block_area * (1.0 + COVERAGE_SLACK) {
        return Err(Error::DegenerateBlock {
            block_id: b.id.clone(),
            footprint_area,
            block_area,
        });
    }

    let max_h = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_h = heights.iter().copied().fold(f64::INFINITY, f64::min);
    let ave_h = (heights.iter().sum::<f64>() / nf).clamp(min_h, max_h);
    let sdh = if n > 1 {
        (heights.iter().map(|h| (h - ave_h).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt()
    } else {
        0.0
    };
    let wah = (areas.iter().zip(&heights).map(|(a, h)| a * h).sum::<f64>() / footprint_area)
        .clamp(min_h, max_h);
    let as_ = storeys.iter().sum::<f64>() / nf;

    let floor_area: f64 = areas.iter().zip(&storeys).map(|(a, s)| a * s).sum();
    let open_area = (block_area - footprint_area).max(0.0);
    let bcr = (footprint_area / block_area).min(1.0);
    let far = floor_area / block_area;

    let wall_area: f64 = b
        .buildings
        .iter()
        .zip(&heights)
        .map(|(x, h)| perimeter(&x.footprint) * h)
        .sum();
    let roof_area = footprint_area;
    let car = (wall_area + roof_area + open_area) / block_area;
    let osr = open_area / floor_area;

    let ghwr = if n > 1 {
        let centroids: Vec<Point2> = b.buildings.iter().map(|x| x.footprint.centroid()).collect();
        let mean_spacing = delaunay_mst(&centroids)?.total_length / (nf - 1.0);
        if mean_spacing > 0.0 {
            ave_h / mean_spacing
        } else {
            0.0
        }
    } else {
        0.0
    };

    let bsf = (block_area / aabb_area(&b.boundary)).min(1.0);
    let bss = (block_area / min_obb_area(&b.boundary)).min(1.0);

    Ok(MetricRecord {
        block_id: b.id.clone(),
        max_h,
        min_h,
        ave_h,
        sdh,
        wah,
        as_,
        bcr,
        far,
        car,
        osr,
        ghwr,
        nob: n as u32,
        ba: block_area,
        bsf,
        bss,
    })
}

/// Computes records for every block in id order, skipping degenerate blocks.
///
/// Returns the records and the errors of the skipped blocks.
pub fn compute_corpus_metrics(corpus: &Corpus) -> (Vec<MetricRecord>, Vec<Error>) {
    let results: Vec<Result<MetricRecord>> = std::thread::scope(|s| {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(16);
        let chunk = corpus.blocks.len().div_ceil(workers).max(1);
        let handles: Vec<_> = corpus
            .blocks
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(compute_metrics).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("metrics worker panicked"))
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => skipped.push(e),
        }
    }
    (records, skipped)
}
