use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Indicator, MetricRecord, PearsonMatrix, SetName};
use crate::error::{Error, Result};
use crate::json::{read_json, write_json};

pub const METRICS_VERSION: u32 = 1;

/// Column order of the records CSV.
pub const CSV_HEADER: [&str; 16] = [
    "block_id", "MaxH", "MinH", "AveH", "SDH", "WAH", "AS", "BCR", "FAR", "CAR", "OSR", "GHWR",
    "NOB", "BA", "BSF", "BSS",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetComposition {
    pub name: SetName,
    pub indicators: Vec<Indicator>,
}

/// Per-block records of a corpus plus its correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub version: u32,
    pub set_compositions: Vec<SetComposition>,
    /// Sorted by block id.
    pub records: Vec<MetricRecord>,
    /// Absent when some indicator has zero variance or the corpus is too small.
    pub pearson: Option<PearsonMatrix>,
}

impl MetricsFile {
    pub fn new(mut records: Vec<MetricRecord>, pearson: Option<PearsonMatrix>) -> Self {
        records.sort_by(|a, b| a.block_id.cmp(&b.block_id));
        Self {
            version: METRICS_VERSION,
            set_compositions: SetName::ALL
                .iter()
                .map(|&name| SetComposition {
                    name,
                    indicators: name.indicators(),
                })
                .collect(),
            records,
            pearson,
        }
    }

    pub fn record(&self, block_id: &str) -> Option<&MetricRecord> {
        self.records
            .binary_search_by(|r| r.block_id.as_str().cmp(block_id))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut file: MetricsFile = read_json(path)?;
        file.records.sort_by(|a, b| a.block_id.cmp(&b.block_id));
        Ok(file)
    }
}

/// Writes records as CSV with [`CSV_HEADER`] columns.
pub fn write_csv(records: &[MetricRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
    for r in records {
        let mut row = vec![r.block_id.clone()];
        row.extend(Indicator::ALL.iter().map(|&i| match i {
            Indicator::Nob => r.nob.to_string(),
            _ => r.value(i).to_string(),
        }));
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path.display().to_string(), format!("{other:?}")),
    }
}
