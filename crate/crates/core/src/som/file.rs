use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EncodingVector, SomConfig, SomModel};
use crate::error::{Error, Result};
use crate::json::{read_json, write_json};
use crate::metrics::{NormParam, SetName};

pub const MODEL_VERSION: u32 = 1;

/// On-disk layout of a model: weights as a `K × M` nested array.
#[derive(Serialize, Deserialize)]
pub(super) struct ModelRepr {
    version: u32,
    set_name: SetName,
    dim: usize,
    config: SomConfig,
    norm_params: Vec<NormParam>,
    weights: Vec<Vec<f64>>,
}

impl From<SomModel> for ModelRepr {
    fn from(m: SomModel) -> Self {
        Self {
            version: MODEL_VERSION,
            set_name: m.set_name,
            dim: m.dim,
            weights: m.weights().map(<[f64]>::to_vec).collect(),
            config: m.config,
            norm_params: m.norm_params,
        }
    }
}

impl TryFrom<ModelRepr> for SomModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        if r.version != MODEL_VERSION {
            return Err(Error::InvalidConfig(format!("unsupported model version {}", r.version)));
        }
        let m = SomModel::from_weights(r.config, r.set_name, r.norm_params, r.weights)?;
        if m.dim != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, found: m.dim });
        }
        Ok(m)
    }
}

impl SomModel {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

/// Encodings of every corpus block under one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingsFile {
    pub version: u32,
    pub set_name: SetName,
    pub neurons: usize,
    /// Sorted by block id.
    pub encodings: Vec<EncodingVector>,
}

impl EncodingsFile {
    pub fn new(model: &SomModel, mut encodings: Vec<EncodingVector>) -> Self {
        encodings.sort_by(|a, b| a.block_id.cmp(&b.block_id));
        Self {
            version: MODEL_VERSION,
            set_name: model.set_name,
            neurons: model.neurons(),
            encodings,
        }
    }

    pub fn get(&self, block_id: &str) -> Option<&EncodingVector> {
        self.encodings
            .binary_search_by(|e| e.block_id.as_str().cmp(block_id))
            .ok()
            .map(|i| &self.encodings[i])
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut f: EncodingsFile = read_json(path)?;
        if let Some(e) = f.encodings.iter().find(|e| e.values.len() != f.neurons) {
            return Err(Error::DimensionMismatch {
                expected: f.neurons,
                found: e.values.len(),
            });
        }
        f.encodings.sort_by(|a, b| a.block_id.cmp(&b.block_id));
        Ok(f)
    }
}
