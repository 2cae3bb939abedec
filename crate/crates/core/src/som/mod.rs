//! Online self-organising maps on a rectangular grid and the distance
//! encoding of samples against a trained codebook.

mod file;
pub mod rng;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use file::{EncodingsFile, MODEL_VERSION};
pub use rng::SeededRng;

use crate::error::{Error, Result};
use crate::metrics::{FeatureMatrix, MetricSet, NormParam, SetName};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub grid_rows: usize,
    pub grid_cols: usize,
    /// Epochs; every sample is presented once per epoch.
    pub iterations: usize,
    pub alpha0: f64,
    /// Initial neighbourhood radius in grid units.
    pub sigma0: f64,
    pub seed: u64,
}

impl Default for SomConfig {
    fn default() -> Self {
        Self::with_grid(10, 10)
    }
}

impl SomConfig {
    /// Default schedule for a `rows × cols` grid; sigma0 is half the longer side.
    pub fn with_grid(rows: usize, cols: usize) -> Self {
        Self {
            grid_rows: rows,
            grid_cols: cols,
            iterations: 1000,
            alpha0: 0.5,
            sigma0: rows.max(cols) as f64 / 2.0,
            seed: DEFAULT_SEED,
        }
    }

    pub fn neurons(&self) -> usize {
        self.grid_rows * self.grid_cols
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.grid_rows < 2 || self.grid_cols < 2 {
            return bad(format!("grid {}x{} must be at least 2x2", self.grid_rows, self.grid_cols));
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1".into());
        }
        if !(self.alpha0 > 0.0 && self.alpha0 <= 1.0) {
            return bad(format!("alpha0 {} outside (0, 1]", self.alpha0));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return bad(format!("sigma0 {} must be positive", self.sigma0));
        }
        Ok(())
    }

    /// Learning rate and radius for epoch `t`.
    pub fn schedule(&self, t: usize) -> (f64, f64) {
        let frac = 1.0 - t as f64 / self.iterations as f64;
        (self.alpha0 * frac, (self.sigma0 * frac).max(0.5))
    }
}

/// A trained codebook. Neuron `j` sits at grid cell `(j / cols, j % cols)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "file::ModelRepr", try_from = "file::ModelRepr")]
pub struct SomModel {
    pub config: SomConfig,
    pub set_name: SetName,
    pub dim: usize,
    pub norm_params: Vec<NormParam>,
    /// Row-major `K × dim`.
    weights: Vec<f64>,
}

/// Distances from one sample to every neuron, in neuron order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingVector {
    pub block_id: String,
    pub values: Vec<f64>,
}

impl SomModel {
    /// Builds a model from explicit weights (one vector per neuron).
    pub fn from_weights(
        config: SomConfig,
        set_name: SetName,
        norm_params: Vec<NormParam>,
        weights: Vec<Vec<f64>>,
    ) -> Result<Self> {
        config.validate()?;
        if weights.len() != config.neurons() {
            return Err(Error::DimensionMismatch {
                expected: config.neurons(),
                found: weights.len(),
            });
        }
        let dim = weights.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::EmptyFeatures);
        }
        if let Some(w) = weights.iter().find(|w| w.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: w.len() });
        }
        if !norm_params.is_empty() && norm_params.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: norm_params.len(),
            });
        }
        let flat: Vec<f64> = weights.into_iter().flatten().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("model weights must be finite".into()));
        }
        Ok(Self {
            config,
            set_name,
            dim,
            norm_params,
            weights: flat,
        })
    }

    /// The untrained map: weights uniform in [0, 1) drawn from the seed.
    pub fn initialize(features: &FeatureMatrix, cfg: &SomConfig) -> Result<Self> {
        Self::seeded(features, cfg).map(|(m, _)| m)
    }

    /// Initial model plus the generator positioned right after the weight draws.
    fn seeded(features: &FeatureMatrix, cfg: &SomConfig) -> Result<(Self, SeededRng)> {
        cfg.validate()?;
        check_features(features)?;
        let dim = features.dim();
        let mut rng = SeededRng::new(cfg.seed);
        let weights = (0..cfg.neurons() * dim).map(|_| rng.next_f64()).collect();
        let model = Self {
            config: *cfg,
            set_name: features.set.name,
            dim,
            norm_params: features.set.norm_params.clone(),
            weights,
        };
        Ok((model, rng))
    }

    /// Online training with linearly decaying rate and Gaussian neighbourhood.
    ///
    /// The generator that initialised the weights then shuffles the sample
    /// order afresh at every epoch.
    pub fn train(features: &FeatureMatrix, cfg: &SomConfig) -> Result<Self> {
        let (mut model, mut rng) = Self::seeded(features, cfg)?;
        let dim = model.dim;
        let weights = &mut model.weights;

        let (rows, cols) = (cfg.grid_rows, cfg.grid_cols);
        let max_g2 = (rows - 1).pow(2) + (cols - 1).pow(2);
        let mut kernel = vec![0.0; max_g2 + 1];
        let mut order: Vec<usize> = Vec::with_capacity(features.len());

        for t in 0..cfg.iterations {
            let (alpha, sigma) = cfg.schedule(t);
            let denom = 2.0 * sigma * sigma;
            for (g2, h) in kernel.iter_mut().enumerate() {
                *h = libm::exp(-(g2 as f64) / denom);
            }
            order.clear();
            order.extend(0..features.len());
            rng.shuffle(&mut order);

            for &s in &order {
                let x = &features.rows[s];
                let b = nearest(weights, dim, x);
                let (br, bc) = (b / cols, b % cols);
                for (j, w) in weights.chunks_exact_mut(dim).enumerate() {
                    let (r, c) = (j / cols, j % cols);
                    let g2 = r.abs_diff(br).pow(2) + c.abs_diff(bc).pow(2);
                    let rate = alpha * kernel[g2];
                    for (wm, xm) in w.iter_mut().zip(x) {
                        *wm += rate * (xm - *wm);
                    }
                }
            }
        }
        Ok(model)
    }

    pub fn neurons(&self) -> usize {
        self.config.neurons()
    }

    pub fn weight(&self, j: usize) -> &[f64] {
        &self.weights[j * self.dim..(j + 1) * self.dim]
    }

    pub fn weights(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks_exact(self.dim)
    }

    /// The metric set (with corpus ranges) the model was trained on.
    pub fn metric_set(&self) -> MetricSet {
        let mut set = MetricSet::new(self.set_name);
        set.norm_params = self.norm_params.clone();
        set
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Best-matching unit: nearest neuron by Euclidean distance, lowest index on ties.
    pub fn bmu(&self, x: &[f64]) -> Result<usize> {
        self.check_dim(x)?;
        Ok(nearest(&self.weights, self.dim, x))
    }

    /// `[d(x, w_1), …, d(x, w_K)]`.
    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.weights().map(|w| euclidean(w, x)).collect())
    }

    /// Encodes every row of a feature matrix.
    pub fn encode_all(&self, features: &FeatureMatrix) -> Result<Vec<EncodingVector>> {
        features
            .block_ids
            .iter()
            .zip(&features.rows)
            .map(|(id, x)| {
                Ok(EncodingVector {
                    block_id: id.clone(),
                    values: self.encode(x)?,
                })
            })
            .collect()
    }

    /// Neuron → block ids whose BMU it is. Every neuron has an entry, possibly empty.
    pub fn assign(&self, features: &FeatureMatrix) -> Result<BTreeMap<usize, Vec<String>>> {
        let mut out: BTreeMap<usize, Vec<String>> = (0..self.neurons()).map(|j| (j, Vec::new())).collect();
        for (id, x) in features.block_ids.iter().zip(&features.rows) {
            out.get_mut(&self.bmu(x)?).unwrap().push(id.clone());
        }
        Ok(out)
    }

    /// Mean distance from each sample to its BMU weight.
    pub fn quantization_error(&self, features: &FeatureMatrix) -> Result<f64> {
        if features.is_empty() {
            return Err(Error::EmptyFeatures);
        }
        let mut total = 0.0;
        for x in &features.rows {
            let b = self.bmu(x)?;
            total += euclidean(self.weight(b), x);
        }
        Ok(total / features.len() as f64)
    }
}

fn check_features(features: &FeatureMatrix) -> Result<()> {
    if features.is_empty() || features.dim() == 0 {
        return Err(Error::EmptyFeatures);
    }
    if let Some(r) = features.rows.iter().find(|r| r.len() != features.dim()) {
        return Err(Error::DimensionMismatch {
            expected: features.dim(),
            found: r.len(),
        });
    }
    Ok(())
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

fn nearest(weights: &[f64], dim: usize, x: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (j, w) in weights.chunks_exact(dim).enumerate() {
        let d = euclidean(w, x);
        if d < best.1 {
            best = (j, d);
        }
    }
    best.0
}
