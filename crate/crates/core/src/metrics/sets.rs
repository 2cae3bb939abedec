use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Indicator, MetricRecord};
use crate::error::{Error, Result};

/// The four named indicator combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetName {
    Spacemate,
    BlockShape,
    #[serde(rename = "OneBMC")]
    OneBmc,
    AllBlockMetric,
}

impl SetName {
    pub const ALL: [SetName; 4] = [
        SetName::Spacemate,
        SetName::BlockShape,
        SetName::OneBmc,
        SetName::AllBlockMetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SetName::Spacemate => "Spacemate",
            SetName::BlockShape => "BlockShape",
            SetName::OneBmc => "OneBMC",
            SetName::AllBlockMetric => "AllBlockMetric",
        }
    }

    pub fn indicators(self) -> Vec<Indicator> {
        use Indicator::*;
        match self {
            SetName::Spacemate => vec![As, Bcr, Far, Osr],
            SetName::BlockShape => vec![Far, Ba, Bsf, Bss],
            SetName::OneBmc => vec![Wah, Bcr, Nob, Ba],
            SetName::AllBlockMetric => Indicator::ALL.to_vec(),
        }
    }
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for SetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SetName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownSet(s.to_string()))
    }
}

/// Corpus range of one indicator, used for min–max scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParam {
    pub indicator: Indicator,
    pub min: f64,
    pub max: f64,
}

impl NormParam {
    /// `(v - min) / (max - min)`, unclamped.
    pub fn scale(&self, v: f64) -> f64 {
        (v - self.min) / (self.max - self.min)
    }
}

/// A named indicator subset, optionally fitted to a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub name: SetName,
    pub indicators: Vec<Indicator>,
    /// Per-indicator corpus range, in `indicators` order; empty until fitted.
    #[serde(default)]
    pub norm_params: Vec<NormParam>,
}

impl MetricSet {
    pub fn new(name: SetName) -> Self {
        Self {
            name,
            indicators: name.indicators(),
            norm_params: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_fitted(&self) -> bool {
        self.norm_params.len() == self.indicators.len()
    }

    /// Raw indicator values of `rec` for this set, in set order.
    pub fn raw_values(&self, rec: &MetricRecord) -> Vec<f64> {
        self.indicators.iter().map(|&i| rec.value(i)).collect()
    }

    /// Min–max scales raw values with the stored corpus ranges (no clamping).
    pub fn scale(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if !self.is_fitted() {
            return Err(Error::InvalidConfig(format!("metric set {} is not fitted", self.name)));
        }
        if raw.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: raw.len(),
            });
        }
        Ok(self.norm_params.iter().zip(raw).map(|(p, &v)| p.scale(v)).collect())
    }
}

/// Looks up a metric set composition by name.
pub fn select_set(name: &str) -> Result<MetricSet> {
    Ok(MetricSet::new(name.parse()?))
}

/// Normalized feature vectors of a corpus under one metric set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    /// The fitted set the rows were scaled with.
    pub set: MetricSet,
    pub block_ids: Vec<String>,
    /// One row per block, every entry in [0, 1].
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }
}

/// Fits min–max ranges over the corpus and scales every record into [0, 1].
pub fn normalize(records: &[MetricRecord], set: &MetricSet) -> Result<FeatureMatrix> {
    if records.len() < 2 {
        return Err(Error::TooFewBlocks {
            needed: 2,
            found: records.len(),
        });
    }
    let mut fitted = MetricSet::new(set.name);
    fitted.indicators = set.indicators.clone();
    for &ind in &set.indicators {
        let (min, max) = records.iter().map(|r| r.value(ind)).fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), v| (lo.min(v), hi.max(v)),
        );
        if !(min < max) {
            return Err(Error::ConstantIndicator(ind.to_string()));
        }
        fitted.norm_params.push(NormParam { indicator: ind, min, max });
    }
    let rows = records
        .iter()
        .map(|r| fitted.scale(&fitted.raw_values(r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix {
        block_ids: records.iter().map(|r| r.block_id.clone()).collect(),
        set: fitted,
        rows,
    })
}
