//! Ranked case retrieval in encoding space.
//!
//! A query is either a stored block (its precomputed encoding is reused) or a
//! set of raw indicator values, which are scaled with the model's corpus
//! ranges and encoded against the codebook. Every stored encoding is then
//! scored by Euclidean distance; the full scan is the reference algorithm.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metrics::{Indicator, MetricRecord, SetName};
use crate::som::{euclidean, EncodingVector, EncodingsFile, SomModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuerySource {
    Block { block_id: String },
    Values { values: BTreeMap<String, f64> },
}

impl QuerySource {
    pub fn block(id: impl Into<String>) -> Self {
        QuerySource::Block { block_id: id.into() }
    }

    /// Raw values of the given record, keyed by indicator abbreviation.
    pub fn from_record(rec: &MetricRecord) -> Self {
        QuerySource::Values {
            values: Indicator::ALL.iter().map(|&i| (i.abbrev().to_string(), rec.value(i))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub set: SetName,
    pub source: QuerySource,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub exclude_self: bool,
}

fn default_k() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub block_id: String,
    #[serde(serialize_with = "six_decimals")]
    pub distance: f64,
    /// 1-based.
    pub rank: usize,
}

fn six_decimals<S: Serializer>(d: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(format!("{d:.6}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// A query in encoding space.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedQuery {
    pub values: Vec<f64>,
    /// The block the query came from, if any.
    pub origin: Option<String>,
    /// One message per clamped indicator.
    pub warnings: Vec<String>,
}

/// Scales raw indicator values into [0, 1] with the model's corpus ranges.
///
/// Keys may be abbreviations or record field names; indicators outside the
/// model's set are ignored. Out-of-range values are clamped with a warning,
/// or rejected when `strict` is set.
pub fn normalize_values(
    values: &BTreeMap<String, f64>,
    model: &SomModel,
    strict: bool,
) -> Result<(Vec<f64>, Vec<String>)> {
    let set = model.metric_set();
    if !set.is_fitted() {
        return Err(Error::InvalidConfig(format!("model for {} has no corpus ranges", set.name)));
    }
    let mut given: BTreeMap<Indicator, f64> = BTreeMap::new();
    for (k, &v) in values {
        given.insert(k.parse()?, v);
    }
    let mut scaled = Vec::with_capacity(set.dim());
    let mut warnings = Vec::new();
    for p in &set.norm_params {
        let v = *given
            .get(&p.indicator)
            .ok_or_else(|| Error::MissingIndicator(p.indicator.to_string()))?;
        if !v.is_finite() {
            return Err(Error::parse("query", format!("{} is not a finite number", p.indicator)));
        }
        let s = p.scale(v);
        if (0.0..=1.0).contains(&s) {
            scaled.push(s);
            continue;
        }
        if strict {
            return Err(Error::OutOfRange {
                indicator: p.indicator.to_string(),
                value: v,
                min: p.min,
                max: p.max,
            });
        }
        let msg = format!(
            "{} = {v} outside corpus range [{}, {}], clamped",
            p.indicator, p.min, p.max
        );
        log::warn!(target: "retrieval.out_of_range", "{msg}");
        warnings.push(msg);
        scaled.push(s.clamp(0.0, 1.0));
    }
    Ok((scaled, warnings))
}

/// Turns a query into an encoding-space vector under `model`.
pub fn encode_query(
    source: &QuerySource,
    model: &SomModel,
    encodings: &EncodingsFile,
    strict: bool,
) -> Result<EncodedQuery> {
    check_pair(model, encodings)?;
    match source {
        QuerySource::Block { block_id } => {
            let e = encodings
                .get(block_id)
                .ok_or_else(|| Error::UnknownBlock(block_id.clone()))?;
            Ok(EncodedQuery {
                values: e.values.clone(),
                origin: Some(block_id.clone()),
                warnings: Vec::new(),
            })
        }
        QuerySource::Values { values } => {
            let (x, warnings) = normalize_values(values, model, strict)?;
            Ok(EncodedQuery {
                values: model.encode(&x)?,
                origin: None,
                warnings,
            })
        }
    }
}

fn check_pair(model: &SomModel, encodings: &EncodingsFile) -> Result<()> {
    if model.set_name != encodings.set_name {
        return Err(Error::InvalidConfig(format!(
            "encodings are for {} but the model is for {}",
            encodings.set_name, model.set_name
        )));
    }
    if model.neurons() != encodings.neurons {
        return Err(Error::DimensionMismatch {
            expected: model.neurons(),
            found: encodings.neurons,
        });
    }
    Ok(())
}

/// Top-k stored encodings nearest to `query`.
///
/// Ordered by distance, then block id; the query's own block, if any, goes
/// first among equal distances, or is dropped when `exclude_self` is set.
pub fn rank(
    query: &EncodedQuery,
    encodings: &[EncodingVector],
    k: usize,
    exclude_self: bool,
) -> Result<Vec<RankedResult>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let origin = query.origin.as_deref();
    let mut scored = Vec::with_capacity(encodings.len());
    for e in encodings {
        if e.values.len() != query.values.len() {
            return Err(Error::DimensionMismatch {
                expected: query.values.len(),
                found: e.values.len(),
            });
        }
        let is_self = origin == Some(e.block_id.as_str());
        if is_self && exclude_self {
            continue;
        }
        scored.push((euclidean(&query.values, &e.values), !is_self, e.block_id.as_str()));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(b.2)));
    Ok(scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (distance, _, id))| RankedResult {
            block_id: id.to_string(),
            distance,
            rank: i + 1,
        })
        .collect())
}

/// Encodes and ranks in one step.
pub fn retrieve(
    query: &Query,
    model: &SomModel,
    encodings: &EncodingsFile,
    strict: bool,
) -> Result<(EncodedQuery, Vec<RankedResult>)> {
    if query.set != model.set_name {
        return Err(Error::UnknownSet(query.set.to_string()));
    }
    let q = encode_query(&query.source, model, encodings, strict)?;
    let results = rank(&q, &encodings.encodings, query.k, query.exclude_self)?;
    Ok((q, results))
}

/// Pretty JSON array of results, as written by the command line tool.
pub fn results_json(results: &[RankedResult]) -> String {
    let mut s = serde_json::to_string_pretty(results).expect("results serialize");
    s.push('\n');
    s
}

pub fn write_results(results: &[RankedResult], path: &Path) -> Result<()> {
    std::fs::write(path, results_json(results)).map_err(|e| Error::io(path, e))
}
