//! Side-by-side retrieval reports across metric sets and the visual
//! artifacts that go with them: SOM grids, encoding maps and the
//! correlation heatmap.

mod grid;
mod render;

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use grid::{export_som_grid, pca_rgb, som_grid_svg, GridCell, SomGrid, SAMPLES_PER_CELL};
pub use render::{
    block_svg, diverging_rgb, encoding_lightness, encoding_png, pearson_csv, pearson_svg, ENCODING_CELL_PX,
};

use crate::error::{Error, Result};
use crate::ingest::Corpus;
use crate::metrics::{FeatureMatrix, MetricRecord, MetricsFile, SetName};
use crate::retrieval::{rank, EncodedQuery, RankedResult};
use crate::som::{EncodingsFile, SomModel};
use render::escape;

/// A trained model together with the corpus encodings it produced.
#[derive(Debug, Clone)]
pub struct TrainedSet {
    pub model: SomModel,
    pub encodings: EncodingsFile,
}

impl TrainedSet {
    /// Scales the records with the model's stored ranges and encodes them all.
    pub fn encode_corpus(model: SomModel, records: &[MetricRecord]) -> Result<Self> {
        let features = scaled_features(&model, records)?;
        let encodings = EncodingsFile::new(&model, model.encode_all(&features)?);
        Ok(Self { model, encodings })
    }

    /// The metric-space features the encodings were built from.
    pub fn features(&self, records: &[MetricRecord]) -> Result<FeatureMatrix> {
        scaled_features(&self.model, records)
    }
}

fn scaled_features(model: &SomModel, records: &[MetricRecord]) -> Result<FeatureMatrix> {
    let set = model.metric_set();
    let rows = records
        .iter()
        .map(|r| set.scale(&set.raw_values(r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix {
        block_ids: records.iter().map(|r| r.block_id.clone()).collect(),
        set,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub block_id: String,
    pub metrics: MetricRecord,
    pub results: BTreeMap<SetName, Vec<RankedResult>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub k: usize,
    pub exclude_self: bool,
    pub sets: Vec<SetName>,
    pub targets: Vec<TargetReport>,
}

/// Retrieves the top `k` blocks for every target under every trained set.
pub fn compare_sets(
    targets: &[String],
    k: usize,
    exclude_self: bool,
    sets: &BTreeMap<SetName, TrainedSet>,
    metrics: &MetricsFile,
) -> Result<ComparisonReport> {
    for t in targets {
        if metrics.record(t).is_none() {
            return Err(Error::UnknownBlock(t.clone()));
        }
    }
    let reports: Vec<Result<TargetReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = targets
            .iter()
            .map(|t| scope.spawn(move || target_report(t, k, exclude_self, sets, metrics)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("report worker panicked")).collect()
    });
    Ok(ComparisonReport {
        k,
        exclude_self,
        sets: sets.keys().copied().collect(),
        targets: reports.into_iter().collect::<Result<_>>()?,
    })
}

fn target_report(
    id: &str,
    k: usize,
    exclude_self: bool,
    sets: &BTreeMap<SetName, TrainedSet>,
    metrics: &MetricsFile,
) -> Result<TargetReport> {
    let mut results = BTreeMap::new();
    for (&name, ts) in sets {
        let e = ts
            .encodings
            .get(id)
            .ok_or_else(|| Error::UnknownBlock(id.to_string()))?;
        let q = EncodedQuery {
            values: e.values.clone(),
            origin: Some(id.to_string()),
            warnings: Vec::new(),
        };
        results.insert(name, rank(&q, &ts.encodings.encodings, k, exclude_self)?);
    }
    Ok(TargetReport {
        block_id: id.to_string(),
        metrics: metrics.record(id).cloned().ok_or_else(|| Error::UnknownBlock(id.to_string()))?,
        results,
    })
}

const THUMB: f64 = 120.0;

/// A self-contained HTML summary: one table per target, one row per set.
pub fn report_html(report: &ComparisonReport, corpus: &Corpus) -> String {
    let thumb = |id: &str| corpus.block(id).map(|b| block_svg(b, THUMB)).unwrap_or_default();
    let mut s = String::from(concat!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Metric set comparison</title>\n",
        "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse;margin-bottom:2em}",
        "td,th{border:1px solid #ccc;padding:4px;text-align:center;vertical-align:top}",
        "figcaption{font-size:11px}.metrics{font-size:11px;text-align:left}</style></head><body>\n",
    ));
    let _ = writeln!(
        s,
        "<h1>Metric set comparison</h1>\n<p>k = {}, target {}.</p>",
        report.k,
        if report.exclude_self { "excluded" } else { "included" }
    );
    for t in &report.targets {
        let _ = writeln!(s, "<h2>{}</h2>\n<table>", escape(&t.block_id));
        let _ = write!(s, "<tr><th>target</th><td><figure>{}</figure></td><td class=\"metrics\">", thumb(&t.block_id));
        for (name, v) in crate::metrics::Indicator::ALL.iter().zip(t.metrics.values()) {
            let _ = write!(s, "{name} {v:.3}<br>");
        }
        s.push_str("</td></tr>\n");
        for (set, results) in &t.results {
            let _ = write!(s, "<tr><th>{set}</th>");
            for r in results {
                let _ = write!(
                    s,
                    "<td><figure>{}<figcaption>#{} {} ({:.6})</figcaption></figure></td>",
                    thumb(&r.block_id),
                    r.rank,
                    escape(&r.block_id),
                    r.distance
                );
            }
            s.push_str("</tr>\n");
        }
        s.push_str("</table>\n");
    }
    s.push_str("</body></html>\n");
    s
}

/// Writes the full artifact directory.
///
/// Layout: `report.json`, `report.html`, `som_grid_<set>.json` and `.svg`,
/// `encoding_<block>_<set>.png` for every target and set, and
/// `pearson.csv` / `pearson.svg` when the correlation matrix is available.
pub fn write_report_dir(
    dir: &Path,
    report: &ComparisonReport,
    sets: &BTreeMap<SetName, TrainedSet>,
    corpus: &Corpus,
    metrics: &MetricsFile,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let put = |name: &str, bytes: &[u8]| {
        let p = dir.join(name);
        std::fs::write(&p, bytes).map_err(|e| Error::io(p, e))
    };
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    put("report.json", json.as_bytes())?;
    put("report.html", report_html(report, corpus).as_bytes())?;

    for (name, ts) in sets {
        let features = ts.features(&metrics.records)?;
        let grid = export_som_grid(&ts.model, &ts.model.assign(&features)?);
        let mut json = serde_json::to_string_pretty(&grid)?;
        json.push('\n');
        put(&format!("som_grid_{name}.json"), json.as_bytes())?;
        put(&format!("som_grid_{name}.svg"), som_grid_svg(&grid, Some(corpus)).as_bytes())?;
        for t in &report.targets {
            let e = ts
                .encodings
                .get(&t.block_id)
                .ok_or_else(|| Error::UnknownBlock(t.block_id.clone()))?;
            let cfg = &ts.model.config;
            let png = encoding_png(&e.values, cfg.grid_rows, cfg.grid_cols)?;
            put(&format!("encoding_{}_{name}.png", file_safe(&t.block_id)), &png)?;
        }
    }
    match &metrics.pearson {
        Some(p) => {
            put("pearson.csv", pearson_csv(p).as_bytes())?;
            put("pearson.svg", pearson_svg(p).as_bytes())?;
        }
        None => log::warn!(target: "evaluation.pearson", "metrics file has no correlation matrix; heatmap skipped"),
    }
    Ok(())
}

/// Block id with path separators and other awkward characters replaced by `_`.
pub fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

/// Loads every `*.model.json` in `dir` and encodes the corpus records under it.
///
/// Files are read in name order; two models for the same set are an error.
pub fn load_trained_sets(dir: &Path, records: &[MetricRecord]) -> Result<BTreeMap<SetName, TrainedSet>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        if p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".model.json")) {
            paths.push(p);
        }
    }
    paths.sort();
    let mut sets = BTreeMap::new();
    for p in paths {
        let model = SomModel::read(&p)?;
        let name = model.set_name;
        if sets.contains_key(&name) {
            return Err(Error::InvalidConfig(format!("{}: second model for set {name}", p.display())));
        }
        log::info!(target: "evaluation.models", "loaded {} for {name}", p.display());
        sets.insert(name, TrainedSet::encode_corpus(model, records)?);
    }
    if sets.is_empty() {
        return Err(Error::InvalidConfig(format!("no *.model.json files in {}", dir.display())));
    }
    Ok(sets)
}
