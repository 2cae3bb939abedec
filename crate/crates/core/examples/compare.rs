//! Compares the four metric sets on a few targets and writes the report directory.
//!
//!     cargo run --release --example compare -- [OUT_DIR]

use std::collections::BTreeMap;
use std::path::PathBuf;

use blockmorph::evaluation::{compare_sets, write_report_dir, TrainedSet};
use blockmorph::metrics::{compute_corpus_metrics, normalize, pearson_matrix, MetricSet, MetricsFile, SetName};
use blockmorph::som::{SomConfig, SomModel};
use blockmorph::synth;

fn main() -> blockmorph::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("blockmorph-report"));
    let corpus = synth::corpus(250, 6)?;
    let (records, _) = compute_corpus_metrics(&corpus);
    let pearson = pearson_matrix(&records).ok();
    let metrics = MetricsFile::new(records, pearson);

    let mut sets = BTreeMap::new();
    for name in SetName::ALL {
        let f = normalize(&metrics.records, &MetricSet::new(name))?;
        let model = SomModel::train(&f, &SomConfig::default())?;
        sets.insert(name, TrainedSet::encode_corpus(model, &metrics.records)?);
    }

    let targets: Vec<String> = metrics.records.iter().step_by(28).take(9).map(|r| r.block_id.clone()).collect();
    let report = compare_sets(&targets, 5, true, &sets, &metrics)?;
    for t in &report.targets {
        let line: Vec<String> = t.results.iter().map(|(set, r)| format!("{set}: {}", r[0].block_id)).collect();
        println!("{}  ->  {}", t.block_id, line.join("  "));
    }
    write_report_dir(&out, &report, &sets, &corpus, &metrics)?;
    println!("report written to {}", out.join("report.html").display());
    Ok(())
}
