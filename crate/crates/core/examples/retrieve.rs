//! Retrieves the nearest blocks for a stored block and for a hand-written value query.
//!
//!     cargo run --release --example retrieve

use std::collections::BTreeMap;

use blockmorph::metrics::{compute_corpus_metrics, normalize, MetricSet, SetName};
use blockmorph::retrieval::{results_json, retrieve, Query, QuerySource};
use blockmorph::som::{EncodingsFile, SomConfig, SomModel};
use blockmorph::synth;

fn main() -> blockmorph::Result<()> {
    let corpus = synth::corpus(200, 2)?;
    let (records, _) = compute_corpus_metrics(&corpus);
    let features = normalize(&records, &MetricSet::new(SetName::OneBmc))?;
    let model = SomModel::train(&features, &SomConfig::default())?;
    let encodings = EncodingsFile::new(&model, model.encode_all(&features)?);

    let target = &records[17].block_id;
    let q = Query { set: SetName::OneBmc, source: QuerySource::block(target.clone()), k: 5, exclude_self: true };
    let (_, results) = retrieve(&q, &model, &encodings, false)?;
    println!("nearest to {target}:\n{}", results_json(&results));

    let values = BTreeMap::from([("WAH".to_string(), 30.0), ("BCR".to_string(), 0.35), ("NOB".to_string(), 6.0), ("BA".to_string(), 9000.0)]);
    let q = Query { set: SetName::OneBmc, source: QuerySource::Values { values }, k: 3, exclude_self: false };
    let (encoded, results) = retrieve(&q, &model, &encodings, false)?;
    for w in &encoded.warnings {
        println!("warning: {w}");
    }
    println!("nearest to WAH 30, BCR 0.35, NOB 6, BA 9000:\n{}", results_json(&results));
    Ok(())
}
