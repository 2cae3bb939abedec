//! End to end on a synthetic city: ingest, metrics, four SOMs, encodings.
//!
//!     cargo run --release --example pipeline -- [BLOCKS] [ITERATIONS]
//!
//! Defaults to 400 blocks and 1000 iterations. Prints the wall time of each
//! stage.

use std::collections::BTreeMap;
use std::time::Instant;

use blockmorph::ingest::{run_pipeline, IngestConfig, Provenance};
use blockmorph::metrics::{compute_corpus_metrics, normalize, pearson_matrix, Indicator, MetricSet, SetName};
use blockmorph::som::{SomConfig, SomModel};
use blockmorph::synth::{city, CityConfig};

fn main() -> blockmorph::Result<()> {
    let mut args = std::env::args().skip(1);
    let blocks: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(400);
    let iterations: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(1000);

    let t = Instant::now();
    let data = city(&CityConfig::with_blocks(blocks, 1));
    println!("generate   {:>8.2?}  {} buildings, {} roads", t.elapsed(), data.buildings.len(), data.roads.len());

    let t = Instant::now();
    let cfg = IngestConfig::default();
    let corpus = run_pipeline(&data, &cfg, Provenance::in_memory(cfg))?;
    println!("ingest     {:>8.2?}  {} blocks", t.elapsed(), corpus.blocks.len());

    let t = Instant::now();
    let (records, skipped) = compute_corpus_metrics(&corpus);
    let pearson = pearson_matrix(&records)?;
    println!("metrics    {:>8.2?}  {} records, {} skipped", t.elapsed(), records.len(), skipped.len());
    println!(
        "           r(BCR, FAR) = {:.3}, r(AveH, WAH) = {:.3}",
        pearson.get(Indicator::Bcr, Indicator::Far),
        pearson.get(Indicator::AveH, Indicator::Wah)
    );

    let t = Instant::now();
    let trained: BTreeMap<SetName, (SomModel, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = SetName::ALL
            .iter()
            .map(|&name| {
                let records = &records;
                s.spawn(move || -> blockmorph::Result<_> {
                    let features = normalize(records, &MetricSet::new(name))?;
                    let cfg = SomConfig { iterations, ..SomConfig::default() };
                    let model = SomModel::train(&features, &cfg)?;
                    let qe = model.quantization_error(&features)?;
                    model.encode_all(&features)?;
                    Ok((name, (model, qe)))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect::<blockmorph::Result<_>>()
    })?;
    println!("train+enc  {:>8.2?}", t.elapsed());
    for (name, (_, qe)) in &trained {
        println!("           {name:<15} quantization error {qe:.4}");
    }
    Ok(())
}
