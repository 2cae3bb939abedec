//! Serves the JSON API over a synthetic corpus.
//!
//!     cargo run --release --example serve -- [PORT]
//!     curl localhost:8080/api/sets

use std::collections::BTreeMap;
use std::net::SocketAddr;

use blockmorph::evaluation::TrainedSet;
use blockmorph::metrics::{compute_corpus_metrics, normalize, pearson_matrix, MetricSet, MetricsFile, SetName};
use blockmorph::service::{serve, AppState};
use blockmorph::som::{SomConfig, SomModel};
use blockmorph::synth;

#[tokio::main]
async fn main() -> blockmorph::Result<()> {
    let port: u16 = std::env::args().nth(1).and_then(|p| p.parse().ok()).unwrap_or(8080);
    let corpus = synth::corpus(300, 1)?;
    let (records, _) = compute_corpus_metrics(&corpus);
    let pearson = pearson_matrix(&records).ok();
    let metrics = MetricsFile::new(records, pearson);
    let mut sets = BTreeMap::new();
    for name in SetName::ALL {
        let f = normalize(&metrics.records, &MetricSet::new(name))?;
        sets.insert(name, TrainedSet::encode_corpus(SomModel::train(&f, &SomConfig::default())?, &metrics.records)?);
    }
    let state = AppState::new(corpus, metrics, sets)?;
    println!("http://127.0.0.1:{port}/api/sets");
    serve(state, SocketAddr::from(([127, 0, 0, 1], port)), None).await
}
