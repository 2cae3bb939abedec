//! The 15 indicators for a two-building block and correlations over a synthetic corpus.
//!
//!     cargo run --example metrics

use blockmorph::geometry::{Point2, PolygonM};
use blockmorph::ingest::{Block, Building};
use blockmorph::metrics::{compute_corpus_metrics, compute_metrics, normalize, pearson_matrix, Indicator, MetricSet, SetName};
use blockmorph::synth;

fn square(x: f64, y: f64, side: f64) -> blockmorph::Result<PolygonM> {
    PolygonM::simple(vec![Point2::new(x, y), Point2::new(x + side, y), Point2::new(x + side, y + side), Point2::new(x, y + side)])
}

fn main() -> blockmorph::Result<()> {
    let block = Block {
        id: "two-box".into(),
        boundary: square(0.0, 0.0, 10.0)?,
        buildings: vec![
            Building { id: "a".into(), footprint: square(2.0, 2.0, 1.0)?, height: 10.0, storeys: 3 },
            Building { id: "b".into(), footprint: square(7.0, 7.0, 1.0)?, height: 20.0, storeys: 7 },
        ],
    };
    let r = compute_metrics(&block)?;
    for ind in Indicator::ALL {
        println!("{ind:<5} {:>10.4}", r.value(ind));
    }

    let corpus = synth::corpus(300, 9)?;
    let (records, _) = compute_corpus_metrics(&corpus);
    let p = pearson_matrix(&records)?;
    println!("\nover {} synthetic blocks:", records.len());
    for (a, b) in [(Indicator::Bcr, Indicator::Far), (Indicator::AveH, Indicator::Wah), (Indicator::Bsf, Indicator::Bss)] {
        println!("  r({a}, {b}) = {:+.3}", p.get(a, b));
    }
    let f = normalize(&records, &MetricSet::new(SetName::Spacemate))?;
    println!("\nSpacemate ranges:");
    for np in &f.set.norm_params {
        println!("  {:<4} [{:.4}, {:.4}]", np.indicator, np.min, np.max);
    }
    Ok(())
}
