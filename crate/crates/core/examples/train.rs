//! Trains a SOM on two well-separated clusters and prints the map occupancy.
//!
//!     cargo run --release --example train

use blockmorph::som::{SomConfig, SomModel};
use blockmorph::synth::two_clusters;

fn main() -> blockmorph::Result<()> {
    let features = two_clusters(1);
    let cfg = SomConfig::default();
    let initial = SomModel::initialize(&features, &cfg)?.quantization_error(&features)?;
    let model = SomModel::train(&features, &cfg)?;
    println!("quantization error {initial:.4} -> {:.4}", model.quantization_error(&features)?);

    let assign = model.assign(&features)?;
    println!("BMU map (A / B / mixed / empty):");
    for r in 0..cfg.grid_rows {
        let row: String = (0..cfg.grid_cols)
            .map(|c| {
                let ids = &assign[&(r * cfg.grid_cols + c)];
                let a = ids.iter().any(|id| id.starts_with('A'));
                let b = ids.iter().any(|id| id.starts_with('B'));
                match (a, b) {
                    (true, false) => 'A',
                    (false, true) => 'B',
                    (true, true) => '*',
                    _ => '.',
                }
            })
            .collect();
        println!("  {row}");
    }
    Ok(())
}
