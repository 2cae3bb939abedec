//! Writes a synthetic street grid as GeoJSON and ingests it into a block corpus.
//!
//!     cargo run --example ingest -- [OUT_DIR]

use std::path::PathBuf;

use blockmorph::ingest::{ingest_files, IngestConfig};
use blockmorph::synth::{city, write_geojson, CityConfig};

fn main() -> blockmorph::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&dir).map_err(|e| blockmorph::Error::io(&dir, e))?;
    let (b, r) = (dir.join("buildings.geojson"), dir.join("roads.geojson"));
    write_geojson(&city(&CityConfig::with_blocks(60, 3)), &b, &r)?;

    let corpus = ingest_files(&b, &r, &IngestConfig::default())?;
    let out = dir.join("corpus.json");
    corpus.write(&out)?;
    println!("{} ({})", out.display(), corpus.crs_note);
    println!("buildings sha256 {}", corpus.provenance.buildings_sha256);
    for block in corpus.blocks.iter().take(5) {
        let tallest = block.buildings.iter().map(|x| x.height).fold(0.0, f64::max);
        println!("{}  {:>9.1} m2  {:>3} buildings  tallest {tallest:.1} m", block.id, block.boundary.area(), block.buildings.len());
    }
    println!("... {} blocks in total", corpus.blocks.len());
    Ok(())
}
