use std::collections::BTreeMap;
use std::fmt::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::render::{block_paths, escape};
use crate::ingest::Corpus;
use crate::metrics::SetName;
use crate::som::{SeededRng, SomModel};

/// Samples shown per neuron.
pub const SAMPLES_PER_CELL: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub index: usize,
    pub row: usize,
    pub col: usize,
    pub weights: Vec<f64>,
    pub rgb: [u8; 3],
    /// Blocks whose BMU this neuron is.
    pub sample_count: usize,
    pub samples: Vec<String>,
    /// No block has this neuron as its BMU.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomGrid {
    pub set_name: SetName,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<GridCell>,
}

/// Colours each neuron by the first three principal components of the
/// codebook, each min–max scaled to 0..=255.
///
/// Components are ordered by decreasing variance and signed so that their
/// largest-magnitude loading is positive. A component with no spread maps to
/// 0, so identical weights give identical colours. Sets with fewer than three
/// indicators leave the missing channels at 0.
pub fn pca_rgb(model: &SomModel) -> Vec<[u8; 3]> {
    let (k, m) = (model.neurons(), model.dim);
    let mut x = DMatrix::from_iterator(m, k, model.weights().flatten().copied()).transpose();
    for c in 0..m {
        let mean = x.column(c).sum() / k as f64;
        x.column_mut(c).add_scalar_mut(-mean);
    }
    let cov = (x.transpose() * &x) / k as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut rgb = vec![[0u8; 3]; k];
    for (channel, &c) in order.iter().take(3).enumerate() {
        let mut v = eig.eigenvectors.column(c).into_owned();
        let lead = (0..m)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
            .unwrap();
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        let proj = &x * v;
        let (lo, hi) = proj.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        // a zero-variance direction leaves only rounding noise
        if hi - lo <= 1e-12 {
            continue;
        }
        for (j, p) in proj.iter().enumerate() {
            rgb[j][channel] = ((p - lo) / (hi - lo) * 255.0).round() as u8;
        }
    }
    rgb
}

/// The grid payload: weights, colours and up to four sample blocks per neuron.
///
/// Samples are all assigned blocks when there are at most four, otherwise
/// four drawn without replacement by a generator seeded with the model seed.
pub fn export_som_grid(model: &SomModel, assignments: &BTreeMap<usize, Vec<String>>) -> SomGrid {
    let colours = pca_rgb(model);
    let mut rng = SeededRng::new(model.config.seed);
    let cols = model.config.grid_cols;
    let cells = (0..model.neurons())
        .map(|j| {
            let assigned = assignments.get(&j).map(Vec::as_slice).unwrap_or(&[]);
            let mut pool: Vec<&String> = assigned.iter().collect();
            pool.sort();
            let samples = if pool.len() <= SAMPLES_PER_CELL {
                pool.into_iter().cloned().collect()
            } else {
                for i in 0..SAMPLES_PER_CELL {
                    let pick = i + rng.below(pool.len() - i);
                    pool.swap(i, pick);
                }
                pool[..SAMPLES_PER_CELL].iter().map(|s| (*s).clone()).collect()
            };
            GridCell {
                index: j,
                row: j / cols,
                col: j % cols,
                weights: model.weight(j).to_vec(),
                rgb: colours[j],
                sample_count: assigned.len(),
                samples,
                empty: assigned.is_empty(),
            }
        })
        .collect();
    SomGrid {
        set_name: model.set_name,
        rows: model.config.grid_rows,
        cols,
        cells,
    }
}

const CELL: f64 = 80.0;

/// Grid as SVG: cell background is the neuron colour, empty cells are
/// hatched, and sample footprints are drawn in the cell's four quadrants.
pub fn som_grid_svg(grid: &SomGrid, corpus: Option<&Corpus>) -> String {
    let (w, h) = (grid.cols as f64 * CELL, grid.rows as f64 * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    s.push_str(concat!(
        r#"<defs><pattern id="hatch" width="8" height="8" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"#,
        r##"<rect width="8" height="8" fill="#f4f4f4"/><line x1="0" y1="0" x2="0" y2="8" stroke="#999" stroke-width="2"/></pattern></defs>"##,
        "\n"
    ));
    for c in &grid.cells {
        let (x, y) = (c.col as f64 * CELL, c.row as f64 * CELL);
        let fill = if c.empty {
            "url(#hatch)".to_string()
        } else {
            format!("rgb({},{},{})", c.rgb[0], c.rgb[1], c.rgb[2])
        };
        let _ = writeln!(
            s,
            r##"<g id="neuron-{}"><title>neuron {} ({} blocks)</title><rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#333" stroke-width="0.5"/>"##,
            c.index, c.index, c.sample_count
        );
        if let Some(corpus) = corpus {
            let half = CELL / 2.0;
            for (q, id) in c.samples.iter().enumerate() {
                let Some(block) = corpus.block(id) else { continue };
                let (qx, qy) = (x + (q % 2) as f64 * half, y + (q / 2) as f64 * half);
                let _ = writeln!(
                    s,
                    r#"<g transform="translate({qx},{qy})"><title>{}</title>{}</g>"#,
                    escape(id),
                    block_paths(block, half, 3.0)
                );
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
