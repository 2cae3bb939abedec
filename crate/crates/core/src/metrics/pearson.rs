use serde::{Deserialize, Serialize};

use super::{Indicator, MetricRecord};
use crate::error::{Error, Result};

/// Pairwise Pearson correlations of the 15 indicators, in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PearsonMatrix {
    pub indicators: Vec<Indicator>,
    pub values: Vec<Vec<f64>>,
}

impl PearsonMatrix {
    pub fn get(&self, a: Indicator, b: Indicator) -> f64 {
        self.values[a.index()][b.index()]
    }
}

/// Two-pass (centered) Pearson correlation over the corpus.
pub fn pearson_matrix(records: &[MetricRecord]) -> Result<PearsonMatrix> {
    let n = records.len();
    if n < 3 {
        return Err(Error::TooFewBlocks { needed: 3, found: n });
    }
    let cols: Vec<Vec<f64>> = Indicator::ALL
        .iter()
        .map(|&i| records.iter().map(|r| r.value(i)).collect())
        .collect();
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / n as f64;
            c.iter().map(|v| v - mean).collect()
        })
        .collect();
    let ss: Vec<f64> = centered.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();

    let flat: Vec<String> = Indicator::ALL
        .iter()
        .zip(&ss)
        .filter(|(_, &s)| !(s > 0.0))
        .map(|(i, _)| i.to_string())
        .collect();
    if !flat.is_empty() {
        return Err(Error::ZeroVariance(flat));
    }

    let k = Indicator::ALL.len();
    let mut values = vec![vec![0.0; k]; k];
    for a in 0..k {
        values[a][a] = 1.0;
        for b in a + 1..k {
            let cov: f64 = centered[a].iter().zip(&centered[b]).map(|(x, y)| x * y).sum();
            let r = (cov / (ss[a].sqrt() * ss[b].sqrt())).clamp(-1.0, 1.0);
            values[a][b] = r;
            values[b][a] = r;
        }
    }
    Ok(PearsonMatrix {
        indicators: Indicator::ALL.to_vec(),
        values,
    })
}
