//! The 15 block-scale morphology indicators, metric sets, normalization
//! and the Pearson correlation matrix.

mod indicators;
mod io;
mod pearson;
mod sets;

pub use indicators::{compute_corpus_metrics, compute_metrics, Indicator, MetricRecord};
pub use io::{write_csv, MetricsFile, SetComposition, CSV_HEADER};
pub use pearson::{pearson_matrix, PearsonMatrix};
pub use sets::{normalize, select_set, FeatureMatrix, MetricSet, NormParam, SetName};
