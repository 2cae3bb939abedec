//! Block-scale urban morphology: indicators, self-organising map encoding
//! and metric-to-form retrieval.

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod ingest;
pub mod metrics;
pub mod retrieval;
pub mod service;
pub mod som;
pub mod synth;

mod json;

pub use error::{Error, ErrorClass, Result};
