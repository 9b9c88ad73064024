//! Construction of positive and negative training samples for
//! contrastive summarization training, with the loss kernels, confidence
//! calibration, and metric machinery needed to exercise them end to end
//! at desk scale.
//!
//! Modules:
//! - [`corpus`] — data model, validation, CoNLL-U ingestion, JSONL I/O
//! - [`linguo`] — relation triples, gazetteers, lexicons, span detection
//! - [`genkit`] — deterministic n-gram generation behind pluggable traits
//! - [`strategies`] — sample construction and batch assembly
//! - [`objectives`] — contrastive / cross-entropy / unlikelihood losses
//!   with analytic gradients
//! - [`confcal`] — threshold tuning, confidence histograms, metrics
//! - [`synth`] — the bundled deterministic demo corpus

pub mod confcal;
pub mod corpus;
pub mod error;
pub mod genkit;
pub mod linguo;
pub mod objectives;
pub mod strategies;
pub mod synth;

pub use error::{Error, Result};
