//! Negative-sample construction strategies, positive-sample filtering, and
//! training-batch assembly.

pub mod batch;
pub mod negatives;
pub mod positives;

use serde::{Deserialize, Serialize};

use crate::corpus::CandidateSample;
use crate::genkit::{hash64, RngState};
use crate::objectives::RepMatrix;
use crate::{Error, Result};

pub use batch::{assemble_batch, attach_model_probs, synthesize_reps};
pub use negatives::{
    construct_negatives, dedup_samples, mask_ent, mask_rel, regen_ent, regen_rel, swap_ent,
    sys_lowcon,
};
pub use positives::{build_positive, paraphrase_is_acceptable};

/// Knobs shared by the construction strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrategyConfig {
    /// Cumulative-probability cutoff for nucleus sampling.
    pub nucleus_p: f64,
    /// Generated candidates per anchor (entity or relation).
    pub samples_per_anchor: usize,
    /// Upper bound on mask-fill length.
    pub fill_len_max: usize,
    /// Optional cap on kept negatives per document.
    pub max_negatives_per_doc: Option<usize>,
    /// Negatives drawn into each training batch.
    pub negatives_per_batch: usize,
    /// Low-confidence cutoff for system-generation selection.
    pub threshold: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            nucleus_p: 0.7,
            samples_per_anchor: 3,
            fill_len_max: 3,
            max_negatives_per_doc: None,
            negatives_per_batch: 5,
            threshold: 0.21,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.nucleus_p && self.nucleus_p <= 1.0) {
            return Err(Error::Invalid(format!(
                "nucleus_p must be in (0, 1], got {}",
                self.nucleus_p
            )));
        }
        if !(0.0 < self.threshold && self.threshold <= 1.0) {
            return Err(Error::Invalid(format!(
                "threshold must be in (0, 1], got {}",
                self.threshold
            )));
        }
        for (name, value) in [
            ("samples_per_anchor", self.samples_per_anchor),
            ("fill_len_max", self.fill_len_max),
            ("negatives_per_batch", self.negatives_per_batch),
        ] {
            if value < 1 {
                return Err(Error::Invalid(format!("{name} must be >= 1, got {value}")));
            }
        }
        if let Some(cap) = self.max_negatives_per_doc {
            if cap < 1 {
                return Err(Error::Invalid("max_negatives_per_doc must be >= 1 when set".into()));
            }
        }
        Ok(())
    }
}

/// Immutable resources shared by the strategies.
#[derive(Clone, Copy)]
pub struct StrategyContext<'a> {
    pub config: &'a StrategyConfig,
    pub gazetteer: &'a crate::linguo::Gazetteer,
    pub synonyms: &'a crate::linguo::SynonymLexicon,
    pub pos_lexicon: &'a crate::linguo::PosLexicon,
}

/// Named random streams, one per pipeline stage. Each document derives its
/// own seed, and each stage draws from its own stream of that seed, so the
/// samples one stage produces never depend on which other stages ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngStream {
    SwapEnt = 0,
    MaskEnt = 1,
    MaskRel = 2,
    RegenEnt = 3,
    RegenRel = 4,
    BatchAssembly = 5,
    RepSynthesis = 6,
}

/// Random state for one (document, stage) pair under a global seed.
pub fn doc_rng(global_seed: u64, doc_id: &str, stream: RngStream) -> RngState {
    RngState::with_stream(hash64(global_seed, doc_id), stream as u64)
}

/// Per-sample representation matrices, parallel to a batch's sample lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReps {
    pub positives: Vec<RepMatrix>,
    pub negatives: Vec<RepMatrix>,
}

/// Positives and negatives for one article, with optional representation
/// matrices and gold-token probabilities for loss computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingBatch {
    pub doc_id: String,
    pub positives: Vec<CandidateSample>,
    pub negatives: Vec<CandidateSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<BatchReps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_probs: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}
