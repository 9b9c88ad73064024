//! Training-batch assembly, deterministic representation synthesis, and
//! model-probability attachment.

use crate::corpus::{CandidateSample, Document, SampleLabel};
use crate::genkit::{NGramModel, RngState};
use crate::linguo::{match_entities, Gazetteer};
use crate::objectives::RepMatrix;
use crate::{Error, Result};

use super::{BatchReps, StrategyConfig, TrainingBatch};

/// Draws up to `negatives_per_batch` negatives uniformly without
/// replacement and pairs them with the positives. A lone positive is
/// duplicated so the pair-based loss stays well defined; zero available
/// negatives yield an empty N plus a warning flag.
pub fn assemble_batch(
    doc: &Document,
    positives: &[CandidateSample],
    negatives: &[CandidateSample],
    config: &StrategyConfig,
    rng: &mut RngState,
) -> Result<TrainingBatch> {
    if positives.is_empty() {
        return Err(Error::Invalid(format!(
            "document '{}' has no positive samples",
            doc.id
        )));
    }
    if let Some(bad) = positives
        .iter()
        .chain(negatives.iter())
        .find(|s| s.doc_id != doc.id)
    {
        return Err(Error::Invalid(format!(
            "sample for '{}' offered to batch of '{}'",
            bad.doc_id, doc.id
        )));
    }
    if positives.iter().any(|s| s.label != SampleLabel::Positive)
        || negatives.iter().any(|s| s.label != SampleLabel::Negative)
    {
        return Err(Error::Invalid("sample label does not match its batch side".into()));
    }

    let mut chosen_positives = positives.to_vec();
    if chosen_positives.len() == 1 {
        chosen_positives.push(chosen_positives[0].clone());
    }

    let want = config.negatives_per_batch.min(negatives.len());
    let picked = rng.sample_indices(negatives.len(), want);
    let chosen_negatives: Vec<CandidateSample> =
        picked.into_iter().map(|i| negatives[i].clone()).collect();

    let warning = if chosen_negatives.is_empty() {
        Some("no negative samples available for this document".to_string())
    } else {
        None
    };

    Ok(TrainingBatch {
        doc_id: doc.id.clone(),
        positives: chosen_positives,
        negatives: chosen_negatives,
        reps: None,
        gold_probs: None,
        warning,
    })
}

fn synth_rep(sample: &CandidateSample, dim: usize, gaz: &Gazetteer, rng: &mut RngState) -> RepMatrix {
    let rows = (0..sample.tokens.len())
        .map(|_| (0..dim).map(|_| rng.next_range_f64(-1.0, 1.0)).collect())
        .collect();
    let mut mask = vec![false; sample.tokens.len()];
    for mention in match_entities(&sample.tokens, gaz) {
        for i in mention.span.start..mention.span.end {
            mask[i] = true;
        }
    }
    RepMatrix::new(rows, mask)
}

/// Attaches deterministic per-token representation rows to every sample in
/// the batch (stand-ins for decoder states), with entity masks from the
/// gazetteer.
pub fn synthesize_reps(
    batch: &mut TrainingBatch,
    dim: usize,
    gazetteer: &Gazetteer,
    rng: &mut RngState,
) -> Result<()> {
    if dim == 0 {
        return Err(Error::Invalid("representation dimension must be >= 1".into()));
    }
    let positives = batch
        .positives
        .iter()
        .map(|s| synth_rep(s, dim, gazetteer, rng))
        .collect();
    let negatives = batch
        .negatives
        .iter()
        .map(|s| synth_rep(s, dim, gazetteer, rng))
        .collect();
    batch.reps = Some(BatchReps { positives, negatives });
    Ok(())
}

/// Scores batch samples under the n-gram model: gold-token probabilities
/// for every positive, and generation probabilities for negatives that do
/// not already carry them (system-generated beams keep their decoder
/// probabilities).
pub fn attach_model_probs(batch: &mut TrainingBatch, model: &NGramModel) {
    let gold = batch
        .positives
        .iter()
        .map(|s| model.score_sequence(&s.surfaces()))
        .collect();
    batch.gold_probs = Some(gold);
    for negative in &mut batch.negatives {
        if negative.gen_probs.is_none() {
            negative.gen_probs = Some(model.score_sequence(&negative.surfaces()));
        }
    }
}
