//! The full training objective over a batch: cross-entropy plus either the
//! weighted contrastive term or the unlikelihood term, with gradients
//! propagated through pooling and the MLP by the chain rule.

use serde::{Deserialize, Serialize};

use crate::strategies::TrainingBatch;
use crate::{Error, Result};

use super::contrastive::{contrastive_loss_with, PairNormalization};
use super::pool::{pool_forward, MlpGrads, MlpParams, PoolingSpec};
use super::tokenloss::{cross_entropy_with_grad, unlikelihood_with_grad};

/// Loss weights. `lambda` scales the contrastive term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LossConfig {
    pub tau: f64,
    pub lambda: f64,
    pub pair_normalization: PairNormalization,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { tau: 1.0, lambda: 1.0, pair_normalization: PairNormalization::ChoosePairs }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau <= 0.0 {
            return Err(Error::Invalid(format!("tau must be positive, got {}", self.tau)));
        }
        if self.lambda < 0.0 {
            return Err(Error::Invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Which auxiliary term joins cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    Cliff,
    Unlikelihood,
}

/// Gradients of the total loss with respect to every input container.
/// Representation gradients are per sample, per token row, per dimension.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LossGrads {
    pub positive_reps: Vec<Vec<Vec<f64>>>,
    pub negative_reps: Vec<Vec<Vec<f64>>>,
    pub gold_probs: Vec<Vec<f64>>,
    pub negative_probs: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mlp: Option<MlpGrads>,
}

impl LossGrads {
    fn rep_norm(reps: &[Vec<Vec<f64>>]) -> f64 {
        reps.iter()
            .flat_map(|m| m.iter())
            .flat_map(|row| row.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// L2 norms by container, for reporting.
    pub fn norms(&self) -> GradNorms {
        GradNorms {
            positive_reps: Self::rep_norm(&self.positive_reps),
            negative_reps: Self::rep_norm(&self.negative_reps),
            gold_probs: Self::rep_norm(std::slice::from_ref(&self.gold_probs)),
            negative_probs: Self::rep_norm(std::slice::from_ref(&self.negative_probs)),
            mlp: self.mlp.as_ref().map(MlpGrads::l2_norm),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GradNorms {
    pub positive_reps: f64,
    pub negative_reps: f64,
    pub gold_probs: f64,
    pub negative_probs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mlp: Option<f64>,
}

/// Component losses, their weighted total, and gradients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub ce: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ul: Option<f64>,
    pub total: f64,
    /// Number of samples whose entity pooling fell back to all tokens.
    pub pooling_fallbacks: usize,
    #[serde(skip)]
    pub grads: LossGrads,
}

fn batch_cross_entropy(batch: &TrainingBatch) -> Result<(f64, Vec<Vec<f64>>)> {
    let gold = batch.gold_probs.as_ref().ok_or_else(|| {
        Error::Invalid(format!("batch '{}' carries no gold-token probabilities", batch.doc_id))
    })?;
    if gold.len() != batch.positives.len() {
        return Err(Error::Invalid(format!(
            "batch '{}': {} gold-prob rows for {} positives",
            batch.doc_id,
            gold.len(),
            batch.positives.len()
        )));
    }
    let flat: Vec<f64> = gold.iter().flatten().copied().collect();
    let (ce, flat_grad) = cross_entropy_with_grad(&flat)?;
    let mut per_sample = Vec::with_capacity(gold.len());
    let mut cursor = 0;
    for row in gold {
        per_sample.push(flat_grad[cursor..cursor + row.len()].to_vec());
        cursor += row.len();
    }
    Ok((ce, per_sample))
}

/// Evaluates the combined objective over one batch.
///
/// Cliff mode needs representation matrices and gold probabilities; the
/// total is ce + λ·cl. Unlikelihood mode sums the penalty over every
/// negative that carries generation probabilities; the total is ce + ul
/// with equal weights.
pub fn combined_loss(
    batch: &TrainingBatch,
    config: &LossConfig,
    spec: &PoolingSpec,
    mlp: Option<&MlpParams>,
    mode: LossMode,
) -> Result<LossBreakdown> {
    config.validate()?;
    let (ce, gold_grads) = batch_cross_entropy(batch)?;

    match mode {
        LossMode::Cliff => {
            let reps = batch.reps.as_ref().ok_or_else(|| {
                Error::Invalid(format!(
                    "batch '{}' carries no representations (required in cliff mode)",
                    batch.doc_id
                ))
            })?;
            if reps.positives.len() != batch.positives.len()
                || reps.negatives.len() != batch.negatives.len()
            {
                return Err(Error::Invalid(format!(
                    "batch '{}': representation counts do not match sample counts",
                    batch.doc_id
                )));
            }

            let mut fallbacks = 0;
            let mut forwards = Vec::new();
            let mut pos_vecs = Vec::new();
            let mut neg_vecs = Vec::new();
            for rep in reps.positives.iter().chain(reps.negatives.iter()) {
                let fwd = pool_forward(rep, spec, mlp)?;
                if fwd.used_fallback() {
                    fallbacks += 1;
                }
                if pos_vecs.len() < reps.positives.len() {
                    pos_vecs.push(fwd.output().to_vec());
                } else {
                    neg_vecs.push(fwd.output().to_vec());
                }
                forwards.push(fwd);
            }

            let cl = contrastive_loss_with(
                &pos_vecs,
                &neg_vecs,
                config.tau,
                config.pair_normalization,
            )?;

            // backprop λ·cl through each sample's pooling (and shared MLP)
            let mut positive_reps = Vec::with_capacity(reps.positives.len());
            let mut negative_reps = Vec::with_capacity(reps.negatives.len());
            let mut mlp_total = mlp.map(MlpGrads::zeros_like);
            let vector_grads = cl
                .grad_positives
                .iter()
                .chain(cl.grad_negatives.iter());
            for (fwd, grad) in forwards.iter().zip(vector_grads) {
                let scaled: Vec<f64> = grad.iter().map(|g| config.lambda * g).collect();
                let (rows, mlp_grads) = fwd.backward(&scaled, mlp);
                if let (Some(total), Some(part)) = (mlp_total.as_mut(), mlp_grads) {
                    total.add_scaled(&part, 1.0);
                }
                if positive_reps.len() < reps.positives.len() {
                    positive_reps.push(rows);
                } else {
                    negative_reps.push(rows);
                }
            }

            let total = ce + config.lambda * cl.value;
            Ok(LossBreakdown {
                ce,
                cl: Some(cl.value),
                ul: None,
                total,
                pooling_fallbacks: fallbacks,
                grads: LossGrads {
                    positive_reps,
                    negative_reps,
                    gold_probs: gold_grads,
                    negative_probs: vec![],
                    mlp: mlp_total,
                },
            })
        }
        LossMode::Unlikelihood => {
            let mut ul = 0.0;
            let mut negative_probs = Vec::with_capacity(batch.negatives.len());
            for negative in &batch.negatives {
                match &negative.gen_probs {
                    Some(probs) => {
                        let (part, grad) = unlikelihood_with_grad(probs)?;
                        ul += part;
                        negative_probs.push(grad);
                    }
                    None => negative_probs.push(vec![]),
                }
            }
            Ok(LossBreakdown {
                ce,
                cl: None,
                ul: Some(ul),
                total: ce + ul,
                pooling_fallbacks: 0,
                grads: LossGrads {
                    positive_reps: vec![],
                    negative_reps: vec![],
                    gold_probs: gold_grads,
                    negative_probs,
                    mlp: None,
                },
            })
        }
    }
}
