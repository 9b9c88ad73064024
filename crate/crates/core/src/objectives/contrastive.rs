//! Temperature-scaled cosine contrastive loss over positive and negative
//! summary vectors, with analytic gradients for every input vector.
//!
//! For positives P and negatives N, each ordered positive pair (i, j)
//! contributes −log of exp(sim(i,j)/τ) over the sum of exp(sim(i,k)/τ) for
//! all k ≠ i in P ∪ N, where sim is cosine similarity. The pair sum is
//! scaled by 1/C(|P|, 2).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How the ordered-pair sum is normalized.
///
/// `ChoosePairs` divides by C(|P|, 2) — the stated form of the objective.
/// `OrderedPairs` divides by |P|·(|P|−1), the mean over ordered pairs used
/// by some ancestor formulations; it scales the loss by exactly 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairNormalization {
    #[default]
    ChoosePairs,
    OrderedPairs,
}

/// Loss value plus gradients aligned with the input vector lists.
#[derive(Debug, Clone)]
pub struct ContrastiveResult {
    pub value: f64,
    pub grad_positives: Vec<Vec<f64>>,
    pub grad_negatives: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Contrastive loss with the default pair normalization.
pub fn contrastive_loss(
    positives: &[Vec<f64>],
    negatives: &[Vec<f64>],
    tau: f64,
) -> Result<ContrastiveResult> {
    contrastive_loss_with(positives, negatives, tau, PairNormalization::ChoosePairs)
}

pub fn contrastive_loss_with(
    positives: &[Vec<f64>],
    negatives: &[Vec<f64>],
    tau: f64,
    normalization: PairNormalization,
) -> Result<ContrastiveResult> {
    let m = positives.len();
    if m < 2 {
        return Err(Error::Invalid(format!(
            "contrastive loss needs at least 2 positives, got {m}"
        )));
    }
    if tau <= 0.0 {
        return Err(Error::Invalid(format!("temperature must be positive, got {tau}")));
    }

    let all: Vec<&[f64]> = positives
        .iter()
        .chain(negatives.iter())
        .map(Vec::as_slice)
        .collect();
    let n = all.len();
    let d = all[0].len();
    if all.iter().any(|v| v.len() != d) {
        return Err(Error::Invalid("summary vectors have inconsistent dimensions".into()));
    }

    let norms: Vec<f64> = all.iter().map(|v| norm(v)).collect();
    if let Some(idx) = norms.iter().position(|n| *n == 0.0) {
        return Err(Error::Numeric(format!(
            "vector {idx} has zero norm; cosine similarity is undefined"
        )));
    }

    // full cosine matrix (symmetric, unit diagonal)
    let mut cos = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        cos[i][i] = 1.0;
        for j in i + 1..n {
            let c = dot(all[i], all[j]) / (norms[i] * norms[j]);
            cos[i][j] = c;
            cos[j][i] = c;
        }
    }

    let pair_count = match normalization {
        PairNormalization::ChoosePairs => (m * (m - 1) / 2) as f64,
        PairNormalization::OrderedPairs => (m * (m - 1)) as f64,
    };
    let coeff = 1.0 / pair_count;

    // Per-anchor softmax over k ≠ i, computed with a shifted exponent for
    // stability. A singleton denominator cancels exactly, which keeps the
    // two-positive, no-negative case at literal zero loss.
    let mut value = 0.0;
    let mut dcos = vec![vec![0.0f64; n]; n];
    for anchor in 0..m {
        let shift = (0..n)
            .filter(|k| *k != anchor)
            .map(|k| cos[anchor][k] / tau)
            .fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = (0..n)
            .map(|k| {
                if k == anchor {
                    0.0
                } else {
                    ((cos[anchor][k] / tau) - shift).exp()
                }
            })
            .collect();
        let z: f64 = exps.iter().sum();

        for j in 0..m {
            if j == anchor {
                continue;
            }
            value -= coeff * (exps[j] / z).ln();
        }

        // d(loss)/d cos(anchor, k), accumulated over the (m−1) pair terms
        // sharing this anchor: softmax weight minus the positive indicator.
        for k in 0..n {
            if k == anchor {
                continue;
            }
            let weight = exps[k] / z;
            let indicator = if k < m { 1.0 } else { 0.0 };
            dcos[anchor][k] += coeff / tau * ((m as f64 - 1.0) * weight - indicator);
        }
    }

    // chain rule through cosine for every unordered vector pair
    let mut grads = vec![vec![0.0f64; d]; n];
    for a in 0..n {
        for b in a + 1..n {
            let g = dcos[a][b] + dcos[b][a];
            if g == 0.0 {
                continue;
            }
            let inv = 1.0 / (norms[a] * norms[b]);
            let ca = cos[a][b] / (norms[a] * norms[a]);
            let cb = cos[a][b] / (norms[b] * norms[b]);
            for t in 0..d {
                grads[a][t] += g * (all[b][t] * inv - ca * all[a][t]);
                grads[b][t] += g * (all[a][t] * inv - cb * all[b][t]);
            }
        }
    }

    let grad_negatives = grads.split_off(m);
    Ok(ContrastiveResult { value, grad_positives: grads, grad_negatives })
}
