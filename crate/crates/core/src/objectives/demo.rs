//! Gradient-descent separation demo: optimizes raw summary vectors under
//! the contrastive loss and tracks how positives compact while negatives
//! drift away.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::contrastive::contrastive_loss;

/// One optimization step's loss and cosine statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationStep {
    pub loss: f64,
    pub mean_pos_pos_cos: f64,
    pub mean_pos_neg_cos: f64,
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn cos_stats(positives: &[Vec<f64>], negatives: &[Vec<f64>]) -> (f64, f64) {
    let m = positives.len();
    let mut pos_pos = 0.0;
    let mut pairs = 0usize;
    for i in 0..m {
        for j in i + 1..m {
            pos_pos += cosine(&positives[i], &positives[j]);
            pairs += 1;
        }
    }
    let mean_pp = if pairs > 0 { pos_pos / pairs as f64 } else { 0.0 };

    let mut pos_neg = 0.0;
    let mut cross = 0usize;
    for p in positives {
        for n in negatives {
            pos_neg += cosine(p, n);
            cross += 1;
        }
    }
    let mean_pn = if cross > 0 { pos_neg / cross as f64 } else { 0.0 };
    (mean_pp, mean_pn)
}

/// Runs plain gradient descent on the contrastive loss directly over the
/// vectors, halving the learning rate whenever a step would increase the
/// loss. The recorded loss sequence is non-increasing. Returns one record
/// per step.
pub fn demo_separate(
    positives: &[Vec<f64>],
    negatives: &[Vec<f64>],
    steps: usize,
    learning_rate: f64,
    tau: f64,
) -> Result<Vec<SeparationStep>> {
    if steps < 1 {
        return Err(Error::Invalid("separation demo needs at least one step".into()));
    }
    if learning_rate <= 0.0 {
        return Err(Error::Invalid(format!(
            "learning rate must be positive, got {learning_rate}"
        )));
    }

    let mut pos = positives.to_vec();
    let mut neg = negatives.to_vec();
    let mut lr = learning_rate;
    let mut current = contrastive_loss(&pos, &neg, tau)?;
    let mut trajectory = Vec::with_capacity(steps);

    for _ in 0..steps {
        // backtracking line search on the full gradient step
        let mut moved = false;
        while lr > 1e-18 {
            let try_pos: Vec<Vec<f64>> = pos
                .iter()
                .zip(&current.grad_positives)
                .map(|(v, g)| v.iter().zip(g).map(|(x, gx)| x - lr * gx).collect())
                .collect();
            let try_neg: Vec<Vec<f64>> = neg
                .iter()
                .zip(&current.grad_negatives)
                .map(|(v, g)| v.iter().zip(g).map(|(x, gx)| x - lr * gx).collect())
                .collect();
            match contrastive_loss(&try_pos, &try_neg, tau) {
                Ok(next) if next.value <= current.value => {
                    pos = try_pos;
                    neg = try_neg;
                    current = next;
                    moved = true;
                    break;
                }
                _ => lr *= 0.5,
            }
        }
        let _ = moved;
        let (mean_pp, mean_pn) = cos_stats(&pos, &neg);
        trajectory.push(SeparationStep {
            loss: current.value,
            mean_pos_pos_cos: mean_pp,
            mean_pos_neg_cos: mean_pn,
        });
    }
    Ok(trajectory)
}
