//! Token-probability losses: cross-entropy over gold tokens and the
//! unlikelihood penalty over negative-sample tokens.

use crate::{Error, Result};

/// Mean negative log probability of the gold tokens.
/// Probabilities must lie in (0, 1]; zero diverges and is rejected.
pub fn cross_entropy(gold_probs: &[f64]) -> Result<f64> {
    Ok(cross_entropy_with_grad(gold_probs)?.0)
}

/// Cross-entropy plus d(loss)/d(p_t) = −1 / (T · p_t).
pub fn cross_entropy_with_grad(gold_probs: &[f64]) -> Result<(f64, Vec<f64>)> {
    if gold_probs.is_empty() {
        return Err(Error::Invalid("cross-entropy over an empty token list".into()));
    }
    let t = gold_probs.len() as f64;
    let mut sum = 0.0;
    let mut grad = Vec::with_capacity(gold_probs.len());
    for (i, p) in gold_probs.iter().enumerate() {
        if *p <= 0.0 || *p > 1.0 {
            return Err(Error::Numeric(format!(
                "gold probability {p} at token {i} outside (0, 1]"
            )));
        }
        sum -= p.ln();
        grad.push(-1.0 / (t * p));
    }
    Ok((sum / t, grad))
}

/// Summed unlikelihood penalty −Σ log(1 − p_t) over a negative sample's
/// tokens. Probabilities must lie in [0, 1); one diverges and is rejected.
/// An empty list sums to zero.
pub fn unlikelihood_loss(neg_probs: &[f64]) -> Result<f64> {
    Ok(unlikelihood_with_grad(neg_probs)?.0)
}

/// Unlikelihood plus d(loss)/d(p_t) = 1 / (1 − p_t).
pub fn unlikelihood_with_grad(neg_probs: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut sum = 0.0;
    let mut grad = Vec::with_capacity(neg_probs.len());
    for (i, p) in neg_probs.iter().enumerate() {
        if !(0.0..1.0).contains(p) {
            return Err(Error::Numeric(format!(
                "negative-sample probability {p} at token {i} outside [0, 1)"
            )));
        }
        sum -= (1.0 - p).ln();
        grad.push(1.0 / (1.0 - p));
    }
    Ok((sum, grad))
}
