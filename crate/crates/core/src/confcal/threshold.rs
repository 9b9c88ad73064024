//! F1-maximizing confidence-threshold tuning over annotated outputs.
//!
//! An output's score is the minimum first-token probability over its
//! proper-noun and number spans; outputs scoring below the threshold are
//! predicted to contain an error. The tuner scans every candidate
//! threshold and keeps the F1 maximizer, breaking ties toward the smallest
//! threshold.

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedOutput, ErrorKind};
use crate::linguo::detect_confidence_spans;
use crate::{Error, Result};

/// Fallback cutoff shipped for pipelines without annotated outputs.
pub const DEFAULT_THRESHOLD: f64 = 0.21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub candidate_count: usize,
}

/// Gold-label policy: whether world-knowledge spans count as errors.
/// They behave unlike true errors, so the default excludes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ThresholdOptions {
    pub include_world_knowledge: bool,
}

/// Minimum qualifying first-token probability, or +∞ when the output has
/// no proper-noun or number span (such outputs can never be predicted
/// positive).
pub fn output_score(output: &AnnotatedOutput) -> f64 {
    detect_confidence_spans(&output.tokens)
        .iter()
        .map(|(span, _)| output.probs[span.start])
        .fold(f64::INFINITY, f64::min)
}

fn is_gold_positive(output: &AnnotatedOutput, options: ThresholdOptions) -> bool {
    output.errors.iter().any(|e| match e.kind {
        ErrorKind::Intrinsic | ErrorKind::Extrinsic => true,
        ErrorKind::WorldKnowledge => options.include_world_knowledge,
    })
}

fn f_score(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f1)
}

pub fn tune_threshold(outputs: &[AnnotatedOutput]) -> Result<ThresholdReport> {
    tune_threshold_with(outputs, ThresholdOptions::default())
}

pub fn tune_threshold_with(
    outputs: &[AnnotatedOutput],
    options: ThresholdOptions,
) -> Result<ThresholdReport> {
    if outputs.is_empty() {
        return Err(Error::Invalid("threshold tuning needs at least one output".into()));
    }

    let scored: Vec<(f64, bool)> = outputs
        .iter()
        .map(|o| (output_score(o), is_gold_positive(o, options)))
        .collect();

    // distinct finite scores, plus one candidate above the largest score
    let mut candidates: Vec<f64> = scored
        .iter()
        .map(|(s, _)| *s)
        .filter(|s| s.is_finite())
        .collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();
    if let Some(max) = candidates.last().copied() {
        candidates.push(max + 1e-9);
    }
    if candidates.is_empty() {
        // nothing is scoreable; ship the default cutoff
        return Ok(ThresholdReport {
            threshold: DEFAULT_THRESHOLD,
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
            candidate_count: 0,
        });
    }

    let mut best: Option<ThresholdReport> = None;
    for threshold in &candidates {
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for (score, gold) in &scored {
            let predicted = score < threshold;
            match (predicted, gold) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        let (precision, recall, f1) = f_score(tp, fp, fn_);
        // candidates ascend, so strict improvement keeps the smallest
        // threshold on F1 ties
        if best.as_ref().map_or(true, |b| f1 > b.f1) {
            best = Some(ThresholdReport {
                threshold: *threshold,
                precision,
                recall,
                f1,
                candidate_count: candidates.len(),
            });
        }
    }
    Ok(best.expect("candidates were non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ErrorSpan, Span, Token, Upos};

    /// One-token outputs tagged PROPN so the score equals the given prob.
    fn output(doc_id: &str, prob: f64, has_error: bool, kind: ErrorKind) -> AnnotatedOutput {
        AnnotatedOutput {
            doc_id: doc_id.into(),
            tokens: vec![Token::new("Name", Upos::Propn, 0)],
            probs: vec![prob],
            errors: if has_error {
                vec![ErrorSpan { span: Span::new(0, 1), kind }]
            } else {
                vec![]
            },
        }
    }

    #[test]
    fn worked_example_finds_perfect_split() {
        let outputs = vec![
            output("a", 0.1, true, ErrorKind::Extrinsic),
            output("b", 0.3, true, ErrorKind::Intrinsic),
            output("c", 0.5, false, ErrorKind::Extrinsic),
            output("d", 0.9, false, ErrorKind::Extrinsic),
        ];
        let report = tune_threshold(&outputs).unwrap();
        assert_eq!(report.threshold, 0.5);
        assert_eq!(report.f1, 1.0);
        assert_eq!(report.precision, 1.0);
        assert_eq!(report.recall, 1.0);
        assert_eq!(report.candidate_count, 5);
    }

    #[test]
    fn all_clean_outputs_give_zero_f1_at_smallest_candidate() {
        let outputs = vec![
            output("a", 0.2, false, ErrorKind::Extrinsic),
            output("b", 0.6, false, ErrorKind::Extrinsic),
        ];
        let report = tune_threshold(&outputs).unwrap();
        assert_eq!(report.f1, 0.0);
        assert_eq!(report.threshold, 0.2);
    }

    #[test]
    fn world_knowledge_is_not_gold_by_default() {
        let outputs = vec![
            output("a", 0.1, true, ErrorKind::WorldKnowledge),
            output("b", 0.9, false, ErrorKind::Extrinsic),
        ];
        let report = tune_threshold(&outputs).unwrap();
        assert_eq!(report.f1, 0.0);
        let inclusive = tune_threshold_with(
            &outputs,
            ThresholdOptions { include_world_knowledge: true },
        )
        .unwrap();
        assert_eq!(inclusive.f1, 1.0);
    }

    #[test]
    fn unscoreable_outputs_fall_back_to_default() {
        let outputs = vec![AnnotatedOutput {
            doc_id: "a".into(),
            tokens: vec![Token::new("the", Upos::Det, 0)],
            probs: vec![0.4],
            errors: vec![],
        }];
        let report = tune_threshold(&outputs).unwrap();
        assert_eq!(report.threshold, DEFAULT_THRESHOLD);
        assert_eq!(report.candidate_count, 0);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(tune_threshold(&[]).is_err());
    }

    #[test]
    fn score_is_min_over_qualifying_spans() {
        let out = AnnotatedOutput {
            doc_id: "x".into(),
            tokens: vec![
                Token::new("Wayne", Upos::Propn, 0),
                Token::new("scored", Upos::Verb, 1),
                Token::new("2", Upos::Num, 2),
            ],
            probs: vec![0.92, 0.99, 0.15],
            errors: vec![],
        };
        assert_eq!(output_score(&out), 0.15);
    }
}
