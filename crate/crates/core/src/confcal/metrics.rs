//! Evaluation metrics: LCS-based summary similarity, Pearson correlation,
//! and error-rate statistics over annotated outputs.

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedOutput, ErrorKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut current = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            current[j + 1] = if x == y {
                prev[j] + 1
            } else {
                current[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut current);
    }
    prev[b.len()]
}

/// Summary-level longest-common-subsequence score with case-insensitive
/// token matching and harmonic-mean F (β = 1).
pub fn rouge_l(reference: &[String], hypothesis: &[String]) -> Result<RougeScore> {
    if reference.is_empty() || hypothesis.is_empty() {
        return Err(Error::Invalid("rouge-l needs non-empty token sequences".into()));
    }
    let ref_lower: Vec<String> = reference.iter().map(|t| t.to_lowercase()).collect();
    let hyp_lower: Vec<String> = hypothesis.iter().map(|t| t.to_lowercase()).collect();
    let lcs = lcs_len(&ref_lower, &hyp_lower) as f64;
    let recall = lcs / reference.len() as f64;
    let precision = lcs / hypothesis.len() as f64;
    let f = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(RougeScore { precision, recall, f })
}

/// Product-moment correlation. Requires two same-length series of at least
/// two points with nonzero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Invalid(format!(
            "series lengths differ: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Invalid("correlation needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mean_x: f64 = xs.iter().sum::<f64>() / n;
    let mean_y: f64 = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::Numeric("correlation undefined for zero-variance series".into()));
    }
    Ok(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Per-output error statistics; world-knowledge spans are not errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputErrorRate {
    pub doc_id: String,
    /// Fraction of tokens covered by intrinsic or extrinsic spans.
    pub fraction: f64,
    /// Number of intrinsic or extrinsic spans.
    pub error_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateReport {
    pub per_output: Vec<OutputErrorRate>,
    pub mean_fraction: f64,
    pub mean_count: f64,
}

pub fn error_rates(outputs: &[AnnotatedOutput]) -> ErrorRateReport {
    let mut per_output = Vec::with_capacity(outputs.len());
    for output in outputs {
        let mut covered = vec![false; output.tokens.len()];
        let mut count = 0;
        for err in &output.errors {
            if err.kind == ErrorKind::WorldKnowledge {
                continue;
            }
            count += 1;
            for i in err.span.start..err.span.end.min(covered.len()) {
                covered[i] = true;
            }
        }
        let fraction = if covered.is_empty() {
            0.0
        } else {
            covered.iter().filter(|c| **c).count() as f64 / covered.len() as f64
        };
        per_output.push(OutputErrorRate {
            doc_id: output.doc_id.clone(),
            fraction,
            error_count: count,
        });
    }
    let n = per_output.len().max(1) as f64;
    let mean_fraction = per_output.iter().map(|o| o.fraction).sum::<f64>() / n;
    let mean_count = per_output.iter().map(|o| o.error_count as f64).sum::<f64>() / n;
    ErrorRateReport { per_output, mean_fraction, mean_count }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ErrorSpan, Span, Token, Upos};

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn identical_sequences_score_one() {
        let s = words(&["a", "b", "c"]);
        let r = rouge_l(&s, &s).unwrap();
        assert_eq!((r.precision, r.recall, r.f), (1.0, 1.0, 1.0));
    }

    #[test]
    fn worked_lcs_example() {
        let reference = words(&["a", "b", "c", "d"]);
        let hypothesis = words(&["a", "c", "d"]);
        let r = rouge_l(&reference, &hypothesis).unwrap();
        assert!((r.recall - 0.75).abs() < 1e-12);
        assert!((r.precision - 1.0).abs() < 1e-12);
        assert!((r.f - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_vocabularies_score_zero() {
        let r = rouge_l(&words(&["a", "b"]), &words(&["x", "y"])).unwrap();
        assert_eq!((r.precision, r.recall, r.f), (0.0, 0.0, 0.0));
    }

    #[test]
    fn matching_is_case_insensitive() {
        let r = rouge_l(&words(&["Owl", "Flew"]), &words(&["owl", "flew"])).unwrap();
        assert_eq!(r.f, 1.0);
    }

    #[test]
    fn empty_sequence_is_an_error() {
        assert!(rouge_l(&[], &words(&["a"])).is_err());
    }

    #[test]
    fn exact_linear_correlation() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_variance_is_an_error() {
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn affine_invariance() {
        let xs = [0.3, 1.7, 2.2, 4.9, 5.5];
        let ys = [2.0, 1.1, 3.3, 4.0, 3.9];
        let base = pearson(&xs, &ys).unwrap();
        let shifted: Vec<f64> = xs.iter().map(|x| 3.0 * x + 11.0).collect();
        let r = pearson(&shifted, &ys).unwrap();
        assert!((base - r).abs() < 1e-12);
    }

    fn out(n: usize, errors: Vec<ErrorSpan>) -> AnnotatedOutput {
        AnnotatedOutput {
            doc_id: "d".into(),
            tokens: (0..n).map(|i| Token::new(format!("t{i}"), Upos::X, i)).collect(),
            probs: vec![0.5; n],
            errors,
        }
    }

    #[test]
    fn single_span_fraction() {
        let report = error_rates(&[out(
            10,
            vec![ErrorSpan { span: Span::new(2, 5), kind: ErrorKind::Extrinsic }],
        )]);
        assert_eq!(report.per_output[0].fraction, 0.3);
        assert_eq!(report.per_output[0].error_count, 1);
    }

    #[test]
    fn two_spans_accumulate() {
        let report = error_rates(&[out(
            10,
            vec![
                ErrorSpan { span: Span::new(0, 2), kind: ErrorKind::Intrinsic },
                ErrorSpan { span: Span::new(5, 6), kind: ErrorKind::Extrinsic },
            ],
        )]);
        assert_eq!(report.per_output[0].fraction, 0.3);
        assert_eq!(report.per_output[0].error_count, 2);
    }

    #[test]
    fn world_knowledge_is_excluded() {
        let report = error_rates(&[out(
            10,
            vec![ErrorSpan { span: Span::new(0, 4), kind: ErrorKind::WorldKnowledge }],
        )]);
        assert_eq!(report.per_output[0].fraction, 0.0);
        assert_eq!(report.per_output[0].error_count, 0);
    }
}
