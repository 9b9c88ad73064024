//! Nucleus (top-p) filtering and autoregressive sampling over an n-gram
//! model, plus the generator interfaces external services can stand behind.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ngram::{NGramModel, END};
use super::rng::RngState;
use crate::{Error, Result};

/// One generated token with its probability under the sampling
/// distribution actually used (`prob`) and under the untruncated model
/// (`raw_prob`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStep {
    pub token: String,
    pub prob: f64,
    pub raw_prob: f64,
}

/// Sorts a distribution by descending probability, ties broken
/// lexicographically by surface, so the kept set is implementation-independent.
fn sorted_entries(dist: &BTreeMap<String, f64>) -> Vec<(&str, f64)> {
    let mut entries: Vec<(&str, f64)> = dist.iter().map(|(t, p)| (t.as_str(), *p)).collect();
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
    entries
}

/// Keeps the smallest descending-probability prefix whose cumulative mass
/// reaches `p`, renormalized to sum 1.
pub fn nucleus_filter(dist: &BTreeMap<String, f64>, p: f64) -> Result<BTreeMap<String, f64>> {
    if !(0.0..=1.0).contains(&p) || p == 0.0 {
        return Err(Error::Invalid(format!("nucleus threshold must be in (0, 1], got {p}")));
    }
    let total: f64 = dist.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid(format!(
            "nucleus input must sum to 1 (got {total})"
        )));
    }
    if dist.is_empty() {
        return Err(Error::Invalid("nucleus input distribution is empty".into()));
    }

    let entries = sorted_entries(dist);
    let mut kept = Vec::new();
    let mut cumulative = 0.0;
    for (token, prob) in entries {
        kept.push((token.to_string(), prob));
        cumulative += prob;
        if cumulative >= p {
            break;
        }
    }
    let mass: f64 = kept.iter().map(|(_, p)| p).sum();
    Ok(kept.into_iter().map(|(t, p)| (t, p / mass)).collect())
}

/// Draws one token from a filtered distribution, walking it in the same
/// deterministic order the filter used.
fn draw(
    filtered: &BTreeMap<String, f64>,
    raw: &BTreeMap<String, f64>,
    rng: &mut RngState,
) -> GenerationStep {
    let entries = sorted_entries(filtered);
    let u = rng.next_unit();
    let mut cumulative = 0.0;
    let mut chosen = entries[entries.len() - 1].0;
    let mut chosen_prob = entries[entries.len() - 1].1;
    for (token, prob) in &entries {
        cumulative += prob;
        if u < cumulative {
            chosen = token;
            chosen_prob = *prob;
            break;
        }
    }
    GenerationStep {
        token: chosen.to_string(),
        prob: chosen_prob,
        raw_prob: raw.get(chosen).copied().unwrap_or(0.0),
    }
}

/// Autoregressive nucleus sampling from a prefix. Stops at the end marker
/// (not emitted) or after `max_len` tokens.
pub fn sample_sequence(
    model: &NGramModel,
    prefix: &[String],
    max_len: usize,
    nucleus_p: f64,
    rng: &mut RngState,
) -> Result<Vec<GenerationStep>> {
    if max_len < 1 {
        return Err(Error::Invalid("max_len must be >= 1".into()));
    }
    let mut context: Vec<String> = prefix.to_vec();
    let mut steps = Vec::new();
    while steps.len() < max_len {
        let raw = model.next_distribution(&context);
        let filtered = nucleus_filter(&raw, nucleus_p)?;
        let step = draw(&filtered, &raw, rng);
        if step.token == END {
            break;
        }
        context.push(step.token.clone());
        steps.push(step);
    }
    Ok(steps)
}

/// Fills a masked gap: the fill length is drawn uniformly from
/// {1, ..., len_max}, then that many tokens are sampled conditioned on the
/// left context only. The end marker is excluded from the fill
/// distribution so the drawn length is always realized.
pub fn fill_mask(
    model: &NGramModel,
    left: &[String],
    _right: &[String],
    nucleus_p: f64,
    len_max: usize,
    rng: &mut RngState,
) -> Result<Vec<GenerationStep>> {
    if len_max < 1 {
        return Err(Error::Invalid("fill length bound must be >= 1".into()));
    }
    let len = 1 + rng.next_index(len_max);
    let mut context: Vec<String> = left.to_vec();
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        let mut raw = model.next_distribution(&context);
        raw.remove(END);
        let mass: f64 = raw.values().sum();
        for p in raw.values_mut() {
            *p /= mass;
        }
        let filtered = nucleus_filter(&raw, nucleus_p)?;
        let step = draw(&filtered, &raw, rng);
        context.push(step.token.clone());
        steps.push(step);
    }
    Ok(steps)
}

/// Mask-infilling interface; adapt external services by implementing it.
/// Contract: tokens in, [`GenerationStep`]s out.
pub trait Infiller {
    fn fill(&self, left: &[String], right: &[String], rng: &mut RngState)
        -> Result<Vec<GenerationStep>>;
}

/// Prompt-continuation interface; adapt external services by implementing it.
pub trait Regenerator {
    fn continue_from(
        &self,
        prefix: &[String],
        max_len: usize,
        rng: &mut RngState,
    ) -> Result<Vec<GenerationStep>>;
}

/// The bundled n-gram generator behind both interfaces.
#[derive(Debug, Clone)]
pub struct NGramGenerator<'a> {
    pub model: &'a NGramModel,
    pub nucleus_p: f64,
    pub fill_len_max: usize,
}

impl<'a> NGramGenerator<'a> {
    pub fn new(model: &'a NGramModel, nucleus_p: f64, fill_len_max: usize) -> Self {
        NGramGenerator { model, nucleus_p, fill_len_max }
    }
}

impl Infiller for NGramGenerator<'_> {
    fn fill(
        &self,
        left: &[String],
        right: &[String],
        rng: &mut RngState,
    ) -> Result<Vec<GenerationStep>> {
        fill_mask(self.model, left, right, self.nucleus_p, self.fill_len_max, rng)
    }
}

impl Regenerator for NGramGenerator<'_> {
    fn continue_from(
        &self,
        prefix: &[String],
        max_len: usize,
        rng: &mut RngState,
    ) -> Result<Vec<GenerationStep>> {
        sample_sequence(self.model, prefix, max_len, self.nucleus_p, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedText, Corpus, Document, Token, Upos};

    fn dist(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(t, p)| (t.to_string(), *p)).collect()
    }

    fn train(words: &[&str], order: usize) -> NGramModel {
        let text = AnnotatedText {
            tokens: words
                .iter()
                .enumerate()
                .map(|(i, w)| Token::new(*w, Upos::X, i))
                .collect(),
            ..Default::default()
        };
        let corpus = Corpus::new(vec![Document {
            id: "d".into(),
            source: text.clone(),
            reference: text,
        }])
        .unwrap();
        NGramModel::train(&corpus, order, 0.1).unwrap()
    }

    #[test]
    fn nucleus_keeps_smallest_prefix_and_renormalizes() {
        let filtered = nucleus_filter(&dist(&[("a", 0.5), ("b", 0.3), ("c", 0.2)]), 0.7).unwrap();
        assert_eq!(filtered.len(), 2);
        assert!((filtered["a"] - 0.625).abs() < 1e-12);
        assert!((filtered["b"] - 0.375).abs() < 1e-12);
    }

    #[test]
    fn nucleus_p_one_keeps_everything() {
        let d = dist(&[("a", 0.5), ("b", 0.3), ("c", 0.2)]);
        let filtered = nucleus_filter(&d, 1.0).unwrap();
        assert_eq!(filtered.len(), 3);
        for (t, p) in &d {
            assert!((filtered[t] - p).abs() < 1e-12);
        }
    }

    #[test]
    fn nucleus_single_token_is_identity() {
        let filtered = nucleus_filter(&dist(&[("only", 1.0)]), 0.3).unwrap();
        assert_eq!(filtered.len(), 1);
        assert!((filtered["only"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nucleus_tie_break_is_lexicographic() {
        let filtered = nucleus_filter(&dist(&[("b", 0.4), ("a", 0.4), ("c", 0.2)]), 0.4).unwrap();
        assert_eq!(filtered.len(), 1);
        assert!(filtered.contains_key("a"));
    }

    #[test]
    fn nucleus_kept_set_is_minimal() {
        let d = dist(&[("a", 0.4), ("b", 0.3), ("c", 0.2), ("d", 0.1)]);
        for p in [0.3, 0.5, 0.7, 0.9, 1.0] {
            let kept = nucleus_filter(&d, p).unwrap();
            let raw_mass: f64 = kept.keys().map(|t| d[t]).sum();
            assert!(raw_mass >= p - 1e-12);
            if kept.len() > 1 {
                let least = kept
                    .keys()
                    .map(|t| d[t])
                    .fold(f64::INFINITY, f64::min);
                assert!(raw_mass - least < p, "kept set not minimal at p={p}");
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let model = train(&["the", "owl", "flew", "to", "the", "barn"], 3);
        let prefix = vec!["the".to_string()];
        let a = sample_sequence(&model, &prefix, 8, 0.7, &mut RngState::new(9)).unwrap();
        let b = sample_sequence(&model, &prefix, 8, 0.7, &mut RngState::new(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.len() <= 8);
    }

    #[test]
    fn sampled_tokens_are_in_their_nucleus_set() {
        let model = train(&["a", "b", "c", "a", "b"], 2);
        let mut rng = RngState::new(4);
        let mut context: Vec<String> = vec![];
        for _ in 0..6 {
            let raw = model.next_distribution(&context);
            let filtered = nucleus_filter(&raw, 0.7).unwrap();
            let mut probe = rng.clone();
            let step = draw(&filtered, &raw, &mut probe);
            assert!(filtered.contains_key(&step.token));
            // replay the same draw to advance the real rng identically
            let real = draw(&filtered, &raw, &mut rng);
            assert_eq!(real, step);
            if real.token == END {
                break;
            }
            context.push(real.token);
        }
    }

    #[test]
    fn only_last_context_tokens_condition_the_first_step() {
        let model = train(&["x", "y", "z", "w"], 3);
        let long_prefix: Vec<String> = vec!["q".into(), "r".into(), "y".into(), "z".into()];
        let short_prefix: Vec<String> = vec!["y".into(), "z".into()];
        assert_eq!(
            model.next_distribution(&long_prefix),
            model.next_distribution(&short_prefix)
        );
    }

    #[test]
    fn fill_length_stays_in_bounds_and_in_vocab() {
        let model = train(&["a", "b", "c", "d", "e"], 3);
        for seed in 0..20 {
            let mut rng = RngState::new(seed);
            let fill = fill_mask(&model, &["a".into()], &[], 0.7, 3, &mut rng).unwrap();
            assert!((1..=3).contains(&fill.len()));
            for step in &fill {
                assert!(model.vocab().contains(&step.token));
                assert_ne!(step.token, END);
                assert!(step.prob > 0.0 && step.prob <= 1.0);
                assert!(step.raw_prob <= 1.0);
            }
        }
    }
}
