//! Add-k smoothed n-gram language model over corpus token streams.
//!
//! A deterministic, trainable-in-milliseconds stand-in for the neural
//! generators that normally produce infills, regenerations, and token
//! probabilities. Every map is ordered so training and prediction are
//! reproducible regardless of insertion order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::corpus::{Corpus, Token};
use crate::{Error, Result};

/// Sentence-start padding marker.
pub const START: &str = "<s>";
/// End-of-sequence marker; predicting it terminates generation.
pub const END: &str = "</s>";

#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    smoothing_k: f64,
    counts: BTreeMap<Vec<String>, BTreeMap<String, u64>>,
    context_totals: BTreeMap<Vec<String>, u64>,
    vocab: BTreeSet<String>,
}

impl NGramModel {
    /// Trains on all source and reference token streams of a corpus. Each
    /// stream is padded with (order − 1) start markers and one end marker.
    pub fn train(corpus: &Corpus, order: usize, smoothing_k: f64) -> Result<Self> {
        if order < 2 {
            return Err(Error::Invalid(format!("n-gram order must be >= 2, got {order}")));
        }
        if corpus.is_empty() {
            return Err(Error::Invalid("cannot train an n-gram model on an empty corpus".into()));
        }
        if smoothing_k <= 0.0 {
            return Err(Error::Invalid(format!(
                "smoothing constant must be positive, got {smoothing_k}"
            )));
        }

        let mut model = NGramModel {
            order,
            smoothing_k,
            counts: BTreeMap::new(),
            context_totals: BTreeMap::new(),
            vocab: BTreeSet::new(),
        };
        model.vocab.insert(START.to_string());
        model.vocab.insert(END.to_string());

        for doc in &corpus.docs {
            model.ingest(&doc.source.tokens);
            model.ingest(&doc.reference.tokens);
        }
        Ok(model)
    }

    fn ingest(&mut self, tokens: &[Token]) {
        let mut stream: Vec<String> = vec![START.to_string(); self.order - 1];
        stream.extend(tokens.iter().map(|t| t.surface.clone()));
        stream.push(END.to_string());
        for tok in tokens {
            self.vocab.insert(tok.surface.clone());
        }
        for window in stream.windows(self.order) {
            let context = window[..self.order - 1].to_vec();
            let target = window[self.order - 1].clone();
            *self
                .counts
                .entry(context.clone())
                .or_default()
                .entry(target)
                .or_insert(0) += 1;
            *self.context_totals.entry(context).or_insert(0) += 1;
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing_k(&self) -> f64 {
        self.smoothing_k
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    /// Number of predictable symbols: the vocabulary minus the start marker,
    /// which is never generated.
    pub fn support_size(&self) -> usize {
        self.vocab.len() - 1
    }

    /// Truncates or left-pads a prefix to the (order − 1)-token context the
    /// model conditions on.
    fn context_of(&self, prefix: &[String]) -> Vec<String> {
        let want = self.order - 1;
        if prefix.len() >= want {
            prefix[prefix.len() - want..].to_vec()
        } else {
            let mut ctx = vec![START.to_string(); want - prefix.len()];
            ctx.extend_from_slice(prefix);
            ctx
        }
    }

    /// Add-k smoothed next-token distribution given a prefix. Sums to 1
    /// over the support (vocabulary without the start marker).
    pub fn next_distribution(&self, prefix: &[String]) -> BTreeMap<String, f64> {
        let context = self.context_of(prefix);
        let seen = self.counts.get(&context);
        let total = self.context_totals.get(&context).copied().unwrap_or(0) as f64;
        let k = self.smoothing_k;
        let denom = total + k * self.support_size() as f64;

        let mut dist = BTreeMap::new();
        for word in &self.vocab {
            if word == START {
                continue;
            }
            let count = seen.and_then(|m| m.get(word)).copied().unwrap_or(0) as f64;
            dist.insert(word.clone(), (count + k) / denom);
        }
        dist
    }

    /// Smoothed probability of one token after a prefix. Out-of-vocabulary
    /// tokens receive the unseen-event mass k / denom, keeping every score
    /// strictly positive.
    pub fn token_prob(&self, prefix: &[String], token: &str) -> f64 {
        let context = self.context_of(prefix);
        let total = self.context_totals.get(&context).copied().unwrap_or(0) as f64;
        let count = self
            .counts
            .get(&context)
            .and_then(|m| m.get(token))
            .copied()
            .unwrap_or(0) as f64;
        let k = self.smoothing_k;
        (count + k) / (total + k * self.support_size() as f64)
    }

    /// Per-token model probabilities of a complete surface stream.
    pub fn score_sequence(&self, surfaces: &[String]) -> Vec<f64> {
        let mut probs = Vec::with_capacity(surfaces.len());
        for (i, token) in surfaces.iter().enumerate() {
            probs.push(self.token_prob(&surfaces[..i], token));
        }
        probs
    }

    /// Debug dump as TSV rows of (context, token, count).
    pub fn dump_tsv(&self) -> String {
        let mut out = String::new();
        for (context, targets) in &self.counts {
            for (token, count) in targets {
                let _ = writeln!(out, "{}\t{}\t{}", context.join(" "), token, count);
            }
        }
        out
    }
}
