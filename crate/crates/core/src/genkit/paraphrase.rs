//! Paraphrasing interface with a bundled synonym-substitution stub.
//!
//! Real pipelines put a round-trip translation model behind [`Paraphraser`];
//! the stub swaps a bounded number of words for synonyms so positive-sample
//! filtering has something meaningful to accept or reject.

use crate::corpus::Token;
use crate::linguo::SynonymLexicon;

pub trait Paraphraser {
    fn paraphrase(&self, tokens: &[Token]) -> Vec<Token>;
}

/// Replaces up to `max_subs` tokens with a synonym, scanning left to right
/// and using each synonym group at most once. Identity when the lexicon is
/// empty. Token count never changes.
#[derive(Debug, Clone)]
pub struct SynonymParaphraser<'a> {
    pub lexicon: &'a SynonymLexicon,
    pub max_subs: usize,
}

impl<'a> SynonymParaphraser<'a> {
    pub fn new(lexicon: &'a SynonymLexicon) -> Self {
        SynonymParaphraser { lexicon, max_subs: 2 }
    }

    pub fn with_max_subs(lexicon: &'a SynonymLexicon, max_subs: usize) -> Self {
        SynonymParaphraser { lexicon, max_subs }
    }
}

impl Paraphraser for SynonymParaphraser<'_> {
    fn paraphrase(&self, tokens: &[Token]) -> Vec<Token> {
        let mut out = tokens.to_vec();
        let mut used_groups = Vec::new();
        let mut substituted = 0;
        for tok in &mut out {
            if substituted >= self.max_subs {
                break;
            }
            let form = tok.surface.to_lowercase();
            let Some(group) = self.lexicon.group_of(&form) else {
                continue;
            };
            if used_groups.contains(&group) {
                continue;
            }
            // smallest group member different from the original form
            if let Some(replacement) = self
                .lexicon
                .members(group)
                .iter()
                .find(|m| **m != form)
            {
                tok.surface = replacement.clone();
                used_groups.push(group);
                substituted += 1;
            }
        }
        out
    }
}

/// A paraphraser that returns its input unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityParaphraser;

impl Paraphraser for IdentityParaphraser {
    fn paraphrase(&self, tokens: &[Token]) -> Vec<Token> {
        tokens.to_vec()
    }
}
