//! Synonym and POS lexicons built from corpora or TSV files.

use std::collections::BTreeMap;

use crate::corpus::{Corpus, Token, Upos};
use crate::{Error, Result};

use super::spans::is_number_surface;

fn normalize(word: &str) -> String {
    word.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Disjoint sets of interchangeable word forms.
#[derive(Debug, Clone, Default)]
pub struct SynonymLexicon {
    groups: Vec<Vec<String>>,
    index: BTreeMap<String, usize>,
}

impl SynonymLexicon {
    /// Builds from raw groups, normalizing each form. Groups must be
    /// pairwise disjoint after normalization.
    pub fn from_groups(raw: Vec<Vec<String>>) -> Result<Self> {
        let mut lexicon = SynonymLexicon::default();
        for group in raw {
            let mut members: Vec<String> = group.iter().map(|w| normalize(w)).collect();
            members.sort();
            members.dedup();
            if members.len() < 2 {
                continue;
            }
            let id = lexicon.groups.len();
            for member in &members {
                if lexicon.index.insert(member.clone(), id).is_some() {
                    return Err(Error::Invalid(format!(
                        "synonym form '{member}' appears in more than one group"
                    )));
                }
            }
            lexicon.groups.push(members);
        }
        Ok(lexicon)
    }

    /// Parses a TSV file: one synonym set per line, tab-separated forms.
    /// Blank lines and `#` comments are skipped.
    pub fn from_tsv(input: &str) -> Result<Self> {
        let groups = input
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split('\t').map(str::to_string).collect())
            .collect();
        Self::from_groups(groups)
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_of(&self, form: &str) -> Option<usize> {
        self.index.get(&normalize(form)).copied()
    }

    pub fn members(&self, group: usize) -> &[String] {
        &self.groups[group]
    }

    /// True when the two forms are equal after normalization or share a
    /// synonym group.
    pub fn same_or_synonym(&self, a: &str, b: &str) -> bool {
        let (a, b) = (normalize(a), normalize(b));
        if a == b {
            return true;
        }
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(ga), Some(gb)) => ga == gb,
            _ => false,
        }
    }
}

/// Surface → most frequent UPOS, from corpus counts. Ties break toward the
/// lexicographically smallest tag, so the result is corpus-deterministic.
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    map: BTreeMap<String, Upos>,
}

impl PosLexicon {
    pub fn build(corpus: &Corpus) -> Self {
        let mut counts: BTreeMap<String, BTreeMap<Upos, u64>> = BTreeMap::new();
        for doc in &corpus.docs {
            for tok in doc.source.tokens.iter().chain(doc.reference.tokens.iter()) {
                *counts
                    .entry(tok.surface.to_lowercase())
                    .or_default()
                    .entry(tok.upos)
                    .or_insert(0) += 1;
            }
        }
        let map = counts
            .into_iter()
            .map(|(surface, tags)| {
                let best = tags
                    .iter()
                    .max_by(|(ta, ca), (tb, cb)| ca.cmp(cb).then_with(|| tb.cmp(ta)))
                    .map(|(tag, _)| *tag)
                    .unwrap_or(Upos::X);
                (surface, best)
            })
            .collect();
        PosLexicon { map }
    }

    pub fn lookup(&self, surface: &str) -> Option<Upos> {
        self.map.get(&surface.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Tag for a surface: lexicon majority vote, else NUM for number-shaped
    /// surfaces, else X.
    pub fn tag_for(&self, surface: &str) -> Upos {
        if let Some(tag) = self.lookup(surface) {
            return tag;
        }
        if is_number_surface(surface) {
            Upos::Num
        } else {
            Upos::X
        }
    }
}

/// Retags every token through the lexicon (see [`PosLexicon::tag_for`]).
pub fn tag_pos(tokens: &[Token], lexicon: &PosLexicon) -> Vec<Token> {
    tokens
        .iter()
        .map(|t| Token::new(t.surface.clone(), lexicon.tag_for(&t.surface), t.index))
        .collect()
}
