//! Corpus-derived entity gazetteer and greedy surface matching.
//!
//! The gazetteer is the deterministic stand-in for running a named-entity
//! recognizer over generated text: any token run whose normalized surface
//! is a known mention counts as an entity of the recorded type.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::corpus::{normalized_surface, Corpus, EntityMention, Span, Token};

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    /// Normalized surface → entity type.
    entries: BTreeMap<String, String>,
    /// Normalized surface → ids of documents contributing it.
    sourced: BTreeMap<String, BTreeSet<String>>,
    /// Longest entry length in tokens, for bounded matching windows.
    max_words: usize,
}

impl Gazetteer {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn etype_of(&self, surface: &str) -> Option<&str> {
        self.entries.get(surface).map(String::as_str)
    }

    pub fn contributors(&self, surface: &str) -> Option<&BTreeSet<String>> {
        self.sourced.get(surface)
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// TSV export: one `surface<TAB>type` row per entry.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (surface, etype) in &self.entries {
            let _ = writeln!(out, "{surface}\t{etype}");
        }
        out
    }
}

/// Collects every entity mention in every source and reference. When a
/// surface is seen with conflicting types, the most frequent type wins,
/// ties breaking toward the lexicographically smallest.
pub fn build_gazetteer(corpus: &Corpus) -> Gazetteer {
    let mut type_counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut sourced: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    for doc in &corpus.docs {
        for text in [&doc.source, &doc.reference] {
            for ent in &text.entities {
                *type_counts
                    .entry(ent.surface.clone())
                    .or_default()
                    .entry(ent.etype.clone())
                    .or_insert(0) += 1;
                sourced
                    .entry(ent.surface.clone())
                    .or_default()
                    .insert(doc.id.clone());
            }
        }
    }

    let mut entries = BTreeMap::new();
    let mut max_words = 0;
    for (surface, types) in type_counts {
        let etype = types
            .iter()
            .max_by(|(ta, ca), (tb, cb)| ca.cmp(cb).then_with(|| tb.cmp(ta)))
            .map(|(t, _)| t.clone())
            .expect("non-empty type counts");
        max_words = max_words.max(surface.split(' ').count());
        entries.insert(surface, etype);
    }
    Gazetteer { entries, sourced, max_words }
}

/// Greedy leftmost-longest matching of gazetteer surfaces against a token
/// stream. After a match, scanning resumes past it, so results never
/// overlap.
pub fn match_entities(tokens: &[Token], gazetteer: &Gazetteer) -> Vec<EntityMention> {
    let mut mentions = Vec::new();
    if gazetteer.is_empty() {
        return mentions;
    }
    let mut i = 0;
    while i < tokens.len() {
        let longest = gazetteer.max_words.min(tokens.len() - i);
        let mut matched = None;
        for width in (1..=longest).rev() {
            let surface = normalized_surface(&tokens[i..i + width]);
            if let Some(etype) = gazetteer.etype_of(&surface) {
                matched = Some((width, surface, etype.to_string()));
                break;
            }
        }
        if let Some((width, surface, etype)) = matched {
            mentions.push(EntityMention {
                span: Span::new(i, i + width),
                etype,
                surface,
            });
            i += width;
        } else {
            i += 1;
        }
    }
    mentions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedText, Document, Upos};

    fn text_with_entities(words: &[&str], entities: &[(usize, usize, &str)]) -> AnnotatedText {
        let tokens: Vec<Token> = words
            .iter()
            .enumerate()
            .map(|(i, w)| Token::new(*w, Upos::X, i))
            .collect();
        let entities = entities
            .iter()
            .map(|(s, e, ty)| EntityMention {
                span: Span::new(*s, *e),
                etype: ty.to_string(),
                surface: normalized_surface(&tokens[*s..*e]),
            })
            .collect();
        AnnotatedText { tokens, entities, ..Default::default() }
    }

    fn corpus() -> Corpus {
        Corpus::new(vec![Document {
            id: "d0".into(),
            source: text_with_entities(
                &["the", "south", "yorkshire", "police", "called", "the", "rspca"],
                &[(1, 3, "GPE"), (6, 7, "ORG")],
            ),
            reference: text_with_entities(&["police", "called"], &[]),
        }])
        .unwrap()
    }

    #[test]
    fn gazetteer_collects_both_mentions() {
        let gaz = build_gazetteer(&corpus());
        assert_eq!(gaz.len(), 2);
        assert_eq!(gaz.etype_of("south yorkshire"), Some("GPE"));
        assert_eq!(gaz.etype_of("rspca"), Some("ORG"));
        assert!(gaz.contributors("rspca").unwrap().contains("d0"));
    }

    #[test]
    fn leftmost_longest_match() {
        let gaz = build_gazetteer(&corpus());
        let tokens: Vec<Token> = ["the", "south", "yorkshire", "police"]
            .iter()
            .enumerate()
            .map(|(i, w)| Token::new(*w, Upos::X, i))
            .collect();
        let found = match_entities(&tokens, &gaz);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].span, Span::new(1, 3));
        assert_eq!(found[0].etype, "GPE");
    }

    #[test]
    fn matches_are_disjoint_and_known() {
        let gaz = build_gazetteer(&corpus());
        let tokens: Vec<Token> = ["rspca", "south", "yorkshire", "rspca"]
            .iter()
            .enumerate()
            .map(|(i, w)| Token::new(*w, Upos::X, i))
            .collect();
        let found = match_entities(&tokens, &gaz);
        assert_eq!(found.len(), 3);
        for pair in found.windows(2) {
            assert!(pair[0].span.end <= pair[1].span.start);
        }
        for m in &found {
            assert!(gaz.etype_of(&m.surface).is_some());
        }
    }

    #[test]
    fn tsv_export_is_sorted() {
        let gaz = build_gazetteer(&corpus());
        let tsv = gaz.to_tsv();
        assert_eq!(tsv, "rspca\tORG\nsouth yorkshire\tGPE\n");
    }
}
