//! Dependency-relation triples with noun-phrase span expansion, and
//! synonym-aware relation matching against reference texts.

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedText, Span, Upos};

use super::lexicon::SynonymLexicon;

/// A governor–relation–dependent triple with endpoint spans.
///
/// `gov_head` / `dep_head` are the original edge endpoints; an endpoint
/// span widens to its enclosing noun-phrase chunk when that chunk contains
/// a named entity, otherwise it is the head token alone. Head surfaces are
/// stored normalized so a triple can be matched without its source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTriple {
    pub gov_span: Span,
    pub rel: String,
    pub dep_span: Span,
    pub gov_head: usize,
    pub dep_head: usize,
    pub gov_surface: String,
    pub dep_surface: String,
}

fn expand_endpoint(text: &AnnotatedText, head: usize) -> Span {
    for chunk in &text.np_chunks {
        if chunk.contains(head) {
            let has_entity = text.entities.iter().any(|e| chunk.covers(&e.span));
            if has_entity {
                return *chunk;
            }
        }
    }
    Span::new(head, head + 1)
}

/// One triple per dependency edge whose governor or dependent is a content
/// word, ordered by (gov_head, dep_head).
///
/// If expansion would make the two endpoint spans overlap (both heads in
/// the same chunk), both fall back to single-token spans so the disjointness
/// invariant holds.
pub fn extract_relations(text: &AnnotatedText) -> Vec<RelationTriple> {
    let mut triples = Vec::new();
    for edge in &text.deps {
        let gov_tok = &text.tokens[edge.gov];
        let dep_tok = &text.tokens[edge.dep];
        if !gov_tok.upos.is_content_word() && !dep_tok.upos.is_content_word() {
            continue;
        }
        let mut gov_span = if gov_tok.upos.is_content_word() {
            expand_endpoint(text, edge.gov)
        } else {
            Span::new(edge.gov, edge.gov + 1)
        };
        let mut dep_span = if dep_tok.upos.is_content_word() {
            expand_endpoint(text, edge.dep)
        } else {
            Span::new(edge.dep, edge.dep + 1)
        };
        if gov_span.overlaps(&dep_span) {
            gov_span = Span::new(edge.gov, edge.gov + 1);
            dep_span = Span::new(edge.dep, edge.dep + 1);
        }
        triples.push(RelationTriple {
            gov_span,
            rel: edge.rel.clone(),
            dep_span,
            gov_head: edge.gov,
            dep_head: edge.dep,
            gov_surface: gov_tok.surface.to_lowercase(),
            dep_surface: dep_tok.surface.to_lowercase(),
        });
    }
    triples.sort_by(|a, b| (a.gov_head, a.dep_head).cmp(&(b.gov_head, b.dep_head)));
    triples
}

/// True iff some text contains an edge with the same relation label whose
/// governor and dependent surfaces each match the triple's head surface,
/// as the same normalized form or through a synonym group.
pub fn relation_matches(
    triple: &RelationTriple,
    against: &[&AnnotatedText],
    synonyms: &SynonymLexicon,
) -> bool {
    for text in against {
        for edge in &text.deps {
            if edge.rel != triple.rel {
                continue;
            }
            let gov_surface = &text.tokens[edge.gov].surface;
            let dep_surface = &text.tokens[edge.dep].surface;
            if synonyms.same_or_synonym(gov_surface, &triple.gov_surface)
                && synonyms.same_or_synonym(dep_surface, &triple.dep_surface)
            {
                return true;
            }
        }
    }
    false
}

/// Builds a free-standing triple over an arbitrary token list, used when
/// checking generated candidates. Heads index into `tokens`.
pub fn triple_from_heads(
    tokens: &[crate::corpus::Token],
    gov_span: Span,
    dep_span: Span,
    gov_head: usize,
    dep_head: usize,
    rel: &str,
) -> RelationTriple {
    RelationTriple {
        gov_span,
        rel: rel.to_string(),
        dep_span,
        gov_head,
        dep_head,
        gov_surface: tokens[gov_head].surface.to_lowercase(),
        dep_surface: tokens[dep_head].surface.to_lowercase(),
    }
}

/// Content-word gate used by heuristic head selection over generated text.
pub fn is_content_tag(upos: Upos) -> bool {
    upos.is_content_word()
}
