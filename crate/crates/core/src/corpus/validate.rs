//! Structural validation of documents against the type invariants.
//!
//! Violations are data, not failures: a well-formed call always returns a
//! (possibly empty) list of human-readable findings.

use std::fmt;

use super::types::{AnnotatedText, Document, Span};

/// One invariant violation, locating the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Dotted path such as `reference.entities[2]`.
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn violation(field: impl Into<String>, message: impl Into<String>) -> Violation {
    Violation {
        field: field.into(),
        message: message.into(),
    }
}

fn span_in_range(span: &Span, len: usize) -> bool {
    span.start < span.end && span.end <= len
}

fn check_text(prefix: &str, text: &AnnotatedText, out: &mut Vec<Violation>) {
    let len = text.tokens.len();
    for (i, tok) in text.tokens.iter().enumerate() {
        if tok.surface.is_empty() {
            out.push(violation(format!("{prefix}.tokens[{i}]"), "empty surface"));
        }
        if tok.index != i {
            out.push(violation(
                format!("{prefix}.tokens[{i}]"),
                format!("index {} does not match position {i}", tok.index),
            ));
        }
    }

    for (i, ent) in text.entities.iter().enumerate() {
        let field = format!("{prefix}.entities[{i}]");
        if !span_in_range(&ent.span, len) {
            out.push(violation(
                &field,
                format!("span [{}, {}) out of range (len {len})", ent.span.start, ent.span.end),
            ));
            continue;
        }
        let expected = text.span_surface(&ent.span);
        if ent.surface != expected {
            out.push(violation(
                &field,
                format!("surface '{}' != normalized span text '{expected}'", ent.surface),
            ));
        }
        for (j, other) in text.entities.iter().enumerate().skip(i + 1) {
            if span_in_range(&other.span, len) && ent.span.overlaps(&other.span) {
                out.push(violation(
                    &field,
                    format!("overlaps entities[{j}]"),
                ));
            }
        }
    }

    for (i, edge) in text.deps.iter().enumerate() {
        let field = format!("{prefix}.deps[{i}]");
        if edge.gov == edge.dep {
            out.push(violation(&field, "gov equals dep"));
        }
        if edge.gov >= len || edge.dep >= len {
            out.push(violation(
                &field,
                format!("indices ({}, {}) out of range (len {len})", edge.gov, edge.dep),
            ));
        }
    }

    for (i, chunk) in text.np_chunks.iter().enumerate() {
        let field = format!("{prefix}.np_chunks[{i}]");
        if !span_in_range(chunk, len) {
            out.push(violation(
                &field,
                format!("span [{}, {}) out of range (len {len})", chunk.start, chunk.end),
            ));
            continue;
        }
        for (j, other) in text.np_chunks.iter().enumerate().skip(i + 1) {
            if span_in_range(other, len) && chunk.overlaps(other) {
                out.push(violation(&field, format!("overlaps np_chunks[{j}]")));
            }
        }
    }

    for (i, quote) in text.quotes.iter().enumerate() {
        if !span_in_range(quote, len) {
            out.push(violation(
                format!("{prefix}.quotes[{i}]"),
                format!("span [{}, {}) out of range (len {len})", quote.start, quote.end),
            ));
        }
    }
}

/// Checks every type invariant of a document; empty result means valid.
pub fn validate_document(doc: &Document) -> Vec<Violation> {
    let mut out = Vec::new();
    if doc.id.is_empty() {
        out.push(violation("id", "empty document id"));
    }
    if doc.source.is_empty() {
        out.push(violation("source", "empty text"));
    }
    if doc.reference.is_empty() {
        out.push(violation("reference", "empty text"));
    }
    check_text("source", &doc.source, &mut out);
    check_text("reference", &doc.reference, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::{EntityMention, Token, Upos};

    fn tiny_text() -> AnnotatedText {
        AnnotatedText {
            tokens: vec![
                Token::new("John", Upos::Propn, 0),
                Token::new("runs", Upos::Verb, 1),
            ],
            entities: vec![EntityMention {
                span: Span::new(0, 1),
                etype: "PERSON".into(),
                surface: "john".into(),
            }],
            deps: vec![],
            np_chunks: vec![],
            quotes: vec![],
        }
    }

    fn tiny_doc() -> Document {
        Document {
            id: "d1".into(),
            source: tiny_text(),
            reference: tiny_text(),
        }
    }

    #[test]
    fn well_formed_document_passes() {
        assert!(validate_document(&tiny_doc()).is_empty());
    }

    #[test]
    fn out_of_range_entity_span_is_named() {
        let mut doc = tiny_doc();
        doc.reference.entities[0].span = Span::new(0, 5);
        let v = validate_document(&doc);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "reference.entities[0]");
    }

    #[test]
    fn overlapping_entities_are_flagged() {
        let mut doc = tiny_doc();
        doc.source.entities.push(EntityMention {
            span: Span::new(0, 2),
            etype: "ORG".into(),
            surface: "john runs".into(),
        });
        let v = validate_document(&doc);
        assert!(v.iter().any(|v| v.message.contains("overlaps")));
    }

    #[test]
    fn entity_surface_mismatch_is_flagged() {
        let mut doc = tiny_doc();
        doc.source.entities[0].surface = "John".into();
        let v = validate_document(&doc);
        assert!(v.iter().any(|v| v.message.contains("normalized")));
    }
}
