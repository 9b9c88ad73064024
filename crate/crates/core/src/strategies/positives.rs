//! Positive-sample construction: the reference itself, plus a paraphrase
//! that survives the entity-novelty and quote-consistency filters.

use std::collections::BTreeSet;

use crate::corpus::{CandidateSample, Document, SampleLabel, Span, Strategy, Token};
use crate::genkit::Paraphraser;
use crate::linguo::{match_entities, Gazetteer};

/// True when `needle` occurs as a contiguous surface run inside `haystack`.
fn contains_run(haystack: &[Token], needle: &[Token]) -> bool {
    if needle.is_empty() {
        return true;
    }
    if haystack.len() < needle.len() {
        return false;
    }
    haystack.windows(needle.len()).any(|w| {
        w.iter()
            .zip(needle)
            .all(|(a, b)| a.surface == b.surface)
    })
}

/// The paraphrase acceptance filter:
/// (a) it introduces no gazetteer mention the reference does not already
///     contain, and
/// (b) every reference quote span's token run appears verbatim in it.
pub fn paraphrase_is_acceptable(
    doc: &Document,
    candidate: &[Token],
    gazetteer: &Gazetteer,
) -> bool {
    // mentions already present in the reference, by annotation or by match
    let mut known: BTreeSet<String> = doc
        .reference
        .entities
        .iter()
        .map(|e| e.surface.clone())
        .collect();
    for mention in match_entities(&doc.reference.tokens, gazetteer) {
        known.insert(mention.surface);
    }
    let introduces_entity = match_entities(candidate, gazetteer)
        .iter()
        .any(|m| !known.contains(&m.surface));
    if introduces_entity {
        return false;
    }

    for quote in &doc.reference.quotes {
        let quoted = &doc.reference.tokens[quote.start..quote.end];
        if !contains_run(candidate, quoted) {
            return false;
        }
    }
    true
}

/// Builds the positive set: always the reference; the paraphrase is added
/// only when it passes [`paraphrase_is_acceptable`].
pub fn build_positive(
    doc: &Document,
    paraphraser: &dyn Paraphraser,
    gazetteer: &Gazetteer,
) -> Vec<CandidateSample> {
    let mut positives = vec![CandidateSample {
        doc_id: doc.id.clone(),
        tokens: doc.reference.tokens.clone(),
        label: SampleLabel::Positive,
        strategy: Strategy::Reference,
        edited_spans: vec![],
        gen_probs: None,
    }];

    let candidate = paraphraser.paraphrase(&doc.reference.tokens);
    let candidate: Vec<Token> = candidate
        .into_iter()
        .enumerate()
        .map(|(i, t)| Token::new(t.surface, t.upos, i))
        .collect();
    if paraphrase_is_acceptable(doc, &candidate, gazetteer) {
        let edited_spans: Vec<Span> = candidate
            .iter()
            .zip(&doc.reference.tokens)
            .enumerate()
            .filter(|(_, (c, r))| c.surface != r.surface)
            .map(|(i, _)| Span::new(i, i + 1))
            .collect();
        positives.push(CandidateSample {
            doc_id: doc.id.clone(),
            tokens: candidate,
            label: SampleLabel::Positive,
            strategy: Strategy::Backtranslate,
            edited_spans,
            gen_probs: None,
        });
    }
    positives
}
