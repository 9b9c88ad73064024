//! The six negative-sample construction strategies.
//!
//! Reference-editing strategies (entity swap, mask-and-fill, regeneration)
//! anchor on reference entities or relation triples; the system-generation
//! strategy selects low-confidence beams. Every strategy is deterministic
//! under its per-document random stream.

use std::collections::BTreeSet;

use crate::corpus::{
    BeamSet, CandidateSample, Document, SampleLabel, Span, Strategy, Token, Upos,
};
use crate::genkit::{GenerationStep, Infiller, Regenerator, RngState};
use crate::linguo::{
    detect_confidence_spans, extract_relations, match_entities, relation_matches,
    triple_from_heads, PosLexicon, RelationTriple,
};
use crate::Result;

use super::StrategyContext;

/// Extra continuation budget past the reference length for regeneration.
const REGEN_EXTRA_TOKENS: usize = 10;

fn reindex(tokens: Vec<Token>) -> Vec<Token> {
    tokens
        .into_iter()
        .enumerate()
        .map(|(i, t)| Token::new(t.surface, t.upos, i))
        .collect()
}

fn surfaces_of(tokens: &[Token]) -> Vec<String> {
    tokens.iter().map(|t| t.surface.clone()).collect()
}

fn steps_to_tokens(steps: &[GenerationStep], lexicon: &PosLexicon) -> Vec<Token> {
    steps
        .iter()
        .map(|s| Token::new(s.token.clone(), lexicon.tag_for(&s.token), 0))
        .collect()
}

/// Entity surfaces annotated anywhere in the document's source or reference.
fn known_entity_surfaces(doc: &Document) -> BTreeSet<String> {
    doc.source
        .entities
        .iter()
        .chain(doc.reference.entities.iter())
        .map(|e| e.surface.clone())
        .collect()
}

/// True when the candidate contains a gazetteer mention whose surface is
/// outside the known set.
fn introduces_new_entity(
    tokens: &[Token],
    ctx: &StrategyContext<'_>,
    known: &BTreeSet<String>,
) -> bool {
    match_entities(tokens, ctx.gazetteer)
        .iter()
        .any(|m| !known.contains(&m.surface))
}

/// Drops exact duplicates within one (document, strategy) group, keyed on
/// token surfaces plus edited spans, keeping the first by generation order.
pub fn dedup_samples(samples: Vec<CandidateSample>) -> Vec<CandidateSample> {
    let mut seen = BTreeSet::new();
    samples
        .into_iter()
        .filter(|s| seen.insert((surfaces_of(&s.tokens), s.edited_spans.clone())))
        .collect()
}

/// Runs the requested strategies for one document in the order given,
/// concatenating their sample sets and applying the per-document cap.
/// Each strategy draws from its own stream of the document's derived seed.
pub fn construct_negatives(
    doc: &Document,
    strategies: &[Strategy],
    ctx: &StrategyContext<'_>,
    infiller: &dyn Infiller,
    regenerator: &dyn Regenerator,
    beams: Option<&BeamSet>,
    global_seed: u64,
) -> Result<Vec<CandidateSample>> {
    use super::{doc_rng, RngStream};
    let mut all = Vec::new();
    for strategy in strategies {
        let mut samples = match strategy {
            Strategy::SwapEnt => {
                swap_ent(doc, &mut doc_rng(global_seed, &doc.id, RngStream::SwapEnt))
            }
            Strategy::MaskEnt => {
                let mut rng = doc_rng(global_seed, &doc.id, RngStream::MaskEnt);
                mask_ent(doc, infiller, ctx, &mut rng)?
            }
            Strategy::MaskRel => {
                let mut rng = doc_rng(global_seed, &doc.id, RngStream::MaskRel);
                mask_rel(doc, infiller, ctx, &mut rng)?
            }
            Strategy::RegenEnt => {
                let mut rng = doc_rng(global_seed, &doc.id, RngStream::RegenEnt);
                regen_ent(doc, regenerator, ctx, &mut rng)?
            }
            Strategy::RegenRel => {
                let mut rng = doc_rng(global_seed, &doc.id, RngStream::RegenRel);
                regen_rel(doc, regenerator, ctx, &mut rng)?
            }
            Strategy::SysLowcon => beams
                .map(|b| sys_lowcon(b, ctx.config.threshold, ctx.pos_lexicon))
                .unwrap_or_default(),
            other => {
                return Err(crate::Error::Invalid(format!(
                    "'{other}' is not a negative-construction strategy"
                )))
            }
        };
        all.append(&mut samples);
    }
    if let Some(cap) = ctx.config.max_negatives_per_doc {
        all.truncate(cap);
    }
    Ok(all)
}

/// Replaces each reference entity with a randomly chosen source entity of
/// the same type and a different surface. One sample per swappable entity.
pub fn swap_ent(doc: &Document, rng: &mut RngState) -> Vec<CandidateSample> {
    let mut samples = Vec::new();
    for ent in &doc.reference.entities {
        let candidates: Vec<&crate::corpus::EntityMention> = doc
            .source
            .entities
            .iter()
            .filter(|s| s.etype == ent.etype && s.surface != ent.surface)
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let chosen = candidates[rng.next_index(candidates.len())];
        let replacement: Vec<Token> =
            doc.source.tokens[chosen.span.start..chosen.span.end].to_vec();

        let mut tokens = Vec::with_capacity(
            doc.reference.tokens.len() - ent.span.len() + replacement.len(),
        );
        tokens.extend_from_slice(&doc.reference.tokens[..ent.span.start]);
        tokens.extend_from_slice(&replacement);
        tokens.extend_from_slice(&doc.reference.tokens[ent.span.end..]);

        let edited = Span::new(ent.span.start, ent.span.start + replacement.len());
        samples.push(CandidateSample {
            doc_id: doc.id.clone(),
            tokens: reindex(tokens),
            label: SampleLabel::Negative,
            strategy: Strategy::SwapEnt,
            edited_spans: vec![edited],
            gen_probs: None,
        });
    }
    dedup_samples(samples)
}

/// Masks each reference entity and infills it, keeping candidates that
/// introduce an entity absent from both source and reference.
pub fn mask_ent(
    doc: &Document,
    infiller: &dyn Infiller,
    ctx: &StrategyContext<'_>,
    rng: &mut RngState,
) -> Result<Vec<CandidateSample>> {
    let known = known_entity_surfaces(doc);
    let mut samples = Vec::new();
    for ent in &doc.reference.entities {
        let left = surfaces_of(&doc.reference.tokens[..ent.span.start]);
        let right = surfaces_of(&doc.reference.tokens[ent.span.end..]);
        for _ in 0..ctx.config.samples_per_anchor {
            let fill = infiller.fill(&left, &right, rng)?;
            if fill.is_empty() {
                continue;
            }
            let fill_tokens = steps_to_tokens(&fill, ctx.pos_lexicon);
            let mut tokens = doc.reference.tokens[..ent.span.start].to_vec();
            tokens.extend(fill_tokens);
            tokens.extend_from_slice(&doc.reference.tokens[ent.span.end..]);
            let tokens = reindex(tokens);
            if !introduces_new_entity(&tokens, ctx, &known) {
                continue;
            }
            let filled = Span::new(ent.span.start, ent.span.start + fill.len());
            samples.push(CandidateSample {
                doc_id: doc.id.clone(),
                tokens,
                label: SampleLabel::Negative,
                strategy: Strategy::MaskEnt,
                edited_spans: vec![filled],
                gen_probs: None,
            });
        }
    }
    Ok(dedup_samples(samples))
}

/// The governor/dependent spans of a triple in left-to-right order.
fn ordered_spans(triple: &RelationTriple) -> (Span, Span, bool) {
    if triple.gov_span.start <= triple.dep_span.start {
        (triple.gov_span, triple.dep_span, true)
    } else {
        (triple.dep_span, triple.gov_span, false)
    }
}

/// Masks both endpoint spans of each reference relation and infills them
/// left to right, keeping candidates whose filled triple matches no
/// relation in the source or the reference.
pub fn mask_rel(
    doc: &Document,
    infiller: &dyn Infiller,
    ctx: &StrategyContext<'_>,
    rng: &mut RngState,
) -> Result<Vec<CandidateSample>> {
    let triples = extract_relations(&doc.reference);
    let mut samples = Vec::new();
    for triple in &triples {
        let (first, second, gov_first) = ordered_spans(triple);
        let before = &doc.reference.tokens[..first.start];
        let between = &doc.reference.tokens[first.end..second.start];
        let after = &doc.reference.tokens[second.end..];

        for _ in 0..ctx.config.samples_per_anchor {
            let left_a = surfaces_of(before);
            let right_a: Vec<String> = surfaces_of(between)
                .into_iter()
                .chain(surfaces_of(after))
                .collect();
            let fill_a = infiller.fill(&left_a, &right_a, rng)?;
            if fill_a.is_empty() {
                continue;
            }

            let mut left_b = left_a.clone();
            left_b.extend(fill_a.iter().map(|s| s.token.clone()));
            left_b.extend(surfaces_of(between));
            let fill_b = infiller.fill(&left_b, &surfaces_of(after), rng)?;
            if fill_b.is_empty() {
                continue;
            }

            let mut tokens = before.to_vec();
            tokens.extend(steps_to_tokens(&fill_a, ctx.pos_lexicon));
            tokens.extend_from_slice(between);
            tokens.extend(steps_to_tokens(&fill_b, ctx.pos_lexicon));
            tokens.extend_from_slice(after);
            let tokens = reindex(tokens);

            let span_a = Span::new(first.start, first.start + fill_a.len());
            let gap = second.start - first.end;
            let b_start = span_a.end + gap;
            let span_b = Span::new(b_start, b_start + fill_b.len());

            // candidate triple: filled spans, heads at each span's last token
            let (gov_span, dep_span) = if gov_first { (span_a, span_b) } else { (span_b, span_a) };
            let candidate = triple_from_heads(
                &tokens,
                gov_span,
                dep_span,
                gov_span.end - 1,
                dep_span.end - 1,
                &triple.rel,
            );
            if relation_matches(&candidate, &[&doc.source, &doc.reference], ctx.synonyms) {
                continue;
            }
            samples.push(CandidateSample {
                doc_id: doc.id.clone(),
                tokens,
                label: SampleLabel::Negative,
                strategy: Strategy::MaskRel,
                edited_spans: vec![span_a, span_b],
                gen_probs: None,
            });
        }
    }
    Ok(dedup_samples(samples))
}

/// Regenerates the reference from the text before each entity, keeping
/// candidates that introduce a new entity. The output always begins with
/// the prompt verbatim.
pub fn regen_ent(
    doc: &Document,
    regenerator: &dyn Regenerator,
    ctx: &StrategyContext<'_>,
    rng: &mut RngState,
) -> Result<Vec<CandidateSample>> {
    let known = known_entity_surfaces(doc);
    let max_len = doc.reference.tokens.len() + REGEN_EXTRA_TOKENS;
    let mut samples = Vec::new();
    for ent in &doc.reference.entities {
        let prompt = &doc.reference.tokens[..ent.span.start];
        let prompt_surfaces = surfaces_of(prompt);
        for _ in 0..ctx.config.samples_per_anchor {
            let continuation = regenerator.continue_from(&prompt_surfaces, max_len, rng)?;
            if continuation.is_empty() {
                continue;
            }
            let mut tokens = prompt.to_vec();
            tokens.extend(steps_to_tokens(&continuation, ctx.pos_lexicon));
            let tokens = reindex(tokens);
            if !introduces_new_entity(&tokens, ctx, &known) {
                continue;
            }
            let edited = Span::new(prompt.len(), tokens.len());
            samples.push(CandidateSample {
                doc_id: doc.id.clone(),
                tokens,
                label: SampleLabel::Negative,
                strategy: Strategy::RegenEnt,
                edited_spans: vec![edited],
                gen_probs: None,
            });
        }
    }
    Ok(dedup_samples(samples))
}

/// Heuristic endpoint heads for a regenerated continuation: the last token
/// of each gazetteer mention first, then content-word tokens, in order.
/// Returns absolute indices into the candidate token list.
pub fn continuation_heads(
    tokens: &[Token],
    prompt_len: usize,
    ctx: &StrategyContext<'_>,
) -> Vec<usize> {
    let continuation = &tokens[prompt_len..];
    let mut heads: Vec<usize> = Vec::new();
    for mention in match_entities(continuation, ctx.gazetteer) {
        heads.push(prompt_len + mention.span.end - 1);
    }
    for (i, tok) in continuation.iter().enumerate() {
        let abs = prompt_len + i;
        if tok.upos.is_content_word() && !heads.contains(&abs) {
            heads.push(abs);
        }
    }
    heads
}

/// Builds the candidate triple a regenerated sample introduces, if its
/// continuation yields at least two endpoint heads.
pub fn regen_candidate_triple(
    tokens: &[Token],
    prompt_len: usize,
    original: &RelationTriple,
    ctx: &StrategyContext<'_>,
) -> Option<RelationTriple> {
    let heads = continuation_heads(tokens, prompt_len, ctx);
    if heads.len() < 2 {
        return None;
    }
    let gov_first = original.gov_span.start <= original.dep_span.start;
    let (gov_head, dep_head) = if gov_first {
        (heads[0], heads[1])
    } else {
        (heads[1], heads[0])
    };
    Some(triple_from_heads(
        tokens,
        Span::new(gov_head, gov_head + 1),
        Span::new(dep_head, dep_head + 1),
        gov_head,
        dep_head,
        &original.rel,
    ))
}

/// Regenerates from the text before the earlier relation span, keeping
/// candidates whose realigned triple matches no source or reference
/// relation.
pub fn regen_rel(
    doc: &Document,
    regenerator: &dyn Regenerator,
    ctx: &StrategyContext<'_>,
    rng: &mut RngState,
) -> Result<Vec<CandidateSample>> {
    let triples = extract_relations(&doc.reference);
    let max_len = doc.reference.tokens.len() + REGEN_EXTRA_TOKENS;
    let mut samples = Vec::new();
    for triple in &triples {
        let boundary = triple.gov_span.start.min(triple.dep_span.start);
        let prompt = &doc.reference.tokens[..boundary];
        let prompt_surfaces = surfaces_of(prompt);
        for _ in 0..ctx.config.samples_per_anchor {
            let continuation = regenerator.continue_from(&prompt_surfaces, max_len, rng)?;
            if continuation.is_empty() {
                continue;
            }
            let mut tokens = prompt.to_vec();
            tokens.extend(steps_to_tokens(&continuation, ctx.pos_lexicon));
            let tokens = reindex(tokens);

            let Some(candidate) = regen_candidate_triple(&tokens, boundary, triple, ctx) else {
                continue;
            };
            if relation_matches(&candidate, &[&doc.source, &doc.reference], ctx.synonyms) {
                continue;
            }
            let edited = Span::new(boundary, tokens.len());
            samples.push(CandidateSample {
                doc_id: doc.id.clone(),
                tokens,
                label: SampleLabel::Negative,
                strategy: Strategy::RegenRel,
                edited_spans: vec![edited],
                gen_probs: None,
            });
        }
    }
    Ok(dedup_samples(samples))
}

/// Tags any untagged beam tokens through the lexicon, leaving native tags
/// in place.
fn tag_beam_tokens(tokens: &[Token], lexicon: &PosLexicon) -> Vec<Token> {
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let upos = if t.upos == Upos::X { lexicon.tag_for(&t.surface) } else { t.upos };
            Token::new(t.surface.clone(), upos, i)
        })
        .collect()
}

/// Keeps each beam whose proper-noun or number spans include one whose
/// first-token probability falls below the threshold.
pub fn sys_lowcon(
    beams: &BeamSet,
    threshold: f64,
    pos_lexicon: &PosLexicon,
) -> Vec<CandidateSample> {
    let mut samples = Vec::new();
    for beam in &beams.beams {
        let tokens = tag_beam_tokens(&beam.tokens, pos_lexicon);
        let spans = detect_confidence_spans(&tokens);
        let low_confidence = spans
            .iter()
            .any(|(span, _)| beam.probs[span.start] < threshold);
        if !low_confidence {
            continue;
        }
        samples.push(CandidateSample {
            doc_id: beams.doc_id.clone(),
            tokens,
            label: SampleLabel::Negative,
            strategy: Strategy::SysLowcon,
            edited_spans: vec![],
            gen_probs: Some(beam.probs.clone()),
        });
    }
    dedup_samples(samples)
}
