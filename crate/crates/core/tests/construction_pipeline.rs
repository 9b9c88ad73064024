//! End-to-end construction over the bundled corpus: every strategy yields
//! samples, every kept sample satisfies its filter, and repeated runs are
//! identical.

use std::collections::BTreeMap;

use cliff_core::corpus::{CandidateSample, Strategy};
use cliff_core::genkit::{NGramGenerator, NGramModel, SynonymParaphraser};
use cliff_core::linguo::{build_gazetteer, PosLexicon, SynonymLexicon};
use cliff_core::objectives::{combined_loss, LossConfig, LossMode, PoolingSpec};
use cliff_core::strategies::{
    assemble_batch, attach_model_probs, build_positive, construct_negatives, doc_rng,
    synthesize_reps, RngStream, StrategyConfig, StrategyContext,
};
use cliff_core::synth::{synthetic_beams, synthetic_corpus, SYNONYMS_TSV};

const SEED: u64 = 7;

fn run_all() -> (Vec<CandidateSample>, Vec<CandidateSample>) {
    let corpus = synthetic_corpus();
    let beams = synthetic_beams();
    let config = StrategyConfig::default();
    let gazetteer = build_gazetteer(&corpus);
    let synonyms = SynonymLexicon::from_tsv(SYNONYMS_TSV).unwrap();
    let pos_lexicon = PosLexicon::build(&corpus);
    let model = NGramModel::train(&corpus, 3, 0.1).unwrap();
    let generator = NGramGenerator::new(&model, config.nucleus_p, config.fill_len_max);
    let ctx = StrategyContext {
        config: &config,
        gazetteer: &gazetteer,
        synonyms: &synonyms,
        pos_lexicon: &pos_lexicon,
    };
    let paraphraser = SynonymParaphraser::new(&synonyms);

    let mut negatives = Vec::new();
    let mut positives = Vec::new();
    for doc in &corpus.docs {
        let doc_beams = beams.iter().find(|b| b.doc_id == doc.id);
        let samples = construct_negatives(
            doc,
            &Strategy::NEGATIVE,
            &ctx,
            &generator,
            &generator,
            doc_beams,
            SEED,
        )
        .unwrap();
        negatives.extend(samples);
        positives.extend(build_positive(doc, &paraphraser, &gazetteer));
    }
    (positives, negatives)
}

#[test]
fn every_strategy_produces_samples() {
    let (positives, negatives) = run_all();
    let mut by_strategy: BTreeMap<Strategy, usize> = BTreeMap::new();
    for s in &negatives {
        *by_strategy.entry(s.strategy).or_insert(0) += 1;
    }
    for strategy in Strategy::NEGATIVE {
        let count = by_strategy.get(&strategy).copied().unwrap_or(0);
        assert!(count > 0, "{strategy} produced no samples");
    }
    let references = positives.iter().filter(|p| p.strategy == Strategy::Reference).count();
    let backtranslations =
        positives.iter().filter(|p| p.strategy == Strategy::Backtranslate).count();
    assert_eq!(references, 20);
    assert!(backtranslations > 0, "no paraphrase survived the filters");
    assert!(backtranslations < 20, "quote filter never fired");
}

#[test]
fn construction_is_deterministic() {
    let (p1, n1) = run_all();
    let (p2, n2) = run_all();
    assert_eq!(p1, p2);
    assert_eq!(n1, n2);
}

#[test]
fn swap_samples_differ_in_exactly_one_region() {
    let corpus = synthetic_corpus();
    let (_, negatives) = run_all();
    for sample in negatives.iter().filter(|s| s.strategy == Strategy::SwapEnt) {
        let doc = corpus.get(&sample.doc_id).unwrap();
        let reference: Vec<&str> =
            doc.reference.tokens.iter().map(|t| t.surface.as_str()).collect();
        let candidate: Vec<&str> = sample.tokens.iter().map(|t| t.surface.as_str()).collect();

        // strip the longest common prefix and suffix; what remains must be
        // a single contiguous edit
        let mut prefix = 0;
        while prefix < reference.len().min(candidate.len())
            && reference[prefix] == candidate[prefix]
        {
            prefix += 1;
        }
        let mut suffix = 0;
        while suffix < reference.len().min(candidate.len()) - prefix
            && reference[reference.len() - 1 - suffix] == candidate[candidate.len() - 1 - suffix]
        {
            suffix += 1;
        }
        let edited = &sample.edited_spans[0];
        assert!(edited.start >= prefix || edited.end <= candidate.len() - suffix || prefix == edited.start,
            "edit region mismatch in {}", sample.doc_id);
        let replaced_surface: String = candidate[edited.start..edited.end].join(" ").to_lowercase();
        let original_span_len = reference.len() - candidate.len() + edited.len();
        let original_surface: String = reference
            [edited.start..edited.start + original_span_len]
            .join(" ")
            .to_lowercase();
        assert_ne!(replaced_surface, original_surface);

        // inserted surface is a source entity, same type as the original
        let original_type = doc
            .reference
            .entities
            .iter()
            .find(|e| e.span.start == edited.start)
            .map(|e| e.etype.clone())
            .expect("edited span must start at a reference entity");
        assert!(doc.source.entities.iter().any(|e| {
            e.surface == replaced_surface && e.etype == original_type
        }));
    }
}

#[test]
fn batches_feed_both_loss_modes() {
    let corpus = synthetic_corpus();
    let (positives, negatives) = run_all();
    let config = StrategyConfig::default();
    let gazetteer = build_gazetteer(&corpus);
    let model = NGramModel::train(&corpus, 3, 0.1).unwrap();

    let mut totals = Vec::new();
    for doc in &corpus.docs {
        let doc_pos: Vec<CandidateSample> =
            positives.iter().filter(|s| s.doc_id == doc.id).cloned().collect();
        let doc_neg: Vec<CandidateSample> =
            negatives.iter().filter(|s| s.doc_id == doc.id).cloned().collect();
        let mut rng = doc_rng(SEED, &doc.id, RngStream::BatchAssembly);
        let mut batch = assemble_batch(doc, &doc_pos, &doc_neg, &config, &mut rng).unwrap();
        assert!(batch.positives.len() >= 2);
        assert!(batch.negatives.len() <= config.negatives_per_batch);

        let mut reps_rng = doc_rng(SEED, &doc.id, RngStream::RepSynthesis);
        synthesize_reps(&mut batch, 8, &gazetteer, &mut reps_rng).unwrap();
        attach_model_probs(&mut batch, &model);

        let cliff = combined_loss(
            &batch,
            &LossConfig::default(),
            &PoolingSpec::default(),
            None,
            LossMode::Cliff,
        )
        .unwrap();
        assert!(cliff.total.is_finite());
        assert!(cliff.cl.unwrap() >= 0.0);
        assert!(cliff.ce > 0.0);

        let ul = combined_loss(
            &batch,
            &LossConfig::default(),
            &PoolingSpec::default(),
            None,
            LossMode::Unlikelihood,
        )
        .unwrap();
        assert!(ul.ul.unwrap() > 0.0);
        totals.push(cliff.total);
    }
    assert_eq!(totals.len(), 20);
}
