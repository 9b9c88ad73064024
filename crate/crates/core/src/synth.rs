//! Bundled deterministic demo data: twenty small documents with known
//! entities, relations, chunks, and quotes, plus matching beam dumps,
//! annotated decoder outputs, and a synonym lexicon.
//!
//! Everything here is a fixture. Content derives only from document
//! indices and fixed seeds, so repeated builds are identical.

use crate::corpus::{
    concat_sentences, detect_quotes, write_conllu_document, AnnotatedOutput, AnnotatedText, Beam,
    BeamSet, Corpus, DepEdge, Document, EntityMention, ErrorKind, ErrorSpan, Span, Token, Upos,
};
use crate::genkit::{hash64, RngState};

const PERSONS: [(&str, &str); 6] = [
    ("Maria", "Santos"),
    ("James", "Okafor"),
    ("Li", "Wei"),
    ("Anna", "Kovacs"),
    ("Omar", "Haddad"),
    ("Elena", "Petrova"),
];

const PLACES: [&str; 6] = [
    "Eastfield", "Northam", "Westbrook", "Southmere", "Harborton", "Millbrook",
];

const ORGS: [(&str, &str); 4] = [
    ("Riverside", "Trust"),
    ("Harbor", "Council"),
    ("Valley", "Museum"),
    ("Summit", "Clinic"),
];

const MONTHS: [&str; 4] = ["June", "March", "October", "January"];

const ANIMALS: [&str; 5] = ["owls", "seals", "foxes", "badgers", "herons"];

const ADJECTIVES: [&str; 4] = ["rare", "injured", "young", "timid"];

/// Fixed master seed for fixture probabilities; not configurable.
const FIXTURE_SEED: u64 = 0xC11F_F0D5;

pub const DOC_COUNT: usize = 20;

/// Tab-separated synonym sets used by the bundled paraphraser and the
/// relation-matching tests.
pub const SYNONYMS_TSV: &str = "rare\tscarce\n\
injured\thurt\n\
young\tjuvenile\n\
rescued\tsaved\n\
said\tstated\n\
found\tdiscovered\n";

struct SentenceDraft {
    tokens: Vec<Token>,
    entities: Vec<EntityMention>,
    deps: Vec<DepEdge>,
    chunks: Vec<Span>,
}

impl SentenceDraft {
    fn new() -> Self {
        SentenceDraft { tokens: vec![], entities: vec![], deps: vec![], chunks: vec![] }
    }

    fn word(&mut self, surface: &str, upos: Upos) -> usize {
        let index = self.tokens.len();
        self.tokens.push(Token::new(surface, upos, index));
        index
    }

    fn entity(&mut self, start: usize, end: usize, etype: &str) {
        let surface = crate::corpus::normalized_surface(&self.tokens[start..end]);
        self.entities.push(EntityMention { span: Span::new(start, end), etype: etype.into(), surface });
    }

    fn chunk(&mut self, start: usize, end: usize) {
        self.chunks.push(Span::new(start, end));
    }

    fn dep(&mut self, gov: usize, rel: &str, dep: usize) {
        self.deps.push(DepEdge { gov, rel: rel.into(), dep });
    }

    fn build(mut self) -> AnnotatedText {
        // match CoNLL-U reading order, where edges appear per dependent
        self.deps.sort_by_key(|e| e.dep);
        let quotes = detect_quotes(&self.tokens);
        AnnotatedText {
            tokens: self.tokens,
            entities: self.entities,
            deps: self.deps,
            np_chunks: self.chunks,
            quotes,
        }
    }
}

struct DocPlan {
    person: (&'static str, &'static str),
    alt_person: (&'static str, &'static str),
    org: (&'static str, &'static str),
    place: &'static str,
    alt_place_1: &'static str,
    alt_place_2: &'static str,
    month: &'static str,
    alt_month: &'static str,
    animal: &'static str,
    adjective: &'static str,
    count: String,
}

fn plan(i: usize) -> DocPlan {
    DocPlan {
        person: PERSONS[i % 6],
        alt_person: PERSONS[(i + 3) % 6],
        org: ORGS[i % 4],
        place: PLACES[i % 6],
        alt_place_1: PLACES[(i + 1) % 6],
        alt_place_2: PLACES[(i + 2) % 6],
        month: MONTHS[i % 4],
        alt_month: MONTHS[(i + 1) % 4],
        animal: ANIMALS[i % 5],
        adjective: ADJECTIVES[i % 4],
        count: (5 + i).to_string(),
    }
}

/// `Volunteers from the {Org} rescued {count} {adj} {animal} near {Place}
/// in {Month} .`
fn source_sentence_one(p: &DocPlan) -> AnnotatedText {
    let mut s = SentenceDraft::new();
    let volunteers = s.word("Volunteers", Upos::Noun);
    s.word("from", Upos::Adp);
    let the = s.word("the", Upos::Det);
    s.word(p.org.0, Upos::Propn);
    let org_end = s.word(p.org.1, Upos::Propn);
    let rescued = s.word("rescued", Upos::Verb);
    let count = s.word(&p.count, Upos::Num);
    let adj = s.word(p.adjective, Upos::Adj);
    let animal = s.word(p.animal, Upos::Noun);
    let near = s.word("near", Upos::Adp);
    let place = s.word(p.place, Upos::Propn);
    s.word("in", Upos::Adp);
    let month = s.word(p.month, Upos::Propn);
    s.word(".", Upos::Punct);

    s.entity(org_end - 1, org_end + 1, "ORG");
    s.entity(place, place + 1, "GPE");
    s.entity(month, month + 1, "DATE");
    s.chunk(the, org_end + 1);
    s.chunk(count, animal + 1);
    s.chunk(near, place + 1);
    s.dep(rescued, "nsubj", volunteers);
    s.dep(volunteers, "nmod", org_end);
    s.dep(rescued, "obj", animal);
    s.dep(animal, "nummod", count);
    s.dep(animal, "amod", adj);
    s.dep(rescued, "obl", place);
    s.dep(rescued, "obl", month);
    s.build()
}

/// `{AltPerson} said more {animal} were seen in {AltPlace1} and
/// {AltPlace2} during {AltMonth} .`
fn source_sentence_two(p: &DocPlan) -> AnnotatedText {
    let mut s = SentenceDraft::new();
    let first = s.word(p.alt_person.0, Upos::Propn);
    let last = s.word(p.alt_person.1, Upos::Propn);
    let said = s.word("said", Upos::Verb);
    let more = s.word("more", Upos::Adj);
    let animal = s.word(p.animal, Upos::Noun);
    s.word("were", Upos::Aux);
    let seen = s.word("seen", Upos::Verb);
    let in_ = s.word("in", Upos::Adp);
    let alt1 = s.word(p.alt_place_1, Upos::Propn);
    s.word("and", Upos::Cconj);
    let alt2 = s.word(p.alt_place_2, Upos::Propn);
    s.word("during", Upos::Adp);
    let alt_month = s.word(p.alt_month, Upos::Propn);
    s.word(".", Upos::Punct);

    s.entity(first, last + 1, "PERSON");
    s.entity(alt1, alt1 + 1, "GPE");
    s.entity(alt2, alt2 + 1, "GPE");
    s.entity(alt_month, alt_month + 1, "DATE");
    s.chunk(first, last + 1);
    s.chunk(in_, alt1 + 1);
    s.dep(said, "nsubj", last);
    s.dep(said, "ccomp", seen);
    s.dep(seen, "nsubj", animal);
    s.dep(animal, "amod", more);
    s.dep(seen, "obl", alt1);
    s.dep(alt1, "conj", alt2);
    s.dep(seen, "obl", alt_month);
    s.build()
}

/// `The {Org} said {count} {animal} were rescued near {Place} in {Month} .`
fn reference_plain(p: &DocPlan) -> AnnotatedText {
    let mut s = SentenceDraft::new();
    let the = s.word("The", Upos::Det);
    s.word(p.org.0, Upos::Propn);
    let org_end = s.word(p.org.1, Upos::Propn);
    let said = s.word("said", Upos::Verb);
    let count = s.word(&p.count, Upos::Num);
    let animal = s.word(p.animal, Upos::Noun);
    s.word("were", Upos::Aux);
    let rescued = s.word("rescued", Upos::Verb);
    let near = s.word("near", Upos::Adp);
    let place = s.word(p.place, Upos::Propn);
    s.word("in", Upos::Adp);
    let month = s.word(p.month, Upos::Propn);
    s.word(".", Upos::Punct);

    s.entity(org_end - 1, org_end + 1, "ORG");
    s.entity(place, place + 1, "GPE");
    s.entity(month, month + 1, "DATE");
    s.chunk(the, org_end + 1);
    s.chunk(count, animal + 1);
    s.chunk(near, place + 1);
    s.dep(said, "nsubj", org_end);
    s.dep(said, "ccomp", rescued);
    s.dep(rescued, "nsubj", animal);
    s.dep(animal, "nummod", count);
    s.dep(rescued, "obl", place);
    s.dep(rescued, "obl", month);
    s.build()
}

/// `{Person} said the {animal} in {Place} were " very {adj} " .`
fn reference_quoted(p: &DocPlan) -> AnnotatedText {
    let mut s = SentenceDraft::new();
    let first = s.word(p.person.0, Upos::Propn);
    let last = s.word(p.person.1, Upos::Propn);
    let said = s.word("said", Upos::Verb);
    let the = s.word("the", Upos::Det);
    let animal = s.word(p.animal, Upos::Noun);
    let in_ = s.word("in", Upos::Adp);
    let place = s.word(p.place, Upos::Propn);
    s.word("were", Upos::Aux);
    s.word("\"", Upos::Punct);
    let very = s.word("very", Upos::Adv);
    let adj = s.word(p.adjective, Upos::Adj);
    s.word("\"", Upos::Punct);
    s.word(".", Upos::Punct);

    s.entity(first, last + 1, "PERSON");
    s.entity(place, place + 1, "GPE");
    s.chunk(first, last + 1);
    s.chunk(the, animal + 1);
    s.chunk(in_, place + 1);
    s.dep(said, "nsubj", last);
    s.dep(said, "ccomp", adj);
    s.dep(adj, "nsubj", animal);
    s.dep(animal, "nmod", place);
    s.dep(adj, "advmod", very);
    s.build()
}

/// `A {adj} {animal_sg} found in {Place} was taken to the {Org} in {Month} .`
fn reference_relocated(p: &DocPlan) -> AnnotatedText {
    let mut s = SentenceDraft::new();
    let a = s.word("A", Upos::Det);
    let adj = s.word(p.adjective, Upos::Adj);
    let animal = s.word(p.animal, Upos::Noun);
    let found = s.word("found", Upos::Verb);
    let in1 = s.word("in", Upos::Adp);
    let place = s.word(p.place, Upos::Propn);
    s.word("was", Upos::Aux);
    let taken = s.word("taken", Upos::Verb);
    s.word("to", Upos::Adp);
    let the = s.word("the", Upos::Det);
    s.word(p.org.0, Upos::Propn);
    let org_end = s.word(p.org.1, Upos::Propn);
    s.word("in", Upos::Adp);
    let month = s.word(p.month, Upos::Propn);
    s.word(".", Upos::Punct);

    s.entity(place, place + 1, "GPE");
    s.entity(org_end - 1, org_end + 1, "ORG");
    s.entity(month, month + 1, "DATE");
    s.chunk(a, animal + 1);
    s.chunk(in1, place + 1);
    s.chunk(the, org_end + 1);
    s.dep(taken, "nsubj", animal);
    s.dep(animal, "amod", adj);
    s.dep(animal, "acl", found);
    s.dep(found, "obl", place);
    s.dep(taken, "obl", org_end);
    s.dep(taken, "obl", month);
    s.build()
}

fn doc_id(i: usize) -> String {
    format!("doc-{i:03}")
}

fn reference_sentences(i: usize, p: &DocPlan) -> Vec<AnnotatedText> {
    match i % 3 {
        0 => vec![reference_plain(p)],
        1 => vec![reference_quoted(p)],
        _ => vec![reference_relocated(p)],
    }
}

fn source_sentences(p: &DocPlan) -> Vec<AnnotatedText> {
    vec![source_sentence_one(p), source_sentence_two(p)]
}

/// The twenty-document demo corpus.
pub fn synthetic_corpus() -> Corpus {
    let docs = (0..DOC_COUNT)
        .map(|i| {
            let p = plan(i);
            Document {
                id: doc_id(i),
                source: concat_sentences(source_sentences(&p)),
                reference: concat_sentences(reference_sentences(i, &p)),
            }
        })
        .collect();
    Corpus::new(docs).expect("fixture ids are unique")
}

/// The demo corpus as a pair of CoNLL-U streams (sources, references).
pub fn synthetic_conllu() -> (String, String) {
    let mut sources = String::new();
    let mut references = String::new();
    for i in 0..DOC_COUNT {
        let p = plan(i);
        write_conllu_document(&doc_id(i), &source_sentences(&p), &mut sources);
        write_conllu_document(&doc_id(i), &reference_sentences(i, &p), &mut references);
    }
    (sources, references)
}

fn fixture_rng(doc: &str, salt: u64) -> RngState {
    RngState::with_stream(hash64(FIXTURE_SEED, doc), salt)
}

/// Replaces the first occurrence of `from` in the surfaces, returning the
/// affected index.
fn replace_surface(tokens: &mut [Token], from: &str, to: &str) -> Option<usize> {
    for tok in tokens.iter_mut() {
        if tok.surface == from {
            tok.surface = to.to_string();
            return Some(tok.index);
        }
    }
    None
}

fn untagged(tokens: &[Token]) -> Vec<Token> {
    tokens
        .iter()
        .map(|t| Token::new(t.surface.clone(), Upos::X, t.index))
        .collect()
}

/// Six final-step beams per document. Beams 0 and 3 hallucinate a place
/// with low first-token confidence, beam 5 garbles the count with low
/// confidence, and the rest stay above any sensible threshold.
pub fn synthetic_beams() -> Vec<BeamSet> {
    let corpus = synthetic_corpus();
    let mut sets = Vec::with_capacity(corpus.len());
    for (i, doc) in corpus.docs.iter().enumerate() {
        let p = plan(i);
        let mut rng = fixture_rng(&doc.id, 1);
        let mut beams = Vec::with_capacity(6);
        for rank in 0..6 {
            let mut tokens = doc.reference.tokens.clone();
            let mut low_index = None;
            match rank {
                0 | 3 => {
                    // hallucinated place from another document's rotation
                    let foreign = PLACES[(i + 3 + rank) % 6];
                    low_index = replace_surface(&mut tokens, p.place, foreign);
                }
                1 | 4 => {
                    // confidently swapped month; never below threshold
                    replace_surface(&mut tokens, p.month, p.alt_month);
                }
                5 => {
                    let garbled = (40 + i).to_string();
                    low_index = replace_surface(&mut tokens, &p.count, &garbled);
                }
                _ => {}
            }
            let probs: Vec<f64> = (0..tokens.len())
                .map(|t| {
                    if Some(t) == low_index {
                        rng.next_range_f64(0.03, 0.18)
                    } else {
                        rng.next_range_f64(0.45, 0.95)
                    }
                })
                .collect();
            beams.push(Beam { tokens: untagged(&tokens), probs, rank });
        }
        sets.push(BeamSet { doc_id: doc.id.clone(), beams });
    }
    sets
}

/// One annotated decoder output per document, rotating through extrinsic,
/// intrinsic, world-knowledge, and clean cases.
pub fn synthetic_outputs() -> Vec<AnnotatedOutput> {
    let corpus = synthetic_corpus();
    let mut outputs = Vec::with_capacity(corpus.len());
    for (i, doc) in corpus.docs.iter().enumerate() {
        let p = plan(i);
        let mut rng = fixture_rng(&doc.id, 2);
        let mut tokens = doc.reference.tokens.clone();
        let mut errors = Vec::new();
        let mut low: Option<(usize, f64, f64)> = None;

        // every reference template contains the place token, so all three
        // error rotations perturb it
        match i % 4 {
            0 => {
                // extrinsic: a place nothing in this document supports
                let foreign = PLACES[(i + 4) % 6];
                let idx = replace_surface(&mut tokens, p.place, foreign)
                    .expect("every template mentions the place");
                errors.push(ErrorSpan { span: Span::new(idx, idx + 1), kind: ErrorKind::Extrinsic });
                low = Some((idx, 0.04, 0.18));
            }
            1 => {
                // intrinsic: place misconstructed from elsewhere in the source
                let idx = replace_surface(&mut tokens, p.place, p.alt_place_1)
                    .expect("every template mentions the place");
                errors.push(ErrorSpan { span: Span::new(idx, idx + 1), kind: ErrorKind::Intrinsic });
                low = Some((idx, 0.15, 0.30));
            }
            2 => {
                // world knowledge: unsupported but verifiable, high confidence
                let foreign = PLACES[(i + 3) % 6];
                let idx = replace_surface(&mut tokens, p.place, foreign)
                    .expect("every template mentions the place");
                errors.push(ErrorSpan {
                    span: Span::new(idx, idx + 1),
                    kind: ErrorKind::WorldKnowledge,
                });
                low = Some((idx, 0.55, 0.90));
            }
            _ => {}
        }

        let probs: Vec<f64> = (0..tokens.len())
            .map(|t| match low {
                Some((idx, lo, hi)) if idx == t => rng.next_range_f64(lo, hi),
                _ => rng.next_range_f64(0.5, 0.95),
            })
            .collect();
        outputs.push(AnnotatedOutput { doc_id: doc.id.clone(), tokens, probs, errors });
    }
    outputs
}
