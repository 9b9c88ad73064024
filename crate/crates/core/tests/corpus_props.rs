//! Property tests for corpus I/O, the CoNLL-U parser, and the greedy
//! entity matcher.

use proptest::prelude::*;

use cliff_core::corpus::{
    normalized_surface, parse_conllu, read_corpus, write_corpus, AnnotatedText, Corpus, Document,
    EntityMention, Span, Token, Upos,
};
use cliff_core::linguo::{build_gazetteer, match_entities, Gazetteer};

fn token_strategy() -> impl Strategy<Value = String> {
    "[a-z]{1,8}"
}

fn text_strategy() -> impl Strategy<Value = AnnotatedText> {
    prop::collection::vec(token_strategy(), 1..12).prop_map(|words| AnnotatedText {
        tokens: words
            .into_iter()
            .enumerate()
            .map(|(i, w)| Token::new(w, Upos::X, i))
            .collect(),
        ..Default::default()
    })
}

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(text_strategy(), 1..6).prop_map(|texts| {
        let docs = texts
            .into_iter()
            .enumerate()
            .map(|(i, text)| Document {
                id: format!("doc-{i}"),
                source: text.clone(),
                reference: text,
            })
            .collect();
        Corpus::new(docs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corpus_write_read_round_trip(corpus in corpus_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        write_corpus(&path, &corpus).unwrap();
        let back = read_corpus(&path).unwrap();
        prop_assert_eq!(back, corpus);
    }

    #[test]
    fn conllu_parser_is_total(input in "\\PC*") {
        // any outcome is fine; panicking is not
        let _ = parse_conllu(&input);
    }

    #[test]
    fn conllu_parser_total_on_tabbed_lines(
        cells in prop::collection::vec("[\\PC--[\\t\\n]]{0,6}", 0..14)
    ) {
        let line = cells.join("\t");
        let _ = parse_conllu(&line);
    }
}

#[test]
fn parsed_entity_surfaces_match_their_spans() {
    let (sources, references) = {
        let (s, r) = cliff_core::synth::synthetic_conllu();
        (s, r)
    };
    for stream in [sources, references] {
        for text in parse_conllu(&stream).unwrap() {
            for ent in &text.entities {
                let expected = normalized_surface(&text.tokens[ent.span.start..ent.span.end]);
                assert_eq!(ent.surface, expected);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// greedy matcher vs brute force
// ---------------------------------------------------------------------------

/// Enumerates every non-overlapping set of gazetteer matches and picks the
/// leftmost-longest one by the scan rule, independently of the greedy code.
fn brute_force_leftmost_longest(tokens: &[Token], gaz: &Gazetteer) -> Vec<EntityMention> {
    // all candidate matches
    let mut candidates = Vec::new();
    for start in 0..tokens.len() {
        for end in start + 1..=tokens.len() {
            let surface = normalized_surface(&tokens[start..end]);
            if let Some(etype) = gaz.etype_of(&surface) {
                candidates.push(EntityMention {
                    span: Span::new(start, end),
                    etype: etype.to_string(),
                    surface,
                });
            }
        }
    }
    // leftmost-longest scan: at each position take the longest candidate
    // starting there, then jump past it
    let mut picked = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let best = candidates
            .iter()
            .filter(|c| c.span.start == i)
            .max_by_key(|c| c.span.end);
        match best {
            Some(c) => {
                picked.push(c.clone());
                i = c.span.end;
            }
            None => i += 1,
        }
    }
    picked
}

fn gazetteer_from_pairs(pairs: &[(&str, &str)]) -> Gazetteer {
    let docs: Vec<Document> = pairs
        .iter()
        .enumerate()
        .map(|(i, (surface, etype))| {
            let words: Vec<&str> = surface.split(' ').collect();
            let tokens: Vec<Token> = words
                .iter()
                .enumerate()
                .map(|(j, w)| Token::new(*w, Upos::Propn, j))
                .collect();
            let text = AnnotatedText {
                entities: vec![EntityMention {
                    span: Span::new(0, tokens.len()),
                    etype: etype.to_string(),
                    surface: normalized_surface(&tokens),
                }],
                tokens,
                ..Default::default()
            };
            Document { id: format!("g{i}"), source: text.clone(), reference: text }
        })
        .collect();
    build_gazetteer(&Corpus::new(docs).unwrap())
}

#[test]
fn greedy_matcher_equals_brute_force_on_overlap_case() {
    let gaz = gazetteer_from_pairs(&[("new york", "GPE"), ("york city", "GPE")]);
    let tokens: Vec<Token> = ["new", "york", "city"]
        .iter()
        .enumerate()
        .map(|(i, w)| Token::new(*w, Upos::Propn, i))
        .collect();
    let greedy = match_entities(&tokens, &gaz);
    let brute = brute_force_leftmost_longest(&tokens, &gaz);
    assert_eq!(greedy, brute);
    assert_eq!(greedy.len(), 1);
    assert_eq!(greedy[0].surface, "new york");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn greedy_matcher_equals_brute_force(
        words in prop::collection::vec("[ab]{1,2}", 1..10)
    ) {
        let gaz = gazetteer_from_pairs(&[
            ("a", "T1"),
            ("a b", "T2"),
            ("b a", "T3"),
            ("bb ab", "T4"),
        ]);
        let tokens: Vec<Token> = words
            .into_iter()
            .enumerate()
            .map(|(i, w)| Token::new(w, Upos::X, i))
            .collect();
        let greedy = match_entities(&tokens, &gaz);
        let brute = brute_force_leftmost_longest(&tokens, &gaz);
        prop_assert_eq!(&greedy, &brute);
        // outputs are disjoint and every surface is a gazetteer key
        for pair in greedy.windows(2) {
            prop_assert!(pair[0].span.end <= pair[1].span.start);
        }
        for m in &greedy {
            prop_assert!(gaz.etype_of(&m.surface).is_some());
        }
    }
}
