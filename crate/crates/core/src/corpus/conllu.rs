//! CoNLL-U ingestion and emission.
//!
//! Ten tab-separated columns, blank-line sentence boundaries, `#` comments.
//! Named entities ride in MISC as `NER=B-TYPE` / `NER=I-TYPE`, noun-phrase
//! chunks as `NP=B` / `NP=I`. Root edges (HEAD=0) are not materialized as
//! dependency edges. Multiword-token and empty-node lines (ids containing
//! `-` or `.`) are skipped, per the usual CoNLL-U reading convention.

use std::collections::BTreeMap;

use super::quotes::detect_quotes;
use super::types::{AnnotatedText, DepEdge, Document, EntityMention, Span, Token, Upos};
use crate::{Error, Result};

const COLUMNS: usize = 10;

#[derive(Debug, Default)]
struct SentenceBuilder {
    tokens: Vec<Token>,
    deps: Vec<DepEdge>,
    ner_tags: Vec<Option<(char, String)>>,
    np_tags: Vec<Option<char>>,
}

impl SentenceBuilder {
    fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn finish(self) -> AnnotatedText {
        let entities = reconstruct_entities(&self.tokens, &self.ner_tags);
        let np_chunks = reconstruct_chunks(&self.np_tags);
        let quotes = detect_quotes(&self.tokens);
        AnnotatedText {
            tokens: self.tokens,
            entities,
            deps: self.deps,
            np_chunks,
            quotes,
        }
    }
}

/// Rebuilds entity mentions from contiguous B/I tag runs. An `I` tag
/// without a compatible open mention starts a new one.
fn reconstruct_entities(tokens: &[Token], tags: &[Option<(char, String)>]) -> Vec<EntityMention> {
    let mut entities = Vec::new();
    let mut open: Option<(usize, String)> = None;

    let close = |open: &mut Option<(usize, String)>, end: usize, out: &mut Vec<EntityMention>| {
        if let Some((start, etype)) = open.take() {
            let surface = super::types::normalized_surface(&tokens[start..end]);
            out.push(EntityMention {
                span: Span::new(start, end),
                etype,
                surface,
            });
        }
    };

    for (i, tag) in tags.iter().enumerate() {
        match tag {
            Some(('B', etype)) => {
                close(&mut open, i, &mut entities);
                open = Some((i, etype.clone()));
            }
            Some(('I', etype)) => match &open {
                Some((_, current)) if current == etype => {}
                _ => {
                    close(&mut open, i, &mut entities);
                    open = Some((i, etype.clone()));
                }
            },
            _ => close(&mut open, i, &mut entities),
        }
    }
    close(&mut open, tags.len(), &mut entities);
    entities
}

fn reconstruct_chunks(tags: &[Option<char>]) -> Vec<Span> {
    let mut chunks = Vec::new();
    let mut open: Option<usize> = None;
    for (i, tag) in tags.iter().enumerate() {
        match tag {
            Some('B') => {
                if let Some(start) = open.take() {
                    chunks.push(Span::new(start, i));
                }
                open = Some(i);
            }
            Some('I') => {
                if open.is_none() {
                    open = Some(i);
                }
            }
            _ => {
                if let Some(start) = open.take() {
                    chunks.push(Span::new(start, i));
                }
            }
        }
    }
    if let Some(start) = open {
        chunks.push(Span::new(start, tags.len()));
    }
    chunks
}

fn parse_misc(misc: &str) -> (Option<(char, String)>, Option<char>) {
    let mut ner = None;
    let mut np = None;
    if misc == "_" {
        return (ner, np);
    }
    for item in misc.split('|') {
        if let Some(value) = item.strip_prefix("NER=") {
            let mut parts = value.splitn(2, '-');
            let bi = parts.next().unwrap_or("");
            let etype = parts.next().unwrap_or("");
            if (bi == "B" || bi == "I") && !etype.is_empty() {
                ner = Some((bi.chars().next().unwrap(), etype.to_string()));
            }
        } else if let Some(value) = item.strip_prefix("NP=") {
            if value == "B" || value == "I" {
                np = Some(value.chars().next().unwrap());
            }
        }
    }
    (ner, np)
}

/// Parses a CoNLL-U stream into one [`AnnotatedText`] per sentence.
///
/// Never panics on arbitrary input: every malformed line is reported as a
/// located parse error.
pub fn parse_conllu(input: &str) -> Result<Vec<AnnotatedText>> {
    Ok(parse_grouped(input)?.into_iter().map(|(_, t)| t).collect())
}

/// Parses a CoNLL-U stream keeping the `# newdoc id = ...` each sentence
/// belongs to (empty string when absent).
fn parse_grouped(input: &str) -> Result<Vec<(String, AnnotatedText)>> {
    let mut sentences = Vec::new();
    let mut builder = SentenceBuilder::default();
    let mut current_doc = String::new();

    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches('\r');

        if line.trim().is_empty() {
            if !builder.is_empty() {
                sentences.push((current_doc.clone(), std::mem::take(&mut builder).finish()));
            }
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(id) = comment.trim().strip_prefix("newdoc id =") {
                current_doc = id.trim().to_string();
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return Err(Error::parse(
                lineno,
                format!("expected {COLUMNS} columns, found {}", cols.len()),
            ));
        }

        // Multiword tokens (1-2) and empty nodes (1.1) carry no tree edges.
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }

        let surface = cols[1].to_string();
        if surface.is_empty() {
            return Err(Error::parse(lineno, "empty FORM column"));
        }
        let upos = cols[3].parse::<Upos>().unwrap_or(Upos::X);
        let head: i64 = cols[6]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("non-integer HEAD '{}'", cols[6])))?;
        if head < 0 {
            return Err(Error::parse(lineno, format!("negative HEAD '{head}'")));
        }

        let index = builder.tokens.len();
        if head > 0 {
            builder.deps.push(DepEdge {
                gov: (head - 1) as usize,
                rel: cols[7].to_string(),
                dep: index,
            });
        }
        let (ner, np) = parse_misc(cols[9]);
        builder.ner_tags.push(ner);
        builder.np_tags.push(np);
        builder.tokens.push(Token::new(surface, upos, index));
    }
    if !builder.is_empty() {
        sentences.push((current_doc, builder.finish()));
    }

    // Reject dangling heads so downstream span logic can trust indices.
    for (i, (_, sent)) in sentences.iter().enumerate() {
        for edge in &sent.deps {
            if edge.gov >= sent.tokens.len() {
                return Err(Error::Invalid(format!(
                    "sentence {}: HEAD {} exceeds sentence length {}",
                    i + 1,
                    edge.gov + 1,
                    sent.tokens.len()
                )));
            }
        }
    }
    Ok(sentences)
}

/// Concatenates a document's sentences into one annotated text,
/// re-indexing tokens, edges, and spans. Quotes are re-detected over the
/// combined token stream.
pub fn concat_sentences(sentences: Vec<AnnotatedText>) -> AnnotatedText {
    let mut out = AnnotatedText::default();
    for sent in sentences {
        let offset = out.tokens.len();
        for tok in sent.tokens {
            let index = out.tokens.len();
            out.tokens.push(Token::new(tok.surface, tok.upos, index));
        }
        for mut ent in sent.entities {
            ent.span = Span::new(ent.span.start + offset, ent.span.end + offset);
            out.entities.push(ent);
        }
        for edge in sent.deps {
            out.deps.push(DepEdge {
                gov: edge.gov + offset,
                rel: edge.rel,
                dep: edge.dep + offset,
            });
        }
        for chunk in sent.np_chunks {
            out.np_chunks.push(Span::new(chunk.start + offset, chunk.end + offset));
        }
    }
    out.quotes = detect_quotes(&out.tokens);
    out
}

/// Pairs two CoNLL-U streams (articles and summaries) into documents,
/// matched by `# newdoc id`. Every id must appear in both streams.
pub fn parse_documents(source_input: &str, reference_input: &str) -> Result<Vec<Document>> {
    let group = |input: &str| -> Result<(Vec<String>, BTreeMap<String, Vec<AnnotatedText>>)> {
        let mut order = Vec::new();
        let mut by_doc: BTreeMap<String, Vec<AnnotatedText>> = BTreeMap::new();
        for (doc_id, sent) in parse_grouped(input)? {
            if doc_id.is_empty() {
                return Err(Error::Invalid(
                    "sentence outside any '# newdoc id = ...' block".into(),
                ));
            }
            if !by_doc.contains_key(&doc_id) {
                order.push(doc_id.clone());
            }
            by_doc.entry(doc_id).or_default().push(sent);
        }
        Ok((order, by_doc))
    };

    let (order, mut sources) = group(source_input)?;
    let (_, mut references) = group(reference_input)?;

    let mut docs = Vec::new();
    for id in order {
        let source = concat_sentences(sources.remove(&id).expect("grouped by id"));
        let reference = concat_sentences(references.remove(&id).ok_or_else(|| {
            Error::schema(&id, "document present in source stream but not in reference stream")
        })?);
        docs.push(Document { id, source, reference });
    }
    if let Some(extra) = references.keys().next() {
        return Err(Error::schema(
            extra.clone(),
            "document present in reference stream but not in source stream",
        ));
    }
    Ok(docs)
}

/// Emits a document's sentences as one CoNLL-U block under a single
/// `# newdoc id` header.
pub fn write_conllu_document(doc_id: &str, sentences: &[AnnotatedText], out: &mut String) {
    out.push_str(&format!("# newdoc id = {doc_id}\n"));
    for sentence in sentences {
        write_conllu_sentence(sentence, out);
    }
}

/// Emits one annotated text as a CoNLL-U sentence block.
///
/// Tokens without an incoming dependency edge are written as roots. The
/// output parses back to the same tokens, entities, deps, and chunks.
pub fn write_conllu_sentence(text: &AnnotatedText, out: &mut String) {
    let mut head_of: BTreeMap<usize, (usize, &str)> = BTreeMap::new();
    for edge in &text.deps {
        head_of.entry(edge.dep).or_insert((edge.gov + 1, &edge.rel));
    }

    for (i, tok) in text.tokens.iter().enumerate() {
        let (head, rel) = head_of.get(&i).copied().unwrap_or((0, "root"));
        let mut misc_items = Vec::new();
        for ent in &text.entities {
            if ent.span.start == i {
                misc_items.push(format!("NER=B-{}", ent.etype));
            } else if ent.span.contains(i) {
                misc_items.push(format!("NER=I-{}", ent.etype));
            }
        }
        for chunk in &text.np_chunks {
            if chunk.start == i {
                misc_items.push("NP=B".to_string());
            } else if chunk.contains(i) {
                misc_items.push("NP=I".to_string());
            }
        }
        let misc = if misc_items.is_empty() {
            "_".to_string()
        } else {
            misc_items.join("|")
        };
        out.push_str(&format!(
            "{}\t{}\t_\t{}\t_\t_\t{}\t{}\t_\t{}\n",
            i + 1,
            tok.surface,
            tok.upos,
            head,
            rel,
            misc
        ));
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_b_tag_reconstruction() {
        let input = "1\tJohn\t_\tPROPN\t_\t_\t2\tnsubj\t_\tNER=B-PERSON\n\
                     2\truns\t_\tVERB\t_\t_\t0\troot\t_\t_\n";
        let texts = parse_conllu(input).unwrap();
        assert_eq!(texts.len(), 1);
        let t = &texts[0];
        assert_eq!(t.entities.len(), 1);
        assert_eq!(t.entities[0].span, Span::new(0, 1));
        assert_eq!(t.entities[0].etype, "PERSON");
        assert_eq!(t.entities[0].surface, "john");
    }

    #[test]
    fn head_and_deprel_map_to_edge() {
        let input = "1\tJohn\t_\tPROPN\t_\t_\t2\tnsubj\t_\t_\n\
                     2\truns\t_\tVERB\t_\t_\t0\troot\t_\t_\n";
        let texts = parse_conllu(input).unwrap();
        assert_eq!(
            texts[0].deps,
            vec![DepEdge { gov: 1, rel: "nsubj".into(), dep: 0 }]
        );
    }

    #[test]
    fn nine_column_line_is_a_located_error() {
        let input = "1\tJohn\t_\tPROPN\t_\t_\t2\tnsubj\t_\n";
        let err = parse_conllu(input).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 1);
                assert!(msg.contains("columns"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_integer_head_is_a_located_error() {
        let input = "1\tJohn\t_\tPROPN\t_\t_\tx\tnsubj\t_\t_\n";
        let err = parse_conllu(input).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dangling_i_tag_starts_new_mention() {
        let input = "1\tthe\t_\tDET\t_\t_\t3\tdet\t_\t_\n\
                     2\tYork\t_\tPROPN\t_\t_\t3\tcompound\t_\tNER=I-GPE\n\
                     3\tcouncil\t_\tNOUN\t_\t_\t0\troot\t_\t_\n";
        let texts = parse_conllu(input).unwrap();
        assert_eq!(texts[0].entities.len(), 1);
        assert_eq!(texts[0].entities[0].span, Span::new(1, 2));
    }

    #[test]
    fn i_tag_with_type_change_starts_new_mention() {
        let input = "1\tParis\t_\tPROPN\t_\t_\t0\troot\t_\tNER=B-GPE\n\
                     2\tHilton\t_\tPROPN\t_\t_\t1\tflat\t_\tNER=I-PERSON\n";
        let texts = parse_conllu(input).unwrap();
        let ents = &texts[0].entities;
        assert_eq!(ents.len(), 2);
        assert_eq!(ents[0].etype, "GPE");
        assert_eq!(ents[1].etype, "PERSON");
    }

    #[test]
    fn multiword_token_lines_are_skipped() {
        let input = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
                     1\tdo\t_\tAUX\t_\t_\t0\troot\t_\t_\n\
                     2\tnot\t_\tPART\t_\t_\t1\tadvmod\t_\t_\n";
        let texts = parse_conllu(input).unwrap();
        assert_eq!(texts[0].tokens.len(), 2);
    }

    #[test]
    fn np_chunks_reconstruct() {
        let input = "1\tthe\t_\tDET\t_\t_\t2\tdet\t_\tNP=B\n\
                     2\towl\t_\tNOUN\t_\t_\t0\troot\t_\tNP=I\n\
                     3\tflew\t_\tVERB\t_\t_\t2\tdep\t_\t_\n";
        let texts = parse_conllu(input).unwrap();
        assert_eq!(texts[0].np_chunks, vec![Span::new(0, 2)]);
    }

    #[test]
    fn totality_on_arbitrary_bytes() {
        for garbage in ["\t\t\t", "1\n2\n3", "###", "1\tx\t", "\u{0}\u{1}\u{2}", "a\tb\tc\td\te\tf\tg\th\ti\tj"] {
            let _ = parse_conllu(garbage); // must not panic
        }
    }

    #[test]
    fn write_then_parse_round_trips() {
        let input = "# newdoc id = d1\n\
                     1\tA\t_\tDET\t_\t_\t3\tdet\t_\tNP=B\n\
                     2\trare\t_\tADJ\t_\t_\t3\tamod\t_\tNP=I\n\
                     3\towl\t_\tNOUN\t_\t_\t4\tnsubj\t_\tNP=I\n\
                     4\tlanded\t_\tVERB\t_\t_\t0\troot\t_\t_\n\
                     5\tin\t_\tADP\t_\t_\t6\tcase\t_\tNP=B\n\
                     6\tYork\t_\tPROPN\t_\t_\t4\tobl\t_\tNER=B-GPE|NP=I\n";
        let texts = parse_conllu(input).unwrap();
        let mut emitted = String::new();
        write_conllu_document("d1", &texts, &mut emitted);
        let reparsed = parse_conllu(&emitted).unwrap();
        assert_eq!(reparsed, texts);
    }
}
