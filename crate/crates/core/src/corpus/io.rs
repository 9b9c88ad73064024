//! JSONL readers and writers for corpora, beam dumps, decoded outputs, and
//! candidate samples. One JSON object per line, newline-terminated files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::types::{AnnotatedOutput, BeamSet, CandidateSample, Corpus, Document};
use super::validate::validate_document;
use crate::{Error, Result};

/// Reads a JSONL file, reporting the 1-based line of the first bad record.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: T = serde_json::from_str(&line)
            .map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
        out.push(value);
    }
    Ok(out)
}

/// Writes records as JSONL; the file always ends with a newline.
pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, items: &[T]) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path.as_ref())?);
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads and validates a corpus. Every document must satisfy the type
/// invariants; violations are reported with the document id and field.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let docs: Vec<Document> = read_jsonl(path)?;
    for doc in &docs {
        let violations = validate_document(doc);
        if let Some(v) = violations.first() {
            return Err(Error::schema(&doc.id, v.to_string()));
        }
    }
    Corpus::new(docs)
}

pub fn write_corpus(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    write_jsonl(path, &corpus.docs)
}

/// Reads beam dumps, enforcing the per-beam invariants.
pub fn read_beams(path: impl AsRef<Path>) -> Result<Vec<BeamSet>> {
    let sets: Vec<BeamSet> = read_jsonl(path)?;
    for set in &sets {
        for beam in &set.beams {
            if beam.probs.len() != beam.tokens.len() {
                return Err(Error::schema(
                    &set.doc_id,
                    format!(
                        "beam rank {}: {} probs for {} tokens",
                        beam.rank,
                        beam.probs.len(),
                        beam.tokens.len()
                    ),
                ));
            }
            if let Some(p) = beam.probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::schema(
                    &set.doc_id,
                    format!("beam rank {}: probability {p} outside [0, 1]", beam.rank),
                ));
            }
        }
    }
    Ok(sets)
}

/// Reads decoded outputs, enforcing prob/token parallelism and span ranges.
pub fn read_outputs(path: impl AsRef<Path>) -> Result<Vec<AnnotatedOutput>> {
    let outputs: Vec<AnnotatedOutput> = read_jsonl(path)?;
    for output in &outputs {
        if output.probs.len() != output.tokens.len() {
            return Err(Error::schema(
                &output.doc_id,
                format!(
                    "{} probs for {} tokens",
                    output.probs.len(),
                    output.tokens.len()
                ),
            ));
        }
        for err in &output.errors {
            if err.span.start >= err.span.end || err.span.end > output.tokens.len() {
                return Err(Error::schema(
                    &output.doc_id,
                    format!(
                        "error span [{}, {}) out of range (len {})",
                        err.span.start,
                        err.span.end,
                        output.tokens.len()
                    ),
                ));
            }
        }
    }
    Ok(outputs)
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<Vec<CandidateSample>> {
    let samples: Vec<CandidateSample> = read_jsonl(path)?;
    for sample in &samples {
        if let Some(probs) = &sample.gen_probs {
            if probs.len() != sample.tokens.len() {
                return Err(Error::schema(
                    &sample.doc_id,
                    format!(
                        "{} gen_probs for {} tokens",
                        probs.len(),
                        sample.tokens.len()
                    ),
                ));
            }
        }
        for span in &sample.edited_spans {
            if span.start >= span.end || span.end > sample.tokens.len() {
                return Err(Error::schema(
                    &sample.doc_id,
                    format!("edited span [{}, {}) out of range", span.start, span.end),
                ));
            }
        }
    }
    Ok(samples)
}

pub fn write_samples(path: impl AsRef<Path>, samples: &[CandidateSample]) -> Result<()> {
    write_jsonl(path, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::{AnnotatedText, Beam, Token, Upos};

    fn text(words: &[(&str, Upos)]) -> AnnotatedText {
        AnnotatedText {
            tokens: words
                .iter()
                .enumerate()
                .map(|(i, (s, u))| Token::new(*s, *u, i))
                .collect(),
            ..Default::default()
        }
    }

    fn doc(id: &str) -> Document {
        Document {
            id: id.into(),
            source: text(&[("an", Upos::Det), ("owl", Upos::Noun)]),
            reference: text(&[("owl", Upos::Noun)]),
        }
    }

    #[test]
    fn corpus_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let corpus = Corpus::new(vec![doc("a"), doc("b"), doc("c")]).unwrap();
        write_corpus(&path, &corpus).unwrap();
        let back = read_corpus(&path).unwrap();
        assert_eq!(back, corpus);
        // read ∘ write is also identity at the byte level
        let bytes = std::fs::read(&path).unwrap();
        write_corpus(&path, &back).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), bytes);
    }

    #[test]
    fn missing_reference_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "{\"id\":\"d7\",\"source\":{\"tokens\":[]}}\n").unwrap();
        let err = read_corpus(&path).unwrap_err();
        assert!(err.to_string().contains("reference"), "{err}");
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(read_corpus(&path).unwrap().is_empty());
    }

    #[test]
    fn duplicate_doc_id_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let corpus = Corpus { docs: vec![doc("a"), doc("a")] };
        write_corpus(&path, &corpus).unwrap();
        assert!(matches!(read_corpus(&path), Err(Error::DuplicateDoc(_))));
    }

    #[test]
    fn beam_prob_length_mismatch_names_doc() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("beams.jsonl");
        let set = BeamSet {
            doc_id: "d3".into(),
            beams: vec![Beam {
                tokens: text(&[("a", Upos::X), ("b", Upos::X)]).tokens,
                probs: vec![0.5],
                rank: 0,
            }],
        };
        write_jsonl(&path, &[set]).unwrap();
        let err = read_beams(&path).unwrap_err();
        assert!(err.to_string().contains("d3"), "{err}");
    }

    #[test]
    fn beam_with_matching_probs_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("beams.jsonl");
        let set = BeamSet {
            doc_id: "d1".into(),
            beams: vec![Beam {
                tokens: text(&[("a", Upos::X), ("b", Upos::X), ("c", Upos::X), ("d", Upos::X), ("e", Upos::X)]).tokens,
                probs: vec![0.1, 0.2, 0.3, 0.4, 0.5],
                rank: 0,
            }],
        };
        write_jsonl(&path, &[set]).unwrap();
        assert_eq!(read_beams(&path).unwrap().len(), 1);
    }
}
