//! Data model, validation, and I/O for annotated documents, beam dumps,
//! decoded outputs, and candidate samples.

pub mod conllu;
pub mod io;
pub mod quotes;
pub mod types;
pub mod validate;

pub use conllu::{
    concat_sentences, parse_conllu, parse_documents, write_conllu_document, write_conllu_sentence,
};
pub use io::{
    read_beams, read_corpus, read_jsonl, read_outputs, read_samples, write_corpus, write_jsonl,
    write_samples,
};
pub use quotes::detect_quotes;
pub use types::{
    normalized_surface, AnnotatedOutput, AnnotatedText, Beam, BeamSet, CandidateSample, Corpus,
    DepEdge, Document, EntityMention, ErrorKind, ErrorSpan, SampleLabel, Span, Strategy, Token,
    Upos,
};
pub use validate::{validate_document, Violation};
