//! Linguistic utilities: relation triples, relation matching, gazetteers,
//! lexicon-based POS tagging, and confidence-span detection.

pub mod gazetteer;
pub mod lexicon;
pub mod relations;
pub mod spans;

pub use gazetteer::{build_gazetteer, match_entities, Gazetteer};
pub use lexicon::{tag_pos, PosLexicon, SynonymLexicon};
pub use relations::{extract_relations, relation_matches, triple_from_heads, RelationTriple};
pub use spans::{detect_confidence_spans, is_number_surface, SpanClass};
