//! Core data model: annotated texts, documents, beams, decoded outputs,
//! and candidate training samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize};

/// Universal POS tags (UD v2 inventory). `X` doubles as the unknown tag.
///
/// Variants are declared in lexicographic order of their surface names so
/// the derived `Ord` is the tie-break order used by lexicon construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Upos {
    #[serde(rename = "ADJ")]
    Adj,
    #[serde(rename = "ADP")]
    Adp,
    #[serde(rename = "ADV")]
    Adv,
    #[serde(rename = "AUX")]
    Aux,
    #[serde(rename = "CCONJ")]
    Cconj,
    #[serde(rename = "DET")]
    Det,
    #[serde(rename = "INTJ")]
    Intj,
    #[serde(rename = "NOUN")]
    Noun,
    #[serde(rename = "NUM")]
    Num,
    #[serde(rename = "PART")]
    Part,
    #[serde(rename = "PRON")]
    Pron,
    #[serde(rename = "PROPN")]
    Propn,
    #[serde(rename = "PUNCT")]
    Punct,
    #[serde(rename = "SCONJ")]
    Sconj,
    #[serde(rename = "SYM")]
    Sym,
    #[serde(rename = "VERB")]
    Verb,
    #[serde(rename = "X")]
    X,
}

impl Upos {
    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }

    /// Content-word tags: NOUN, PROPN, VERB, ADJ, ADV, NUM.
    pub fn is_content_word(self) -> bool {
        matches!(
            self,
            Upos::Noun | Upos::Propn | Upos::Verb | Upos::Adj | Upos::Adv | Upos::Num
        )
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ADJ" => Upos::Adj,
            "ADP" => Upos::Adp,
            "ADV" => Upos::Adv,
            "AUX" => Upos::Aux,
            "CCONJ" => Upos::Cconj,
            "DET" => Upos::Det,
            "INTJ" => Upos::Intj,
            "NOUN" => Upos::Noun,
            "NUM" => Upos::Num,
            "PART" => Upos::Part,
            "PRON" => Upos::Pron,
            "PROPN" => Upos::Propn,
            "PUNCT" => Upos::Punct,
            "SCONJ" => Upos::Sconj,
            "SYM" => Upos::Sym,
            "VERB" => Upos::Verb,
            "X" => Upos::X,
            _ => return Err(()),
        })
    }
}

/// A single token with its universal POS tag and 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub upos: Upos,
    pub index: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>, upos: Upos, index: usize) -> Self {
        Token {
            surface: surface.into(),
            upos,
            index,
        }
    }
}

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// True when `other` lies entirely inside `self`.
    pub fn covers(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// A named-entity mention over a token span.
///
/// `surface` is the normalized form: lowercased token surfaces joined by
/// single spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub span: Span,
    pub etype: String,
    pub surface: String,
}

/// A dependency edge between two token positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepEdge {
    pub gov: usize,
    pub rel: String,
    pub dep: usize,
}

/// A token sequence with its linguistic annotations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedText {
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub entities: Vec<EntityMention>,
    #[serde(default)]
    pub deps: Vec<DepEdge>,
    #[serde(default)]
    pub np_chunks: Vec<Span>,
    #[serde(default)]
    pub quotes: Vec<Span>,
}

impl AnnotatedText {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.surface.clone()).collect()
    }

    /// Normalized surface of a span: lowercased surfaces joined by spaces.
    pub fn span_surface(&self, span: &Span) -> String {
        normalized_surface(&self.tokens[span.start..span.end])
    }

    /// Lowercase-normalized surfaces of all entity mentions.
    pub fn entity_surfaces(&self) -> Vec<&str> {
        self.entities.iter().map(|e| e.surface.as_str()).collect()
    }
}

/// Lowercase + single-space normalization used for all surface matching.
pub fn normalized_surface(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A source article paired with its reference summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source: AnnotatedText,
    pub reference: AnnotatedText,
}

/// The three-way error taxonomy for annotated summary spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ErrorKind {
    #[serde(rename = "intrinsic")]
    Intrinsic,
    #[serde(rename = "extrinsic")]
    Extrinsic,
    #[serde(rename = "world_knowledge")]
    WorldKnowledge,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Intrinsic => "intrinsic",
            ErrorKind::Extrinsic => "extrinsic",
            ErrorKind::WorldKnowledge => "world_knowledge",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

// Error kinds are case-insensitive on read, canonical lowercase on write.
impl<'de> Deserialize<'de> for ErrorKind {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        let raw = String::deserialize(deserializer)?;
        match raw.to_lowercase().as_str() {
            "intrinsic" => Ok(ErrorKind::Intrinsic),
            "extrinsic" => Ok(ErrorKind::Extrinsic),
            "world_knowledge" => Ok(ErrorKind::WorldKnowledge),
            other => Err(serde::de::Error::custom(format!(
                "unknown error kind '{other}'"
            ))),
        }
    }
}

/// A labeled error span inside a decoded summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSpan {
    pub span: Span,
    pub kind: ErrorKind,
}

/// One beam hypothesis with per-token generation probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub tokens: Vec<Token>,
    pub probs: Vec<f64>,
    pub rank: usize,
}

/// All final-step beams decoded for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSet {
    pub doc_id: String,
    pub beams: Vec<Beam>,
}

/// A decoded summary with probabilities and labeled error spans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedOutput {
    pub doc_id: String,
    pub tokens: Vec<Token>,
    pub probs: Vec<f64>,
    #[serde(default)]
    pub errors: Vec<ErrorSpan>,
}

/// Sample polarity inside a training batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleLabel {
    Positive,
    Negative,
}

/// Provenance of a candidate sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Reference,
    Backtranslate,
    SwapEnt,
    MaskEnt,
    MaskRel,
    RegenEnt,
    RegenRel,
    SysLowcon,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Reference => "reference",
            Strategy::Backtranslate => "backtranslate",
            Strategy::SwapEnt => "swap_ent",
            Strategy::MaskEnt => "mask_ent",
            Strategy::MaskRel => "mask_rel",
            Strategy::RegenEnt => "regen_ent",
            Strategy::RegenRel => "regen_rel",
            Strategy::SysLowcon => "sys_lowcon",
        }
    }

    /// The six negative-construction strategies, in canonical order.
    pub const NEGATIVE: [Strategy; 6] = [
        Strategy::SwapEnt,
        Strategy::MaskEnt,
        Strategy::MaskRel,
        Strategy::RegenEnt,
        Strategy::RegenRel,
        Strategy::SysLowcon,
    ];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// Accepts both snake_case and kebab-case names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.replace('-', "_").as_str() {
            "reference" => Strategy::Reference,
            "backtranslate" => Strategy::Backtranslate,
            "swap_ent" => Strategy::SwapEnt,
            "mask_ent" => Strategy::MaskEnt,
            "mask_rel" => Strategy::MaskRel,
            "regen_ent" => Strategy::RegenEnt,
            "regen_rel" => Strategy::RegenRel,
            "sys_lowcon" => Strategy::SysLowcon,
            other => return Err(format!("unknown strategy '{other}'")),
        })
    }
}

/// A positive or negative training summary with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSample {
    pub doc_id: String,
    pub tokens: Vec<Token>,
    pub label: SampleLabel,
    pub strategy: Strategy,
    #[serde(default)]
    pub edited_spans: Vec<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_probs: Option<Vec<f64>>,
}

impl CandidateSample {
    pub fn surfaces(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.surface.clone()).collect()
    }
}

/// An id-indexed collection of documents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub docs: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate document ids.
    pub fn new(docs: Vec<Document>) -> crate::Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for doc in &docs {
            if !seen.insert(doc.id.clone()) {
                return Err(crate::Error::DuplicateDoc(doc.id.clone()));
            }
        }
        Ok(Corpus { docs })
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.docs.iter().find(|d| d.id == id)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upos_ord_is_lexicographic_on_names() {
        let mut tags = vec![
            Upos::X,
            Upos::Verb,
            Upos::Noun,
            Upos::Num,
            Upos::Propn,
            Upos::Pron,
            Upos::Adj,
        ];
        tags.sort();
        let names: Vec<&str> = tags.iter().map(|t| t.as_str()).collect();
        let mut by_name = names.clone();
        by_name.sort();
        assert_eq!(names, by_name);
    }

    #[test]
    fn error_kind_reads_case_insensitively() {
        let k: ErrorKind = serde_json::from_str("\"Extrinsic\"").unwrap();
        assert_eq!(k, ErrorKind::Extrinsic);
        let k: ErrorKind = serde_json::from_str("\"WORLD_KNOWLEDGE\"").unwrap();
        assert_eq!(k, ErrorKind::WorldKnowledge);
        assert_eq!(serde_json::to_string(&k).unwrap(), "\"world_knowledge\"");
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::NEGATIVE {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!("sys-lowcon".parse::<Strategy>().unwrap(), Strategy::SysLowcon);
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let doc = Document {
            id: "d1".into(),
            source: AnnotatedText::default(),
            reference: AnnotatedText::default(),
        };
        let err = Corpus::new(vec![doc.clone(), doc]).unwrap_err();
        assert!(matches!(err, crate::Error::DuplicateDoc(_)));
    }
}
