//! Generation-probability histograms grouped by POS class, error class,
//! and span position, mirroring the confidence analysis tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedOutput, ErrorKind, Token, Upos};
use crate::linguo::is_number_surface;
use crate::{Error, Result};

/// POS classes tracked by the analysis. Anything else is skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosClass {
    Propn,
    Number,
    Noun,
    Verb,
}

impl PosClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PosClass::Propn => "propn",
            PosClass::Number => "number",
            PosClass::Noun => "noun",
            PosClass::Verb => "verb",
        }
    }
}

/// Error class of a token: the kind of its covering span, or correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenErrorClass {
    Extrinsic,
    Intrinsic,
    WorldKnowledge,
    Correct,
}

impl TokenErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenErrorClass::Extrinsic => "extrinsic",
            TokenErrorClass::Intrinsic => "intrinsic",
            TokenErrorClass::WorldKnowledge => "world_knowledge",
            TokenErrorClass::Correct => "correct",
        }
    }
}

/// Whether a token opens its maximal same-class span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenPosition {
    First,
    Nonfirst,
}

impl TokenPosition {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenPosition::First => "first",
            TokenPosition::Nonfirst => "nonfirst",
        }
    }
}

pub type HistogramKey = (PosClass, TokenErrorClass, TokenPosition);

/// Binned probability counts per (POS class, error class, position) row.
/// Bins partition [0, 1] uniformly; the last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramTable {
    pub bin_edges: Vec<f64>,
    rows: BTreeMap<HistogramKey, Vec<u64>>,
}

impl HistogramTable {
    pub fn bins(&self) -> usize {
        self.bin_edges.len() - 1
    }

    pub fn counts(&self, key: &HistogramKey) -> Option<&[u64]> {
        self.rows.get(key).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&HistogramKey, &Vec<u64>)> {
        self.rows.iter()
    }

    pub fn total(&self) -> u64 {
        self.rows.values().flat_map(|c| c.iter()).sum()
    }

    /// One TSV row per (pos_class, error_class, position, bin).
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("pos_class\terror_class\tposition\tbin_lo\tbin_hi\tcount\n");
        for ((pos, err, position), counts) in &self.rows {
            for (b, count) in counts.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{:.3}\t{:.3}\t{}",
                    pos.as_str(),
                    err.as_str(),
                    position.as_str(),
                    self.bin_edges[b],
                    self.bin_edges[b + 1],
                    count
                );
            }
        }
        out
    }
}

fn pos_class(token: &Token) -> Option<PosClass> {
    if token.upos == Upos::Propn {
        Some(PosClass::Propn)
    } else if token.upos == Upos::Num || is_number_surface(&token.surface) {
        Some(PosClass::Number)
    } else if token.upos == Upos::Noun {
        Some(PosClass::Noun)
    } else if token.upos == Upos::Verb {
        Some(PosClass::Verb)
    } else {
        None
    }
}

fn error_class(output: &AnnotatedOutput, index: usize) -> TokenErrorClass {
    for err in &output.errors {
        if err.span.contains(index) {
            return match err.kind {
                ErrorKind::Extrinsic => TokenErrorClass::Extrinsic,
                ErrorKind::Intrinsic => TokenErrorClass::Intrinsic,
                ErrorKind::WorldKnowledge => TokenErrorClass::WorldKnowledge,
            };
        }
    }
    TokenErrorClass::Correct
}

/// Accumulates every classifiable token of every output into its
/// (POS class, error class, position, probability-bin) cell.
pub fn confidence_histogram(outputs: &[AnnotatedOutput], bins: usize) -> Result<HistogramTable> {
    if bins < 2 {
        return Err(Error::Invalid(format!("histogram needs at least 2 bins, got {bins}")));
    }
    let bin_edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let mut rows: BTreeMap<HistogramKey, Vec<u64>> = BTreeMap::new();

    for output in outputs {
        let classes: Vec<Option<PosClass>> = output.tokens.iter().map(pos_class).collect();
        for (i, class) in classes.iter().enumerate() {
            let Some(class) = class else { continue };
            let position = if i == 0 || classes[i - 1] != Some(*class) {
                TokenPosition::First
            } else {
                TokenPosition::Nonfirst
            };
            let err = error_class(output, i);
            let p = output.probs[i].clamp(0.0, 1.0);
            let bin = ((p * bins as f64) as usize).min(bins - 1);
            rows.entry((*class, err, position)).or_insert_with(|| vec![0; bins])[bin] += 1;
        }
    }
    Ok(HistogramTable { bin_edges, rows })
}
