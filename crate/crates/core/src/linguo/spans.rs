//! Proper-noun and number span detection for confidence analysis.

use serde::{Deserialize, Serialize};

use crate::corpus::{Span, Token, Upos};

/// Surface shaped like a number: a digit followed by digits, commas, or dots.
pub fn is_number_surface(surface: &str) -> bool {
    let mut chars = surface.chars();
    match chars.next() {
        Some(c) if c.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_digit() || c == ',' || c == '.')
}

/// The two span classes whose first-token confidence is analyzed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanClass {
    Propn,
    Number,
}

fn classify(token: &Token) -> Option<SpanClass> {
    if token.upos == Upos::Propn {
        Some(SpanClass::Propn)
    } else if token.upos == Upos::Num || is_number_surface(&token.surface) {
        Some(SpanClass::Number)
    } else {
        None
    }
}

/// Maximal runs of proper-noun tokens and of number tokens, in order.
/// Spans of the two classes never overlap: PROPN wins classification.
pub fn detect_confidence_spans(tokens: &[Token]) -> Vec<(Span, SpanClass)> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, SpanClass)> = None;
    for (i, token) in tokens.iter().enumerate() {
        let class = classify(token);
        if let Some((start, current)) = open {
            if class != Some(current) {
                spans.push((Span::new(start, i), current));
                open = class.map(|c| (i, c));
            }
        } else {
            open = class.map(|c| (i, c));
        }
    }
    if let Some((start, class)) = open {
        spans.push((Span::new(start, tokens.len()), class));
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[(&str, Upos)]) -> Vec<Token> {
        words
            .iter()
            .enumerate()
            .map(|(i, (s, u))| Token::new(*s, *u, i))
            .collect()
    }

    #[test]
    fn propn_and_number_runs() {
        let t = toks(&[
            ("Wayne", Upos::Propn),
            ("Rooney", Upos::Propn),
            ("scored", Upos::Verb),
            ("2", Upos::Num),
        ]);
        assert_eq!(
            detect_confidence_spans(&t),
            vec![
                (Span::new(0, 2), SpanClass::Propn),
                (Span::new(3, 4), SpanClass::Number),
            ]
        );
    }

    #[test]
    fn number_by_surface_regex() {
        let t = toks(&[("1,000", Upos::Num), ("people", Upos::Noun)]);
        assert_eq!(
            detect_confidence_spans(&t),
            vec![(Span::new(0, 1), SpanClass::Number)]
        );
        // unmarked numeric surface still counts
        let t = toks(&[("350.5", Upos::X)]);
        assert_eq!(detect_confidence_spans(&t).len(), 1);
    }

    #[test]
    fn no_qualifying_tokens() {
        let t = toks(&[("an", Upos::Det), ("owl", Upos::Noun)]);
        assert!(detect_confidence_spans(&t).is_empty());
    }

    #[test]
    fn adjacent_classes_split_spans() {
        let t = toks(&[("Orwell", Upos::Propn), ("1984", Upos::Num)]);
        let spans = detect_confidence_spans(&t);
        assert_eq!(spans.len(), 2);
        assert_eq!(spans[0], (Span::new(0, 1), SpanClass::Propn));
        assert_eq!(spans[1], (Span::new(1, 2), SpanClass::Number));
    }

    #[test]
    fn spans_are_maximal() {
        let t = toks(&[
            ("New", Upos::Propn),
            ("York", Upos::Propn),
            ("City", Upos::Propn),
        ]);
        assert_eq!(
            detect_confidence_spans(&t),
            vec![(Span::new(0, 3), SpanClass::Propn)]
        );
    }

    #[test]
    fn number_surface_shapes() {
        assert!(is_number_surface("7"));
        assert!(is_number_surface("1,000"));
        assert!(is_number_surface("3.14"));
        assert!(!is_number_surface(",7"));
        assert!(!is_number_surface("x7"));
        assert!(!is_number_surface(""));
        assert!(!is_number_surface("7a"));
    }
}
