//! Quote-span detection over token streams.
//!
//! A quote span is a maximal token run strictly between matching quote-mark
//! tokens. Supported pairs: straight `"` ... `"`, curly `“` ... `”`, and
//! LaTeX-style ``` `` ``` ... `''`. Nested quotes are not supported: once a
//! quote opens, the first matching closer ends it.

use super::types::{Span, Token};

fn closer_for(surface: &str) -> Option<&'static str> {
    match surface {
        "\"" => Some("\""),
        "“" => Some("”"),
        "``" => Some("''"),
        _ => None,
    }
}

/// Returns the spans strictly between matched quote marks, left to right.
/// Unmatched openers produce no span.
pub fn detect_quotes(tokens: &[Token]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if let Some(closer) = closer_for(&tokens[i].surface) {
            if let Some(j) = tokens[i + 1..]
                .iter()
                .position(|t| t.surface == closer)
                .map(|off| i + 1 + off)
            {
                if j > i + 1 {
                    spans.push(Span::new(i + 1, j));
                }
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::Upos;

    fn toks(surfaces: &[&str]) -> Vec<Token> {
        surfaces
            .iter()
            .enumerate()
            .map(|(i, s)| Token::new(*s, Upos::X, i))
            .collect()
    }

    #[test]
    fn straight_quotes() {
        let t = toks(&["he", "said", "\"", "go", "home", "\"", "."]);
        assert_eq!(detect_quotes(&t), vec![Span::new(3, 5)]);
    }

    #[test]
    fn latex_quotes() {
        let t = toks(&["A", "``", "rare", "''", "owl"]);
        assert_eq!(detect_quotes(&t), vec![Span::new(2, 3)]);
    }

    #[test]
    fn unmatched_opener_yields_nothing() {
        let t = toks(&["\"", "go", "home"]);
        assert!(detect_quotes(&t).is_empty());
    }

    #[test]
    fn empty_quote_yields_nothing() {
        let t = toks(&["\"", "\"", "x"]);
        assert!(detect_quotes(&t).is_empty());
    }

    #[test]
    fn two_quotes_in_sequence() {
        let t = toks(&["“", "a", "”", "and", "“", "b", "c", "”"]);
        assert_eq!(detect_quotes(&t), vec![Span::new(1, 2), Span::new(5, 7)]);
    }
}
