//! Tokenization and edit-distance matching shared by the interpreter and the
//! hint rules.

use serde::{Deserialize, Serialize};

/// Half-open range of character (code point) offsets into a query string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end);
        Span { start, end }
    }

    pub fn cover(a: Span, b: Span) -> Span {
        Span::new(a.start.min(b.start), a.end.max(b.end))
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// The spanned substring of `s`.
    pub fn slice<'a>(&self, s: &'a str) -> &'a str {
        let mut indices = s.char_indices().map(|(i, _)| i).chain(std::iter::once(s.len()));
        let begin = indices.nth(self.start).unwrap_or(s.len());
        let end = s
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(s.len()))
            .nth(self.end)
            .unwrap_or(s.len());
        &s[begin..end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenClass {
    Word,
    /// Starts with a digit, e.g. `100m`, `1,460`, `2009`.
    Number,
    /// Comparison symbol: `<`, `>`, `<=`, `>=`, `=`, `!=`.
    Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Lowercased token text.
    pub text: String,
    pub span: Span,
    pub class: TokenClass,
}

/// Splits on whitespace and punctuation, lowercasing. Decimal points,
/// thousands separators and hyphens between digits stay inside numbers so
/// `1,460`, `2.5K` and `2009-05-01` are single tokens.
pub fn tokenize(input: &str) -> Vec<Token> {
    let chars: Vec<char> = input.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            let start = i;
            i += 1;
            while i < chars.len() {
                let d = chars[i];
                if d.is_alphanumeric() {
                    i += 1;
                } else if matches!(d, '.' | ',' | '-')
                    && chars[i - 1].is_ascii_digit()
                    && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
                {
                    i += 2;
                } else {
                    break;
                }
            }
            let raw: String = chars[start..i].iter().collect();
            let class = if c.is_ascii_digit() { TokenClass::Number } else { TokenClass::Word };
            tokens.push(Token {
                text: raw.to_lowercase(),
                span: Span::new(start, i),
                class,
            });
        } else if matches!(c, '<' | '>' | '=' | '!') {
            let start = i;
            let two = chars.get(i + 1) == Some(&'=');
            if c == '!' && !two {
                i += 1;
                continue;
            }
            i += if two { 2 } else { 1 };
            tokens.push(Token {
                text: chars[start..i].iter().collect(),
                span: Span::new(start, i),
                class: TokenClass::Symbol,
            });
        } else {
            i += 1;
        }
    }
    tokens
}

/// Canonical matching form of a phrase: its tokens joined by single spaces.
pub fn normalize(phrase: &str) -> String {
    tokenize(phrase)
        .into_iter()
        .map(|t| t.text)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Function words and query filler that never carry attribute, task or
/// encoding meaning on their own.
pub const STOPWORDS: &[&str] = &[
    "a", "about", "all", "also", "am", "an", "and", "any", "are", "as", "at", "be", "been", "both",
    "can", "chart", "could", "data", "dataset", "did", "display", "do", "does", "draw", "entries",
    "entry", "find", "for", "from", "get", "give", "graph", "has", "have", "how", "i", "if", "in",
    "into", "is", "it", "items", "its", "let", "like", "list", "me", "my", "of", "on", "or", "our",
    "please", "plot", "records", "rows", "see", "show", "tell", "that", "the", "their", "them",
    "there", "these", "this", "those", "to", "us", "value", "values", "versus", "visualize", "vs",
    "want", "was", "we", "were", "what", "which", "who", "whose", "with", "would", "you", "your",
];

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.binary_search(&word).is_ok()
}

/// Levenshtein distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            cur[j + 1] = substitution.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Whether `distance` is within the closeness threshold
/// `0.2 * len(compared)` (compared in characters, no flooring).
pub fn within_threshold(distance: usize, compared: &str) -> bool {
    5 * distance <= compared.chars().count()
}

/// Edit distance of `token` to `compared` (both already lowercased) when it is
/// within the closeness threshold.
pub fn fuzzy_distance(token: &str, compared: &str) -> Option<usize> {
    let len_gap = token.chars().count().abs_diff(compared.chars().count());
    if !within_threshold(len_gap, compared) {
        return None;
    }
    let d = edit_distance(token, compared);
    within_threshold(d, compared).then_some(d)
}
