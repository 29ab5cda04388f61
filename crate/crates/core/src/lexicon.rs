//! Keyword phrases recognised in queries.
//!
//! All phrases are stored in normalized form (see [`crate::text::normalize`]).
//! Matching is longest-first, so "no less than" wins over "less than".

use crate::spec::{AggFn, FilterOp, Mark};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    /// Comparison operator. `temporal` operators only bind to temporal
    /// attributes.
    Operator { op: FilterOp, temporal: bool },
    Aggregate(AggFn),
    Extremum(AggFn),
    Correlation,
    Grouping,
    Trend,
    Chart { mark: Mark, histogram: bool },
}

const PHRASES: &[(&str, Keyword)] = &[
    ("no less than", op(FilterOp::Gte)),
    ("no fewer than", op(FilterOp::Gte)),
    ("at least", op(FilterOp::Gte)),
    (">=", op(FilterOp::Gte)),
    ("no more than", op(FilterOp::Lte)),
    ("at most", op(FilterOp::Lte)),
    ("<=", op(FilterOp::Lte)),
    ("more than", op(FilterOp::Gt)),
    ("greater than", op(FilterOp::Gt)),
    ("over", op(FilterOp::Gt)),
    ("above", op(FilterOp::Gt)),
    (">", op(FilterOp::Gt)),
    ("less than", op(FilterOp::Lt)),
    ("fewer than", op(FilterOp::Lt)),
    ("under", op(FilterOp::Lt)),
    ("below", op(FilterOp::Lt)),
    ("<", op(FilterOp::Lt)),
    ("not equal to", op(FilterOp::Neq)),
    ("!=", op(FilterOp::Neq)),
    ("equal to", op(FilterOp::Eq)),
    ("equals", op(FilterOp::Eq)),
    ("=", op(FilterOp::Eq)),
    ("between", op(FilterOp::Between)),
    ("after", temporal(FilterOp::Gt)),
    ("since", temporal(FilterOp::Gt)),
    ("before", temporal(FilterOp::Lt)),
    ("average", Keyword::Aggregate(AggFn::Mean)),
    ("mean", Keyword::Aggregate(AggFn::Mean)),
    ("total", Keyword::Aggregate(AggFn::Sum)),
    ("sum", Keyword::Aggregate(AggFn::Sum)),
    ("how many", Keyword::Aggregate(AggFn::Count)),
    ("number of", Keyword::Aggregate(AggFn::Count)),
    ("count", Keyword::Aggregate(AggFn::Count)),
    ("highest", Keyword::Extremum(AggFn::Max)),
    ("maximum", Keyword::Extremum(AggFn::Max)),
    ("max", Keyword::Extremum(AggFn::Max)),
    ("most", Keyword::Extremum(AggFn::Max)),
    ("lowest", Keyword::Extremum(AggFn::Min)),
    ("minimum", Keyword::Extremum(AggFn::Min)),
    ("min", Keyword::Extremum(AggFn::Min)),
    ("relationship between", Keyword::Correlation),
    ("relationship", Keyword::Correlation),
    ("correlation", Keyword::Correlation),
    ("correlate", Keyword::Correlation),
    ("correlated", Keyword::Correlation),
    ("group by", Keyword::Grouping),
    ("grouped by", Keyword::Grouping),
    ("in each", Keyword::Grouping),
    ("for each", Keyword::Grouping),
    ("distribution of", Keyword::Grouping),
    ("distribution", Keyword::Grouping),
    ("across", Keyword::Grouping),
    ("per", Keyword::Grouping),
    ("by", Keyword::Grouping),
    ("over time", Keyword::Trend),
    ("trend", Keyword::Trend),
    ("bar chart", chart(Mark::Bar)),
    ("bar graph", chart(Mark::Bar)),
    ("scatter plot", chart(Mark::Point)),
    ("scatterplot", chart(Mark::Point)),
    ("line chart", chart(Mark::Line)),
    ("line graph", chart(Mark::Line)),
    ("pie chart", chart(Mark::Arc)),
    ("histogram", Keyword::Chart { mark: Mark::Bar, histogram: true }),
];

const fn op(op: FilterOp) -> Keyword {
    Keyword::Operator { op, temporal: false }
}

const fn temporal(op: FilterOp) -> Keyword {
    Keyword::Operator { op, temporal: true }
}

const fn chart(mark: Mark) -> Keyword {
    Keyword::Chart { mark, histogram: false }
}

/// Longest phrase length in tokens.
pub const MAX_PHRASE_TOKENS: usize = 3;

pub fn lookup(phrase: &str) -> Option<Keyword> {
    PHRASES.iter().find(|(p, _)| *p == phrase).map(|(_, k)| *k)
}

pub fn is_keyword(phrase: &str) -> bool {
    lookup(phrase).is_some()
}

/// Phrases that express a comparison operator, most natural first.
pub fn operator_phrases(op: FilterOp) -> Vec<&'static str> {
    PHRASES
        .iter()
        .filter(|(p, k)| {
            matches!(k, Keyword::Operator { op: o, temporal: false } if *o == op)
                && p.chars().next().is_some_and(char::is_alphabetic)
        })
        .map(|(p, _)| *p)
        .collect()
}

/// Phrases that request an aggregation function.
pub fn aggregate_phrases(agg: AggFn) -> Vec<&'static str> {
    PHRASES
        .iter()
        .filter(|(_, k)| matches!(k, Keyword::Aggregate(a) | Keyword::Extremum(a) if *a == agg))
        .map(|(p, _)| *p)
        .collect()
}

/// The canonical phrase requesting `mark`, if the mark can be requested.
pub fn chart_phrase(mark: Mark) -> Option<&'static str> {
    PHRASES
        .iter()
        .find(|(_, k)| matches!(k, Keyword::Chart { mark: m, histogram: false } if *m == mark))
        .map(|(p, _)| *p)
}
