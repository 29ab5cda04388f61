//! Template-based query examples, kept only when the interpreter maps them
//! back to the chart they were generated from.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::interpret::{interpret, PreferenceStore};
use crate::lexicon::chart_phrase;
use crate::spec::{AggFn, Channel, ChartSpec, Encoding, FilterOp, FilterTransform, Mark, Transform};
use crate::synthesize::synthesize;
use crate::value::{format_number, AttributeKind, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryExample {
    pub text: String,
    pub target_spec: ChartSpec,
    pub validated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Examples {
    pub valid: Vec<QueryExample>,
    pub recommended: QueryExample,
}

/// Renders a number the way people type it: whole millions and billions
/// get an M or B suffix.
pub fn render_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() >= 1e6 {
        if n % 1e9 == 0.0 {
            return format!("{}B", format_number(n / 1e9));
        }
        if n % 1e6 == 0.0 {
            return format!("{}M", format_number(n / 1e6));
        }
    }
    format_number(n)
}

fn render_value(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(render_number(*n)),
        Value::Timestamp(t) if t.is_year_only() => Some(t.year().to_string()),
        Value::Text(s) => Some(s.clone()),
        _ => None,
    }
}

fn agg_word(agg: AggFn) -> &'static str {
    match agg {
        AggFn::Mean => "average",
        AggFn::Sum => "total",
        AggFn::Min => "minimum",
        AggFn::Max => "maximum",
        AggFn::Count => "number of",
    }
}

/// Comma list with a final "and".
fn and_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

struct Shape<'a> {
    x: Option<&'a Encoding>,
    extra: Vec<&'a Encoding>,
}

fn field(e: Option<&Encoding>) -> Option<&str> {
    e.and_then(|e| e.field.as_deref())
}

fn is_count(e: Option<&Encoding>) -> bool {
    e.is_some_and(|e| e.aggregate == Some(AggFn::Count))
}

/// Main clauses describing the encodings, before filters and chart type.
fn core_phrases(spec: &ChartSpec, entity: &str) -> Vec<String> {
    let s = Shape {
        x: spec.encodings.get(&Channel::X),
        extra: [Channel::Color, Channel::Size].iter().filter_map(|c| spec.encodings.get(c)).collect(),
    };
    let mut out = Vec::new();

    // Raw fields across every channel.
    let raw: Vec<String> = spec
        .encodings
        .values()
        .filter(|e| e.aggregate.is_none())
        .filter_map(|e| e.field.clone())
        .collect();
    let measure = spec.encodings.values().find(|e| e.aggregate.is_some());

    match (measure, s.x.is_some_and(|e| e.bin)) {
        (None, _) => {
            if raw.len() >= 2 {
                let (a, b) = (&raw[0], &raw[1]);
                out.push(format!("How are {a} and {b} correlated"));
                out.push(format!("What is the relationship between {a} and {b}"));
                out.push(format!("Show {a} and {b}"));
                if let [_, _, rest @ ..] = raw.as_slice() {
                    if !rest.is_empty() {
                        let tail = and_list(rest);
                        for base in out.clone() {
                            out.push(format!("{base} by {tail}"));
                            out.push(format!("{base} across {tail}"));
                        }
                        out.push(format!("Show {}", and_list(&raw)));
                    }
                }
            } else if let Some(a) = raw.first() {
                out.push(format!("Show {a}"));
            }
        }
        (Some(_), true) => {
            if let Some(q) = field(s.x) {
                out.push(format!("What is the distribution of {q}"));
                out.push(format!("Show a histogram of {q}"));
                out.push(format!("Show the distribution of {q}"));
            }
        }
        (Some(m), false) => {
            let dims: Vec<String> = [s.x]
                .into_iter()
                .chain(s.extra.iter().copied().map(Some))
                .filter(|e| e.is_some_and(|e| e.aggregate.is_none()))
                .filter_map(field)
                .map(str::to_string)
                .collect();
            let group = and_list(&dims);
            if is_count(Some(m)) {
                if dims.is_empty() {
                    out.push(format!("How many {entity} are there"));
                    out.push(format!("Show the number of {entity}"));
                } else {
                    out.push(format!("How many {entity} in each {group}"));
                    out.push(format!("Show the number of {entity} by {group}"));
                    out.push(format!("Count {entity} by {group}"));
                    out.push(format!("What is the distribution of {group}"));
                    out.push(format!("Show the number of {entity} over {group}"));
                }
            } else if let (Some(agg), Some(q)) = (m.aggregate, m.field.as_deref()) {
                let w = agg_word(agg);
                if dims.is_empty() {
                    out.push(format!("What is the {w} {q}"));
                    out.push(format!("Show the {w} {q}"));
                } else {
                    out.push(format!("Show {w} {q} by {group}"));
                    out.push(format!("What is the {w} {q} across {group}"));
                    out.push(format!("Show {q} by {group}"));
                    out.push(format!("Show the trend of {q} across {group}"));
                    out.push(format!("Show the {w} {q} for each {group}"));
                }
            }
        }
    }
    out
}

/// Filter text segments, in filter order.  Each filter yields one or more
/// alternative renderings; `true` marks a "whose" clause.
fn filter_segments(filter: &FilterTransform, dataset: &Dataset, entity: &str) -> Vec<(String, bool)> {
    let kind = dataset.kind_of(&filter.field).unwrap_or(AttributeKind::Nominal);
    let ops = filter.predicate.operands();
    let Some(values) = ops.iter().map(render_value).collect::<Option<Vec<_>>>() else {
        return Vec::new();
    };
    let f = &filter.field;
    let mut out = Vec::new();
    let temporal = kind == AttributeKind::Temporal;
    match filter.predicate.op() {
        FilterOp::Eq if kind.is_categorical() => {
            out.push((format!("for {} {entity}", values[0]), false));
            out.push((format!("{f} is equal to {}", values[0]), true));
        }
        FilterOp::OneOf => {
            out.push((format!("for {} {entity}", and_list(&values)), false));
        }
        FilterOp::Between => {
            out.push((format!("{f} is between {} and {}", values[0], values[1]), true));
        }
        op => {
            let words: &[&str] = match (op, temporal) {
                (FilterOp::Gt, true) => &["after", "over"],
                (FilterOp::Lt, true) => &["before", "under"],
                (FilterOp::Gt, false) => &["over", "more than"],
                (FilterOp::Lt, false) => &["under", "less than"],
                (FilterOp::Gte, _) => &["at least"],
                (FilterOp::Lte, _) => &["at most"],
                (FilterOp::Eq, _) => &["equal to"],
                (FilterOp::Neq, _) => &["not equal to"],
                _ => &[],
            };
            for w in words {
                out.push((format!("{f} is {w} {}", values[0]), true));
            }
        }
    }
    out
}

/// All ways to render the filters, as text appended to a core phrase.
fn filter_tails(spec: &ChartSpec, dataset: &Dataset, entity: &str) -> Vec<String> {
    let mut tails: Vec<(String, bool)> = vec![(String::new(), false)];
    for f in spec.filters() {
        let segs = filter_segments(f, dataset, entity);
        if segs.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::new();
        for (tail, in_clause) in &tails {
            for (seg, clause) in &segs {
                let joint = match (clause, in_clause) {
                    (true, true) => " and ",
                    (true, false) => " whose ",
                    (false, _) => " ",
                };
                next.push((format!("{tail}{joint}{seg}"), *clause));
            }
        }
        // Keep the candidate pool bounded for specs with many filters.
        next.truncate(16);
        tails = next;
    }
    tails.into_iter().map(|(t, _)| t).collect()
}

fn candidates(spec: &ChartSpec, dataset: &Dataset) -> Vec<String> {
    let entity = dataset.entity_noun();
    let tails = filter_tails(spec, dataset, &entity);
    let chart = chart_phrase(spec.mark);
    let mut out = Vec::new();
    for core in core_phrases(spec, &entity) {
        let question = core.starts_with("How are") || core.starts_with("What");
        for tail in &tails {
            let mut variants = vec![format!("{core}{tail}")];
            if let Some(c) = chart {
                variants.push(format!("{core}{tail} in a {c}"));
                variants.push(format!("{core} in {c}{tail}"));
            }
            for v in variants {
                let text = if question { format!("{v}?") } else { v };
                if !out.contains(&text) {
                    out.push(text);
                }
            }
        }
    }
    out
}

/// Whether `text` reproduces `target` through the interpreter with no
/// learned preferences.
pub fn discriminate(text: &str, target: &ChartSpec, dataset: &Dataset) -> bool {
    let prefs = PreferenceStore::new();
    let Ok(interp) = interpret(text, dataset, &prefs) else { return false };
    let Ok(spec) = synthesize(&interp, dataset) else { return false };
    spec.equivalent(target)
}

/// Generates query examples for `target` and recommends one by a seeded
/// uniform draw over the validated candidates.
pub fn generate_examples(target: &ChartSpec, dataset: &Dataset, seed: u64) -> Result<Examples> {
    let target = target.conform(dataset)?;
    let valid: Vec<QueryExample> = candidates(&target, dataset)
        .into_iter()
        .filter(|t| discriminate(t, &target, dataset))
        .map(|text| QueryExample { text, target_spec: target.clone(), validated: true })
        .collect();
    if valid.is_empty() {
        return Err(Error::NoValidExample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let recommended = valid[rng.gen_range(0..valid.len())].clone();
    Ok(Examples { valid, recommended })
}

/// Bins the chart mentions, for callers that need to know whether a target
/// is a histogram.
pub fn is_histogram(spec: &ChartSpec) -> bool {
    spec.mark == Mark::Bar && spec.transforms.iter().any(|t| matches!(t, Transform::Bin { .. }))
}
