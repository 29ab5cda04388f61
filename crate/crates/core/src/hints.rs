//! Hints: rule-based ones diagnose a query and its result, interaction-based
//! ones teach the query wording that would have produced a widget edit.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::examples::QueryExample;
use crate::interpret::{Inference, Interpretation};
use crate::lexicon::{aggregate_phrases, chart_phrase, operator_phrases};
use crate::provenance::{values_before_filter, ProvenanceTrace, StepOp};
use crate::spec::{ChartSpec, FilterOp};
use crate::synthesize::{apply_adjustment, encoded_kinds, suitable_marks, synthesize, Adjustment};
use crate::text::Span;
use crate::value::{AttributeKind, Value};

/// Message of the empty-result hint, shown verbatim.
pub const EMPTY_RESULT_MESSAGE: &str = "No records satisfy the filter criteria.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HintKind {
    UnusedKeyword,
    Misspelling,
    AttributeAmbiguity,
    EmptyResult,
    UnsuitableEncoding,
    FailureOfInference,
    UnexpectedDependency,
    UnexpectedAttributeType,
    UnexpectedTaskType,
    FilterRevision,
    ExplicitMarkSuggestion,
}

impl HintKind {
    /// Position in the rule-based hint list; lower shows first.
    fn severity_rank(self) -> u8 {
        match self {
            HintKind::EmptyResult => 0,
            HintKind::Misspelling => 1,
            HintKind::AttributeAmbiguity => 2,
            HintKind::UnusedKeyword => 3,
            HintKind::UnsuitableEncoding => 4,
            _ => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hint {
    pub kind: HintKind,
    pub message: String,
    pub spans: Vec<Span>,
    pub suggestions: Vec<String>,
    pub examples: Vec<QueryExample>,
}

impl Hint {
    fn new(kind: HintKind, message: impl Into<String>) -> Hint {
        Hint { kind, message: message.into(), spans: Vec::new(), suggestions: Vec::new(), examples: Vec::new() }
    }

    fn spans(mut self, spans: Vec<Span>) -> Hint {
        self.spans = spans;
        self
    }

    fn suggest<S: Into<String>>(mut self, s: impl IntoIterator<Item = S>) -> Hint {
        self.suggestions.extend(s.into_iter().map(Into::into));
        self
    }
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

/// Hints about the query and its result, most severe first.
pub fn rule_based_hints(interp: &Interpretation, spec: &ChartSpec, trace: &ProvenanceTrace, dataset: &Dataset) -> Vec<Hint> {
    let q = &interp.query;
    let mut hints = Vec::new();

    for span in &interp.unparsed_keywords {
        let word = span.slice(q);
        hints.push(
            Hint::new(HintKind::UnusedKeyword, format!("{} was not used to create the chart.", quote(word)))
                .spans(vec![*span])
                .suggest(["Rephrase it with attribute names or supported keywords."]),
        );
    }

    for r in &interp.attribute_refs {
        let exact = r.spans.iter().any(|s| !r.fuzzy.iter().any(|f| f.span == *s));
        if exact {
            continue;
        }
        for f in r.fuzzy.iter().filter(|f| f.distance > 0) {
            let mut suggestions = vec![f.compared.clone()];
            if f.compared != r.attribute {
                suggestions.push(r.attribute.clone());
            }
            hints.push(
                Hint::new(
                    HintKind::Misspelling,
                    format!("{} was read as {}. Check the spelling.", quote(&f.token), quote(&r.attribute)),
                )
                .spans(vec![f.span])
                .suggest(suggestions),
            );
        }
    }

    for r in interp.attribute_refs.iter().filter(|r| r.inference == Inference::Ambiguous) {
        let word = r.spans.first().map_or("", |s| s.slice(q));
        hints.push(
            Hint::new(
                HintKind::AttributeAmbiguity,
                format!(
                    "{} may refer to {}. {} was chosen.",
                    quote(word),
                    r.candidates.join(" or "),
                    r.attribute
                ),
            )
            .spans(r.spans.clone())
            .suggest(r.candidates.iter().cloned()),
        );
    }

    if let Some(at) = trace.steps.iter().position(|s| s.output_count == 0) {
        let mut hint = Hint::new(HintKind::EmptyResult, EMPTY_RESULT_MESSAGE);
        let step = &trace.steps[at];
        if step.op == StepOp::Filter {
            // Filter steps follow the single load step.
            let index = at - 1;
            if let (Some(field), Ok(values)) = (&step.column, values_before_filter(spec, dataset, index)) {
                hint = hint.suggest(range_suggestion(field, &values, dataset));
                hint.spans = filter_spans(interp, field);
            }
        }
        hints.push(hint);
    }

    if interp.encoding_intent.explicit {
        let fits = suitable_marks(&encoded_kinds(spec));
        if !fits.contains(&spec.mark) {
            let mut hint = Hint::new(
                HintKind::UnsuitableEncoding,
                format!("A {} does not suit the chosen attributes.", spec.mark.chart_name()),
            )
            .spans(interp.encoding_intent.spans.clone());
            if let Some(m) = fits.first() {
                hint = hint.suggest([format!("Use a {} instead.", chart_phrase(*m).unwrap_or(m.chart_name()))]);
            }
            hints.push(hint);
        }
    }

    hints.sort_by_key(|h| h.kind.severity_rank());
    hints
}

fn filter_spans(interp: &Interpretation, field: &str) -> Vec<Span> {
    interp
        .tasks
        .iter()
        .filter(|t| t.kind == crate::interpret::TaskKind::Filter && t.names(field))
        .flat_map(|t| t.spans.iter().copied())
        .collect()
}

fn range_suggestion(field: &str, values: &[Value], dataset: &Dataset) -> Vec<String> {
    let kind = dataset.kind_of(field).unwrap_or(AttributeKind::Nominal);
    match (kind, values) {
        (_, []) => vec![format!("{field} has no values left to filter.")],
        (AttributeKind::Quantitative | AttributeKind::Temporal, [lo, hi]) => {
            vec![format!("{field} ranges from {lo} to {hi} before this filter.")]
        }
        (AttributeKind::Quantitative | AttributeKind::Temporal, [v]) => {
            vec![format!("{field} is {v} for every record before this filter.")]
        }
        _ => {
            let shown: Vec<String> = values.iter().take(5).map(Value::to_string).collect();
            let more = if values.len() > 5 { ", ..." } else { "" };
            vec![format!("{field} takes the values {}{more} before this filter.", shown.join(", "))]
        }
    }
}

fn ref_of<'a>(interp: &'a Interpretation, field: &str) -> Vec<&'a crate::interpret::AttributeRef> {
    interp.attribute_refs.iter().filter(|r| r.attribute == field).collect()
}

/// Hints derived from a widget edit. `after` must be the result of applying
/// `adj` to `before`.
pub fn interaction_hints(
    before: &ChartSpec,
    adj: &Adjustment,
    after: &ChartSpec,
    interp: &Interpretation,
    dataset: &Dataset,
) -> Result<Vec<Hint>> {
    let expected = apply_adjustment(before, adj, dataset, Some(interp)).map_err(|_| Error::InconsistentDelta)?;
    let after = after.conform(dataset).map_err(|_| Error::InconsistentDelta)?;
    if expected != after {
        return Err(Error::InconsistentDelta);
    }
    let before = before.conform(dataset)?;
    let mut hints = Vec::new();
    match adj {
        Adjustment::AddAttribute { field } => {
            let field = dataset.canonical_name(field)?;
            let refs = ref_of(interp, field);
            if refs.is_empty() {
                hints.push(
                    Hint::new(
                        HintKind::FailureOfInference,
                        format!("{field} was not found in the query. Mention the attribute explicitly."),
                    )
                    .suggest([field.to_string()]),
                );
            } else {
                hints.push(
                    Hint::new(
                        HintKind::UnexpectedDependency,
                        format!("{field} was read from the query but not shown. Try rephrasing the sentence."),
                    )
                    .spans(refs.iter().flat_map(|r| r.spans.iter().copied()).collect())
                    .suggest([field.to_string()]),
                );
            }
        }
        Adjustment::RemoveAttribute { field } => {
            let field = dataset.canonical_name(field)?;
            let implicit: Vec<Span> = ref_of(interp, field)
                .into_iter()
                .filter(|r| r.inference == Inference::Implicit)
                .flat_map(|r| r.spans.iter().copied())
                .collect();
            if !implicit.is_empty() {
                let words: Vec<String> = implicit.iter().map(|s| quote(s.slice(&interp.query))).collect();
                hints.push(
                    Hint::new(
                        HintKind::UnexpectedAttributeType,
                        format!(
                            "{} was treated as a value of {field}. Avoid these words in the query.",
                            words.join(", ")
                        ),
                    )
                    .spans(implicit),
                );
            }
        }
        Adjustment::ChangeAggregate { channel, agg_fn } => {
            let label = after.encodings.get(channel).map(|e| e.label()).unwrap_or_default();
            let phrases = aggregate_phrases(*agg_fn);
            let lead = phrases.first().copied().unwrap_or(agg_fn.as_str());
            hints.push(
                Hint::new(
                    HintKind::UnexpectedTaskType,
                    format!("To show {label}, add related words such as {} to the query.", quote(lead)),
                )
                .suggest(phrases),
            );
        }
        Adjustment::AddFilter { .. } | Adjustment::ModifyFilter { .. } => {
            let index = match adj {
                Adjustment::ModifyFilter { index, .. } => *index,
                _ => after.filters().count() - 1,
            };
            if let Some(f) = after.filters().nth(index) {
                let op = f.predicate.op();
                let temporal = dataset.kind_of(&f.field).is_ok_and(|k| k == AttributeKind::Temporal);
                let mut phrases = operator_phrases(op);
                if temporal {
                    match op {
                        FilterOp::Gt => phrases.insert(0, "after"),
                        FilterOp::Lt => phrases.insert(0, "before"),
                        _ => {}
                    }
                }
                if op == FilterOp::OneOf || (op == FilterOp::Eq && dataset.kind_of(&f.field).is_ok_and(|k| k.is_categorical())) {
                    phrases.push("for");
                }
                let lead = phrases.first().map(|p| format!(" such as {}", quote(p))).unwrap_or_default();
                hints.push(
                    Hint::new(
                        HintKind::FilterRevision,
                        format!("To filter {} {}, use phrases{lead}.", f.field, f.predicate.describe()),
                    )
                    .spans(filter_spans(interp, &f.field))
                    .suggest(phrases),
                );
            }
        }
        Adjustment::ChangeMark { mark } => {
            let mut plain = interp.clone();
            plain.encoding_intent.mark_request = None;
            plain.encoding_intent.explicit = false;
            let default = synthesize(&plain, dataset).map(|s| s.mark).unwrap_or(before.mark);
            if *mark != default {
                let phrase = chart_phrase(*mark);
                let mut hint = Hint::new(
                    HintKind::ExplicitMarkSuggestion,
                    format!("Ask for a {} in the query to get this chart directly.", mark.chart_name()),
                );
                if let Some(p) = phrase {
                    hint = hint.suggest([p]);
                }
                hints.push(hint);
            }
        }
        Adjustment::RemoveFilter { .. } | Adjustment::ResolveAmbiguity { .. } | Adjustment::SwapChannels { .. } => {}
    }
    Ok(hints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpret::{interpret, PreferenceStore};
    use crate::provenance::build_trace;
    use crate::spec::{AggFn, Channel, Mark};

    fn movies() -> Dataset {
        let headers = ["Title", "Worldwide Gross", "Production Budget", "Release Year", "Content Rating", "Genre", "IMDB Rating"];
        let rows = [
            ["High Crimes", "63000000", "42000000", "2002", "PG-13", "Thriller", "6.1"],
            ["Spider-Man", "821000000", "139000000", "2002", "PG-13", "Super Hero", "7.3"],
            ["Small Movie", "1000000", "2000000", "2005", "R", "Drama", "6.8"],
            ["Big Comedy", "300000000", "90000000", "2008", "PG", "Comedy", "6.0"],
        ];
        Dataset::from_rows(
            "movies",
            headers.iter().map(|h| h.to_string()).collect(),
            rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect(),
        )
        .unwrap()
    }

    fn run(q: &str, ds: &Dataset) -> (Interpretation, ChartSpec, Vec<Hint>) {
        let interp = interpret(q, ds, &PreferenceStore::new()).unwrap();
        let spec = synthesize(&interp, ds).unwrap();
        let trace = build_trace(&spec, ds).unwrap();
        let hints = rule_based_hints(&interp, &spec, &trace, ds);
        (interp, spec, hints)
    }

    fn kinds(hints: &[Hint]) -> Vec<HintKind> {
        hints.iter().map(|h| h.kind).collect()
    }

    #[test]
    fn unused_keyword() {
        let ds = movies();
        let (interp, _, hints) = run("show Worldwide Gross at least", &ds);
        let h = hints.iter().find(|h| h.kind == HintKind::UnusedKeyword).unwrap();
        assert_eq!(h.spans[0].slice(&interp.query), "at least");
    }

    #[test]
    fn misspelling() {
        let ds = movies();
        let (interp, _, hints) = run("show budgt and genre", &ds);
        let h = hints.iter().find(|h| h.kind == HintKind::Misspelling).unwrap();
        assert_eq!(h.spans[0].slice(&interp.query), "budgt");
        assert!(h.suggestions.contains(&"Budget".to_string()));
    }

    #[test]
    fn ambiguity_and_ordering() {
        let ds = movies();
        let (_, _, hints) = run("show the rating and box office", &ds);
        let ks = kinds(&hints);
        assert!(ks.contains(&HintKind::AttributeAmbiguity));
        assert!(ks.contains(&HintKind::UnusedKeyword));
        let ranks: Vec<u8> = hints.iter().map(|h| h.kind.severity_rank()).collect();
        assert!(ranks.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn empty_result() {
        let ds = movies();
        let (interp, _, hints) = run("show Worldwide Gross and IMDB Rating released after 2009", &ds);
        assert_eq!(hints[0].kind, HintKind::EmptyResult);
        assert_eq!(hints[0].message, EMPTY_RESULT_MESSAGE);
        assert_eq!(hints[0].suggestions, ["Release Year ranges from 2002 to 2008 before this filter."]);
        assert!(!hints[0].spans.is_empty());
        let _ = interp;
    }

    #[test]
    fn unsuitable_mark() {
        let ds = movies();
        let (_, spec, hints) = run("show Worldwide Gross and Production Budget in a bar chart", &ds);
        assert_eq!(spec.mark, Mark::Bar);
        let h = hints.iter().find(|h| h.kind == HintKind::UnsuitableEncoding).unwrap();
        assert_eq!(h.suggestions, ["Use a scatter plot instead."]);
        let (_, _, fine) = run("show Worldwide Gross and Production Budget in a scatter plot", &ds);
        assert!(!kinds(&fine).contains(&HintKind::UnsuitableEncoding));
    }

    fn interact(q: &str, adj: Adjustment) -> Vec<Hint> {
        let ds = movies();
        let interp = interpret(q, &ds, &PreferenceStore::new()).unwrap();
        let before = synthesize(&interp, &ds).unwrap();
        let after = apply_adjustment(&before, &adj, &ds, Some(&interp)).unwrap();
        interaction_hints(&before, &adj, &after, &interp, &ds).unwrap()
    }

    #[test]
    fn aggregate_change_suggests_total() {
        let hints = interact(
            "show average Worldwide Gross by Genre",
            Adjustment::ChangeAggregate { channel: Channel::Y, agg_fn: AggFn::Sum },
        );
        assert_eq!(hints.len(), 1);
        assert_eq!(hints[0].kind, HintKind::UnexpectedTaskType);
        assert!(hints[0].suggestions.contains(&"total".to_string()));
    }

    #[test]
    fn swap_is_silent() {
        let hints = interact(
            "show Worldwide Gross and Production Budget by IMDB Rating",
            Adjustment::SwapChannels { a: Channel::X, b: Channel::Y },
        );
        assert!(hints.is_empty());
    }

    #[test]
    fn implicit_removal() {
        let q = "show low budget and high gross movies";
        let hints = interact(q, Adjustment::RemoveAttribute { field: "Title".into() });
        assert_eq!(hints[0].kind, HintKind::UnexpectedAttributeType);
        assert_eq!(hints[0].spans[0].slice(q), "high");
    }

    #[test]
    fn attribute_additions() {
        let hints = interact("show Worldwide Gross by Genre", Adjustment::AddAttribute { field: "Content Rating".into() });
        assert_eq!(kinds(&hints), [HintKind::FailureOfInference]);
    }

    #[test]
    fn filter_revision_and_mark() {
        let hints = interact(
            "show Worldwide Gross by Genre",
            Adjustment::AddFilter { field: "Production Budget".into(), operator: FilterOp::Gt, operands: vec![Value::Number(1e8)] },
        );
        assert_eq!(hints[0].kind, HintKind::FilterRevision);
        assert!(hints[0].suggestions.contains(&"over".to_string()));
        let hints = interact("show Worldwide Gross by Genre", Adjustment::ChangeMark { mark: Mark::Tick });
        assert_eq!(kinds(&hints), [HintKind::ExplicitMarkSuggestion]);
        let hints = interact("show Worldwide Gross by Genre", Adjustment::ChangeMark { mark: Mark::Bar });
        assert!(hints.is_empty());
    }

    #[test]
    fn inconsistent_delta() {
        let ds = movies();
        let interp = interpret("show Worldwide Gross by Genre", &ds, &PreferenceStore::new()).unwrap();
        let before = synthesize(&interp, &ds).unwrap();
        let adj = Adjustment::ChangeMark { mark: Mark::Tick };
        assert_eq!(interaction_hints(&before, &adj, &before, &interp, &ds), Err(Error::InconsistentDelta));
    }
}
