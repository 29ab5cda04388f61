//! Query interpretation: maps a natural-language query onto attributes,
//! analytic tasks and an encoding intent, keeping the query spans that
//! triggered each of them.
//!
//! The interpreter is lexical. Matching runs in four passes over the token
//! stream:
//!
//! 1. longest-match scan for exact attribute names, lexicon keywords and
//!    whole categorical cell values (in that priority order at equal length);
//! 2. fuzzy matching of the leftover words against attribute names and the
//!    words of attribute names;
//! 3. word-in-value matching of the remaining words against categorical
//!    cells, which yields implicit filters;
//! 4. task extraction, binding each keyword to the nearest suitable mention.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::lexicon::{self, Keyword};
use crate::spec::{AggFn, FilterOp, Mark, Predicate};
use crate::text::{self, Span, Token, TokenClass};
use crate::value::{parse_plain_number, AttributeKind, Timestamp, Value};

/// Upper bound on the n-gram length tried by the exact scan.
const MAX_SCAN_TOKENS: usize = 8;

/// Shortest word used for word-in-value matching.
const MIN_VALUE_WORD_CHARS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Inference {
    Explicit,
    Implicit,
    Ambiguous,
    Default,
}

/// A query word that matched an attribute only approximately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FuzzyMatch {
    pub span: Span,
    pub token: String,
    /// The attribute name or name word it was compared to, original case.
    pub compared: String,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttributeRef {
    pub attribute: String,
    pub candidates: Vec<String>,
    pub inference: Inference,
    pub spans: Vec<Span>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fuzzy: Vec<FuzzyMatch>,
}

impl AttributeRef {
    fn first_start(&self) -> usize {
        self.spans.iter().map(|s| s.start).min().unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    Filter,
    Aggregate,
    Correlation,
    Distribution,
    Trend,
    Extremum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskRef {
    pub kind: TaskKind,
    /// Attributes the task applies to: one for most tasks, two for
    /// correlations, none for a plain record count.
    pub attributes: Vec<String>,
    /// Filter condition (filters only), flattened to `operator`/`operands`.
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<Predicate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agg_fn: Option<AggFn>,
    pub inference: Inference,
    pub spans: Vec<Span>,
}

impl TaskRef {
    fn same_task(&self, other: &TaskRef) -> bool {
        self.kind == other.kind
            && self.attributes == other.attributes
            && self.predicate == other.predicate
            && self.agg_fn == other.agg_fn
    }

    fn first_start(&self) -> usize {
        self.spans.iter().map(|s| s.start).min().unwrap_or(usize::MAX)
    }

    pub fn names(&self, attribute: &str) -> bool {
        self.attributes.iter().any(|a| a == attribute)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EncodingIntent {
    pub mark_request: Option<Mark>,
    pub explicit: bool,
    /// The request named a histogram rather than a plain bar chart.
    #[serde(default)]
    pub histogram: bool,
    pub spans: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Interpretation {
    pub query: String,
    pub attribute_refs: Vec<AttributeRef>,
    pub tasks: Vec<TaskRef>,
    pub encoding_intent: EncodingIntent,
    pub unparsed_keywords: Vec<Span>,
}

impl Interpretation {
    /// Attributes that end up on encoding channels, in mention order, with
    /// their kinds.
    ///
    /// A mentioned attribute is encoded unless every mention of it is part of
    /// a filter and no other task names it; "budget under 100M" restricts the
    /// data without asking to see the budget.
    pub fn encoded_attributes(&self, dataset: &Dataset) -> Vec<(String, AttributeKind)> {
        let filter_spans: Vec<Span> = self
            .tasks
            .iter()
            .filter(|t| t.kind == TaskKind::Filter)
            .flat_map(|t| t.spans.iter().copied())
            .collect();
        let mut out: Vec<(String, AttributeKind)> = Vec::new();
        for r in &self.attribute_refs {
            let filter_only = r.spans.iter().all(|s| filter_spans.iter().any(|f| f.contains(s)))
                && !self.tasks.iter().any(|t| t.kind != TaskKind::Filter && t.names(&r.attribute));
            if filter_only || out.iter().any(|(a, _)| *a == r.attribute) {
                continue;
            }
            if let Ok(kind) = dataset.kind_of(&r.attribute) {
                out.push((r.attribute.clone(), kind));
            }
        }
        out
    }
}

/// Session-learned choices for ambiguous words: normalized word → attribute.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PreferenceStore(BTreeMap<String, String>);

impl PreferenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.0.get(&text::normalize(token)).map(String::as_str)
    }

    pub fn set(&mut self, token: &str, attribute: &str) {
        self.0.insert(text::normalize(token), attribute.to_string());
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains_key(&text::normalize(token))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Parses a number with an optional magnitude suffix (`K`, `M`, `B`) and
/// thousands separators. Suffixes shift the decimal point in the digit
/// string, so `2.5K` is exactly 2500.
pub fn parse_numeric_literal(token: &str) -> Result<f64> {
    let t = token.trim();
    let err = || Error::NotANumber(token.to_string());
    let shift = match t.chars().last() {
        Some('k' | 'K') => 3,
        Some('m' | 'M') => 6,
        Some('b' | 'B') => 9,
        _ => return parse_plain_number(t).ok_or_else(err),
    };
    let body = &t[..t.len() - 1];
    if body.contains(['e', 'E']) {
        return Err(err());
    }
    parse_plain_number(body).ok_or_else(err)?;
    let body = body.replace(',', "");
    let (sign, unsigned) = match body.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", body.strip_prefix('+').unwrap_or(&body)),
    };
    let (int, frac) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    let mut frac = frac.to_string();
    while frac.len() < shift {
        frac.push('0');
    }
    let shifted = format!("{sign}{int}{}.{}0", &frac[..shift], &frac[shift..]);
    shifted.parse::<f64>().ok().filter(|n| n.is_finite()).ok_or_else(err)
}

/// Interprets `query` against `dataset`, resolving ambiguous words through
/// `prefs` when a preference names one of the candidates.
pub fn interpret(query: &str, dataset: &Dataset, prefs: &PreferenceStore) -> Result<Interpretation> {
    if query.trim().is_empty() {
        return Err(Error::EmptyQuery);
    }
    let tokens = text::tokenize(query);
    let mut refs = match_attributes(&tokens, dataset);
    for r in refs.iter_mut().filter(|r| r.inference == Inference::Ambiguous) {
        let word = r.spans[0].slice(query);
        if let Some(choice) = prefs.get(word) {
            if let Some(c) = r.candidates.iter().find(|c| c.as_str() == choice) {
                r.attribute = c.clone();
            }
        }
    }
    let extraction = Extractor::new(&tokens, &refs, dataset).run();
    refs.extend(extraction.default_refs);
    let mut interp = Interpretation {
        query: query.to_string(),
        attribute_refs: refs,
        tasks: extraction.tasks,
        encoding_intent: extraction.intent,
        unparsed_keywords: extraction.unparsed,
    };
    add_default_aggregate(&mut interp, dataset);
    Ok(interp)
}

/// Matches query tokens to attributes: exact and fuzzy name matches,
/// ambiguous words, and implicit references through cell values. Ambiguous
/// references default to the first candidate in column order.
pub fn match_attributes(tokens: &[Token], dataset: &Dataset) -> Vec<AttributeRef> {
    Matcher::new(tokens, dataset).run()
}

/// Extracts tasks from tokens given their attribute references.
pub fn extract_tasks(tokens: &[Token], refs: &[AttributeRef], dataset: &Dataset) -> Vec<TaskRef> {
    Extractor::new(tokens, refs, dataset).run().tasks
}

struct NameEntry {
    name: String,
    norm: String,
    /// Lowercased name words with their original spelling.
    words: Vec<(String, String)>,
}

fn name_entries(dataset: &Dataset) -> Vec<NameEntry> {
    dataset
        .attributes()
        .iter()
        .map(|a| NameEntry {
            name: a.name.clone(),
            norm: text::normalize(&a.name),
            words: text::tokenize(&a.name)
                .into_iter()
                .map(|t| {
                    let original = t.span.slice(&a.name).to_string();
                    (t.text, original)
                })
                .collect(),
        })
        .collect()
}

/// Distinct text values of categorical attributes with their normalized
/// word lists, in column then first-appearance order.
struct ValueEntry {
    attribute: String,
    value: Value,
    norm: String,
    words: Vec<String>,
}

fn value_entries(dataset: &Dataset) -> Vec<ValueEntry> {
    let mut out = Vec::new();
    for a in dataset.attributes() {
        if !a.kind.is_categorical() {
            continue;
        }
        for v in dataset.distinct_values(&a.name).unwrap_or_default() {
            let Some(s) = v.as_text() else { continue };
            let words: Vec<String> = text::tokenize(s).into_iter().map(|t| t.text).collect();
            if words.is_empty() {
                continue;
            }
            out.push(ValueEntry {
                attribute: a.name.clone(),
                norm: words.join(" "),
                words,
                value: v,
            });
        }
    }
    out
}

fn entity_words(dataset: &Dataset) -> [String; 2] {
    let plural = dataset.entity_noun();
    let singular = plural.strip_suffix('s').unwrap_or(&plural).to_string();
    [plural, singular]
}

fn phrase(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
}

fn cover(tokens: &[Token]) -> Span {
    Span::cover(tokens[0].span, tokens[tokens.len() - 1].span)
}

struct Matcher<'a> {
    tokens: &'a [Token],
    dataset: &'a Dataset,
    names: Vec<NameEntry>,
    values: Vec<ValueEntry>,
    covered: Vec<bool>,
    refs: Vec<AttributeRef>,
    keys: Vec<(Inference, String)>,
}

impl<'a> Matcher<'a> {
    fn new(tokens: &'a [Token], dataset: &'a Dataset) -> Self {
        Matcher {
            tokens,
            dataset,
            names: name_entries(dataset),
            values: value_entries(dataset),
            covered: vec![false; tokens.len()],
            refs: Vec::new(),
            keys: Vec::new(),
        }
    }

    fn add(&mut self, key: String, attribute: String, candidates: Vec<String>, inference: Inference, span: Span, fuzzy: Option<FuzzyMatch>) {
        let key = (inference, key);
        let idx = match self.keys.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                self.keys.push(key);
                self.refs.push(AttributeRef {
                    attribute,
                    candidates,
                    inference,
                    spans: Vec::new(),
                    fuzzy: Vec::new(),
                });
                self.refs.len() - 1
            }
        };
        let r = &mut self.refs[idx];
        if !r.spans.contains(&span) {
            r.spans.push(span);
        }
        r.fuzzy.extend(fuzzy);
    }

    fn add_named(&mut self, attrs: Vec<String>, span: Span, word: &str, fuzzy: Option<FuzzyMatch>) {
        if attrs.len() == 1 {
            let a = attrs[0].clone();
            self.add(a.clone(), a, attrs, Inference::Explicit, span, fuzzy);
        } else {
            let first = attrs[0].clone();
            self.add(word.to_string(), first, attrs, Inference::Ambiguous, span, fuzzy);
        }
    }

    fn run(mut self) -> Vec<AttributeRef> {
        self.exact_scan();
        self.fuzzy_scan();
        self.value_word_scan();
        let mut refs = self.refs;
        refs.sort_by_key(AttributeRef::first_start);
        refs
    }

    fn max_scan(&self) -> usize {
        let longest_name = self.names.iter().map(|n| n.words.len()).max().unwrap_or(0);
        let longest_value = self.values.iter().map(|v| v.words.len()).max().unwrap_or(0);
        longest_name.max(longest_value).clamp(lexicon::MAX_PHRASE_TOKENS, MAX_SCAN_TOKENS)
    }

    fn exact_scan(&mut self) {
        let n = self.tokens.len();
        let max = self.max_scan();
        let mut i = 0;
        while i < n {
            let mut matched = 0;
            for len in (1..=max.min(n - i)).rev() {
                let toks = &self.tokens[i..i + len];
                let p = phrase(toks);
                let span = cover(toks);
                let attrs: Vec<String> = self.names.iter().filter(|e| e.norm == p).map(|e| e.name.clone()).collect();
                if !attrs.is_empty() {
                    self.add_named(attrs, span, &p, None);
                    matched = len;
                    break;
                }
                if len <= lexicon::MAX_PHRASE_TOKENS && lexicon::is_keyword(&p) {
                    matched = len;
                    break;
                }
                let single_word_ok = len > 1 || (toks[0].class == TokenClass::Word && !text::is_stopword(&p));
                if single_word_ok {
                    if let Some(v) = self.values.iter().find(|v| v.norm == p) {
                        let a = v.attribute.clone();
                        self.add(a.clone(), a.clone(), vec![a], Inference::Implicit, span, None);
                        matched = len;
                        break;
                    }
                }
            }
            if matched > 0 {
                self.covered[i..i + matched].fill(true);
                i += matched;
            } else {
                i += 1;
            }
        }
    }

    fn open_word(&self, i: usize) -> bool {
        !self.covered[i] && self.tokens[i].class == TokenClass::Word && !text::is_stopword(&self.tokens[i].text)
    }

    fn fuzzy_scan(&mut self) {
        let n = self.tokens.len();
        let mut i = 0;
        while i < n {
            if !self.open_word(i) {
                i += 1;
                continue;
            }
            let mut matched = 0;
            for len in (1..=3.min(n - i)).rev() {
                let run_ok = (i..i + len).all(|j| !self.covered[j] && self.tokens[j].class == TokenClass::Word)
                    && !text::is_stopword(&self.tokens[i + len - 1].text);
                if !run_ok {
                    continue;
                }
                let toks = &self.tokens[i..i + len];
                if let Some((attrs, fuzzy)) = self.best_fuzzy(toks) {
                    let word = phrase(toks);
                    self.add_named(attrs, cover(toks), &word, fuzzy);
                    matched = len;
                    break;
                }
            }
            if matched > 0 {
                self.covered[i..i + matched].fill(true);
                i += matched;
            } else {
                i += 1;
            }
        }
    }

    /// Attributes whose best normalized distance to the phrase is minimal.
    fn best_fuzzy(&self, toks: &[Token]) -> Option<(Vec<String>, Option<FuzzyMatch>)> {
        let p = phrase(toks);
        // (distance, compared length, compared original, attribute)
        let mut best: Vec<(usize, usize, String, String)> = Vec::new();
        for e in &self.names {
            let mut compared: Vec<(&str, String)> = vec![(e.norm.as_str(), e.name.clone())];
            if toks.len() == 1 {
                compared.extend(e.words.iter().map(|(w, o)| (w.as_str(), o.clone())));
            }
            let mut own: Option<(usize, usize, String)> = None;
            for (c, original) in compared {
                let Some(d) = text::fuzzy_distance(&p, c) else { continue };
                let len = c.chars().count();
                let better = match &own {
                    None => true,
                    Some((bd, bl, _)) => d * bl < bd * len,
                };
                if better {
                    own = Some((d, len, original));
                }
            }
            if let Some((d, len, original)) = own {
                match best.first() {
                    Some((bd, bl, _, _)) if d * bl > bd * len => {}
                    Some((bd, bl, _, _)) if d * bl == bd * len => best.push((d, len, original, e.name.clone())),
                    _ => best = vec![(d, len, original, e.name.clone())],
                }
            }
        }
        let (d, _, compared, _) = best.first()?.clone();
        let fuzzy = (d > 0).then(|| FuzzyMatch {
            span: cover(toks),
            token: p,
            compared,
            distance: d,
        });
        Some((best.into_iter().map(|b| b.3).collect(), fuzzy))
    }

    fn value_word_scan(&mut self) {
        let [plural, singular] = entity_words(self.dataset);
        for i in 0..self.tokens.len() {
            if !self.open_word(i) {
                continue;
            }
            let word = &self.tokens[i].text;
            if word.chars().count() < MIN_VALUE_WORD_CHARS || *word == plural || *word == singular {
                continue;
            }
            let hit = self.values.iter().find(|v| v.words.iter().any(|w| w == word));
            if let Some(v) = hit {
                let a = v.attribute.clone();
                self.add(a.clone(), a.clone(), vec![a], Inference::Implicit, self.tokens[i].span, None);
                self.covered[i] = true;
            }
        }
    }
}

/// Values of `attribute` referenced by the words in `span`: whole-value
/// matches first, otherwise values containing the word.
fn implicit_values(tokens: &[Token], span: Span, attribute: &str, values: &[ValueEntry]) -> Vec<Value> {
    let words: Vec<&Token> = tokens.iter().filter(|t| span.contains(&t.span)).collect();
    let p = words.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
    let column = values.iter().filter(|v| v.attribute == attribute);
    let exact: Vec<Value> = column.clone().filter(|v| v.norm == p).map(|v| v.value.clone()).collect();
    if !exact.is_empty() {
        return exact;
    }
    column
        .filter(|v| v.words.contains(&p))
        .map(|v| v.value.clone())
        .collect()
}

#[derive(Clone, Copy)]
struct Mention {
    attr: usize,
    span: Span,
    first: usize,
    last: usize,
}

struct KeywordItem {
    keyword: Keyword,
    first: usize,
    last: usize,
    span: Span,
    consumed: bool,
}

struct Extraction {
    tasks: Vec<TaskRef>,
    intent: EncodingIntent,
    unparsed: Vec<Span>,
    default_refs: Vec<AttributeRef>,
}

struct Extractor<'a> {
    tokens: &'a [Token],
    refs: &'a [AttributeRef],
    dataset: &'a Dataset,
    values: Vec<ValueEntry>,
    in_ref: Vec<bool>,
    operand_used: Vec<bool>,
    /// Mentions usable for binding (implicit references are values, not
    /// attribute mentions).
    mentions: Vec<Mention>,
    implicit: Vec<Mention>,
    implicit_consumed: Vec<bool>,
    keywords: Vec<KeywordItem>,
    tasks: Vec<TaskRef>,
    intent: EncodingIntent,
    default_refs: Vec<AttributeRef>,
}

impl<'a> Extractor<'a> {
    fn new(tokens: &'a [Token], refs: &'a [AttributeRef], dataset: &'a Dataset) -> Self {
        let mut in_ref = vec![false; tokens.len()];
        let mut mentions = Vec::new();
        let mut implicit = Vec::new();
        for (attr, r) in refs.iter().enumerate() {
            for span in &r.spans {
                let idx: Vec<usize> = (0..tokens.len()).filter(|&i| span.contains(&tokens[i].span)).collect();
                let (Some(&first), Some(&last)) = (idx.first(), idx.last()) else { continue };
                idx.iter().for_each(|&i| in_ref[i] = true);
                let m = Mention { attr, span: *span, first, last };
                if r.inference == Inference::Implicit {
                    implicit.push(m);
                } else {
                    mentions.push(m);
                }
            }
        }
        mentions.sort_by_key(|m| m.first);
        implicit.sort_by_key(|m| m.first);
        let implicit_consumed = vec![false; implicit.len()];
        let mut x = Extractor {
            tokens,
            refs,
            dataset,
            values: value_entries(dataset),
            in_ref,
            operand_used: vec![false; tokens.len()],
            mentions,
            implicit,
            implicit_consumed,
            keywords: Vec::new(),
            tasks: Vec::new(),
            intent: EncodingIntent::default(),
            default_refs: Vec::new(),
        };
        x.scan_keywords();
        x
    }

    fn scan_keywords(&mut self) {
        let n = self.tokens.len();
        let mut i = 0;
        while i < n {
            if self.in_ref[i] {
                i += 1;
                continue;
            }
            let mut matched = 0;
            for len in (1..=lexicon::MAX_PHRASE_TOKENS.min(n - i)).rev() {
                if (i..i + len).any(|j| self.in_ref[j]) {
                    continue;
                }
                let toks = &self.tokens[i..i + len];
                if let Some(keyword) = lexicon::lookup(&phrase(toks)) {
                    self.keywords.push(KeywordItem {
                        keyword,
                        first: i,
                        last: i + len - 1,
                        span: cover(toks),
                        consumed: false,
                    });
                    matched = len;
                    break;
                }
            }
            i += matched.max(1);
        }
    }

    fn kind(&self, m: &Mention) -> AttributeKind {
        self.dataset
            .kind_of(&self.refs[m.attr].attribute)
            .unwrap_or(AttributeKind::Nominal)
    }

    fn name(&self, m: &Mention) -> String {
        self.refs[m.attr].attribute.clone()
    }

    fn preceding(&self, before: usize, ok: impl Fn(AttributeKind) -> bool) -> Option<Mention> {
        self.mentions.iter().rev().find(|m| m.last < before && ok(self.kind(m))).copied()
    }

    fn following(&self, after: usize, ok: impl Fn(AttributeKind) -> bool) -> Option<Mention> {
        self.mentions.iter().find(|m| m.first > after && ok(self.kind(m))).copied()
    }

    fn keyword_between(&self, from: usize, to: usize) -> bool {
        self.keywords.iter().any(|k| k.first > from && k.last < to)
    }

    fn free_token(&self, i: usize) -> Option<&Token> {
        let t = self.tokens.get(i)?;
        let is_keyword_token = self.keywords.iter().any(|k| k.first <= i && i <= k.last);
        (!self.in_ref[i] && !self.operand_used[i] && !is_keyword_token).then_some(t)
    }

    fn parse_operand(&self, i: usize, kind: AttributeKind) -> Option<Value> {
        let t = self.free_token(i)?;
        if t.class != TokenClass::Number {
            return None;
        }
        match kind {
            AttributeKind::Quantitative => parse_numeric_literal(&t.text).ok().map(Value::Number),
            AttributeKind::Temporal => Timestamp::parse_iso(&t.text)
                .or_else(|| Timestamp::parse_year(&t.text))
                .map(Value::Timestamp),
            _ => None,
        }
    }

    /// Operand values and the token range they occupy.
    fn operands(&self, op: FilterOp, start: usize, kind: AttributeKind) -> Option<(Vec<Value>, usize, usize)> {
        let first = self.parse_operand(start, kind)?;
        if op != FilterOp::Between {
            return Some((vec![first], start, start));
        }
        let and = self.free_token(start + 1)?;
        if and.text != "and" {
            return None;
        }
        let second = self.parse_operand(start + 2, kind)?;
        Some((vec![first, second], start, start + 2))
    }

    fn default_temporal(&mut self) -> Option<String> {
        let attr = self
            .dataset
            .attributes()
            .iter()
            .find(|a| a.kind == AttributeKind::Temporal)?
            .name
            .clone();
        if !self.default_refs.iter().any(|r| r.attribute == attr) {
            self.default_refs.push(AttributeRef {
                attribute: attr.clone(),
                candidates: vec![attr.clone()],
                inference: Inference::Default,
                spans: Vec::new(),
                fuzzy: Vec::new(),
            });
        }
        Some(attr)
    }

    fn push_task(&mut self, kind: TaskKind, attributes: Vec<String>, predicate: Option<Predicate>, agg_fn: Option<AggFn>, inference: Inference, mut spans: Vec<Span>) {
        spans.sort();
        spans.dedup();
        let task = TaskRef {
            kind,
            attributes,
            predicate,
            agg_fn,
            inference,
            spans,
        };
        if let Some(existing) = self.tasks.iter_mut().find(|t| t.same_task(&task)) {
            existing.spans.extend(task.spans);
            existing.spans.sort();
            existing.spans.dedup();
        } else {
            self.tasks.push(task);
        }
    }

    fn run(mut self) -> Extraction {
        for k in 0..self.keywords.len() {
            let consumed = self.handle(k);
            self.keywords[k].consumed = consumed;
        }
        self.implicit_filters();
        self.tasks.sort_by_key(TaskRef::first_start);
        let unparsed = self.unparsed();
        Extraction {
            tasks: self.tasks,
            intent: self.intent,
            unparsed,
            default_refs: self.default_refs,
        }
    }

    fn handle(&mut self, k: usize) -> bool {
        let KeywordItem { keyword, first, last, span, .. } = self.keywords[k];
        match keyword {
            Keyword::Operator { op, temporal } => self.operator(op, temporal, first, last, span),
            Keyword::Aggregate(AggFn::Count) => {
                self.push_task(TaskKind::Aggregate, Vec::new(), None, Some(AggFn::Count), Inference::Explicit, vec![span]);
                true
            }
            Keyword::Aggregate(agg) | Keyword::Extremum(agg) => {
                let q = |k: AttributeKind| k == AttributeKind::Quantitative;
                let Some(m) = self.following(last, q).or_else(|| self.preceding(first, q)) else {
                    return false;
                };
                let kind = if matches!(keyword, Keyword::Extremum(_)) { TaskKind::Extremum } else { TaskKind::Aggregate };
                self.push_task(kind, vec![self.name(&m)], None, Some(agg), Inference::Explicit, vec![span, m.span]);
                true
            }
            Keyword::Correlation => {
                let mut picked: Vec<Mention> = Vec::new();
                for m in &self.mentions {
                    if self.kind(m) == AttributeKind::Quantitative && !picked.iter().any(|p| p.attr == m.attr) {
                        picked.push(*m);
                    }
                }
                if picked.len() < 2 {
                    return false;
                }
                let attrs = vec![self.name(&picked[0]), self.name(&picked[1])];
                self.push_task(TaskKind::Correlation, attrs, None, None, Inference::Explicit, vec![span, picked[0].span, picked[1].span]);
                true
            }
            Keyword::Grouping => {
                let next = self.following(last, |_| true).filter(|m| !self.keyword_between(last, m.first));
                let m = next.or_else(|| self.preceding(first, |k| k.is_categorical() || k == AttributeKind::Temporal));
                let Some(m) = m else { return false };
                self.push_task(TaskKind::Distribution, vec![self.name(&m)], None, None, Inference::Explicit, vec![span, m.span]);
                true
            }
            Keyword::Trend => {
                let temporal = self
                    .mentions
                    .iter()
                    .filter(|m| self.kind(m) == AttributeKind::Temporal)
                    .min_by_key(|m| if m.first > last { m.first - last } else { first - m.last })
                    .copied();
                match temporal {
                    Some(m) => {
                        self.push_task(TaskKind::Trend, vec![self.name(&m)], None, None, Inference::Explicit, vec![span, m.span]);
                        true
                    }
                    None => match self.default_temporal() {
                        Some(attr) => {
                            self.push_task(TaskKind::Trend, vec![attr], None, None, Inference::Explicit, vec![span]);
                            true
                        }
                        None => false,
                    },
                }
            }
            Keyword::Chart { mark, histogram } => {
                if self.intent.explicit {
                    return false;
                }
                self.intent = EncodingIntent {
                    mark_request: Some(mark),
                    explicit: true,
                    histogram,
                    spans: vec![span],
                };
                true
            }
        }
    }

    fn operator(&mut self, op: FilterOp, temporal: bool, first: usize, last: usize, span: Span) -> bool {
        if matches!(op, FilterOp::Eq | FilterOp::Neq) && self.value_operator(op, first, last, span) {
            return true;
        }
        let eligible = |k: AttributeKind| {
            k == AttributeKind::Temporal || (!temporal && k == AttributeKind::Quantitative)
        };
        let bound = self.preceding(first, eligible).or_else(|| self.following(last, eligible));
        let (attr, kind, mention_span) = match bound {
            Some(m) => (self.name(&m), self.kind(&m), Some(m.span)),
            None if temporal => {
                if self.operands(op, last + 1, AttributeKind::Temporal).is_none() {
                    return false;
                }
                match self.default_temporal() {
                    Some(a) => (a, AttributeKind::Temporal, None),
                    None => return false,
                }
            }
            None => return false,
        };
        let Some((operands, a, b)) = self.operands(op, last + 1, kind) else {
            return false;
        };
        let Ok(predicate) = Predicate::new(op, operands) else { return false };
        self.operand_used[a..=b].fill(true);
        let mut spans = vec![span, Span::cover(self.tokens[a].span, self.tokens[b].span)];
        spans.extend(mention_span);
        self.push_task(TaskKind::Filter, vec![attr], Some(predicate), None, Inference::Explicit, spans);
        true
    }

    /// `equal to` / `not equal to` followed directly by a cell value.
    fn value_operator(&mut self, op: FilterOp, first: usize, last: usize, span: Span) -> bool {
        let Some(pos) = self.implicit.iter().position(|m| m.first == last + 1) else {
            return false;
        };
        let m = self.implicit[pos];
        let attr = self.name(&m);
        let values = implicit_values(self.tokens, m.span, &attr, &self.values);
        let op = match (op, values.len()) {
            (_, 0) => return false,
            (FilterOp::Eq, n) if n > 1 => FilterOp::OneOf,
            (FilterOp::Neq, n) if n > 1 => return false,
            (op, _) => op,
        };
        let Ok(predicate) = Predicate::new(op, values) else { return false };
        self.implicit_consumed[pos] = true;
        let mut spans = vec![span, m.span];
        if let Some(prev) = self.preceding(first, |_| true) {
            if self.refs[prev.attr].attribute == attr {
                spans.push(prev.span);
            }
        }
        self.push_task(TaskKind::Filter, vec![attr], Some(predicate), None, Inference::Explicit, spans);
        true
    }

    /// One filter per implicitly referenced attribute: equality for a single
    /// value, set membership for several.
    fn implicit_filters(&mut self) {
        let mut by_attr: Vec<(usize, Vec<Span>, Vec<Value>)> = Vec::new();
        for (pos, m) in self.implicit.iter().enumerate() {
            if self.implicit_consumed[pos] {
                continue;
            }
            let attr = &self.refs[m.attr].attribute;
            let vals = implicit_values(self.tokens, m.span, attr, &self.values);
            let entry = match by_attr.iter_mut().position(|(a, _, _)| *a == m.attr) {
                Some(i) => &mut by_attr[i],
                None => {
                    by_attr.push((m.attr, Vec::new(), Vec::new()));
                    by_attr.last_mut().expect("just pushed")
                }
            };
            entry.1.push(m.span);
            for v in vals {
                if !entry.2.contains(&v) {
                    entry.2.push(v);
                }
            }
        }
        for (attr, spans, values) in by_attr {
            let op = if values.len() == 1 { FilterOp::Eq } else { FilterOp::OneOf };
            let Ok(predicate) = Predicate::new(op, values) else { continue };
            let name = self.refs[attr].attribute.clone();
            self.push_task(TaskKind::Filter, vec![name], Some(predicate), None, Inference::Implicit, spans);
        }
    }

    /// Unconsumed keywords plus content words nothing accounted for; runs of
    /// adjacent content words form one span ("box office").
    fn unparsed(&self) -> Vec<Span> {
        let [plural, singular] = entity_words(self.dataset);
        let mut out: Vec<Span> = self.keywords.iter().filter(|k| !k.consumed).map(|k| k.span).collect();
        let mut run: Option<(Span, usize)> = None;
        for (i, t) in self.tokens.iter().enumerate() {
            let content = self.free_token(i).is_some()
                && match t.class {
                    TokenClass::Number => true,
                    TokenClass::Word => !text::is_stopword(&t.text) && t.text != plural && t.text != singular,
                    TokenClass::Symbol => false,
                };
            if !content {
                continue;
            }
            run = match run {
                Some((s, last)) if last + 1 == i => Some((Span::cover(s, t.span), i)),
                Some((s, _)) => {
                    out.push(s);
                    Some((t.span, i))
                }
                None => Some((t.span, i)),
            };
        }
        out.extend(run.map(|(s, _)| s));
        out.sort();
        out
    }
}

/// Adds the aggregation the synthesizer will apply when the query named
/// none: mean of the measure when it is shown against a category or time,
/// otherwise a record count.
fn add_default_aggregate(interp: &mut Interpretation, dataset: &Dataset) {
    let encoded = interp.encoded_attributes(dataset);
    let count = |k: fn(AttributeKind) -> bool| encoded.iter().filter(|(_, kind)| k(*kind)).count();
    let q = count(|k| k == AttributeKind::Quantitative);
    let c = count(AttributeKind::is_categorical);
    let t = count(|k| k == AttributeKind::Temporal);
    let has_agg = |attr: Option<&str>| {
        interp.tasks.iter().any(|task| {
            matches!(task.kind, TaskKind::Aggregate | TaskKind::Extremum)
                && match attr {
                    Some(a) => task.names(a),
                    None => task.agg_fn == Some(AggFn::Count),
                }
        })
    };
    let measure = encoded
        .iter()
        .find(|(_, k)| *k == AttributeKind::Quantitative)
        .map(|(a, _)| a.clone());
    let task = match (q, c, t) {
        (1, 1..=2, 0) | (1, 0..=1, 1) => {
            let m = measure.expect("one quantitative attribute");
            (!has_agg(Some(&m))).then(|| (vec![m], AggFn::Mean))
        }
        (1, 0, 0) => {
            let m = measure.expect("one quantitative attribute");
            (!has_agg(Some(&m)) && !has_agg(None)).then(|| (Vec::new(), AggFn::Count))
        }
        (0, 1, 0) | (0, 0, 1) | (0, 2, 0) | (0, 1, 1) => (!has_agg(None)).then(|| (Vec::new(), AggFn::Count)),
        _ => None,
    };
    if let Some((attributes, agg)) = task {
        interp.tasks.push(TaskRef {
            kind: TaskKind::Aggregate,
            attributes,
            predicate: None,
            agg_fn: Some(agg),
            inference: Inference::Default,
            spans: Vec::new(),
        });
    }
}
