//! Chart synthesis from interpretations, and widget adjustments of charts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::interpret::{interpret, Inference, Interpretation, PreferenceStore, TaskKind};
use crate::spec::{
    AggFn, Channel, ChartSpec, Encoding, FilterOp, FilterTransform, Mark, Predicate, Transform, DEFAULT_MAX_BINS,
};
use crate::value::{AttributeKind, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Channel for the third quantitative attribute of a scatter plot.
    pub third_quantitative: Channel,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            third_quantitative: Channel::Color,
        }
    }
}

/// Builds the chart for an interpretation with the default options.
pub fn synthesize(interp: &Interpretation, dataset: &Dataset) -> Result<ChartSpec> {
    synthesize_with(interp, dataset, &SynthesisOptions::default())
}

pub fn synthesize_with(interp: &Interpretation, dataset: &Dataset, opts: &SynthesisOptions) -> Result<ChartSpec> {
    let encoded = interp.encoded_attributes(dataset);
    if encoded.is_empty() {
        return Err(Error::Unencodable("the query names no attribute to show".into()));
    }
    if encoded.len() > 3 {
        return Err(Error::Unencodable(format!(
            "{} attributes cannot share one chart (at most 3)",
            encoded.len()
        )));
    }
    let pick = |want: fn(AttributeKind) -> bool| -> Vec<(String, AttributeKind)> {
        encoded.iter().filter(|(_, k)| want(*k)).cloned().collect()
    };
    let qs = pick(|k| k == AttributeKind::Quantitative);
    let cs = pick(AttributeKind::is_categorical);
    let ts = pick(|k| k == AttributeKind::Temporal);

    let raw = |(name, kind): &(String, AttributeKind)| Encoding::field(name, *kind);
    let explicit_agg = |q: &str| {
        interp
            .tasks
            .iter()
            .find(|t| matches!(t.kind, TaskKind::Aggregate | TaskKind::Extremum) && t.names(q))
            .and_then(|t| t.agg_fn)
    };
    let measure = |q: &(String, AttributeKind)| match explicit_agg(&q.0).unwrap_or(AggFn::Mean) {
        AggFn::Count => Encoding::count(),
        agg => Encoding::aggregated(&q.0, agg),
    };

    let mut transforms: Vec<Transform> = interp
        .tasks
        .iter()
        .filter(|t| t.kind == TaskKind::Filter)
        .filter_map(|t| {
            Some(Transform::Filter(FilterTransform {
                field: t.attributes.first()?.clone(),
                predicate: t.predicate.clone()?,
            }))
        })
        .collect();

    let mut enc: BTreeMap<Channel, Encoding> = BTreeMap::new();
    let mark = match (qs.len(), cs.len(), ts.len()) {
        (1, 0, 0) => match explicit_agg(&qs[0].0) {
            Some(agg) if agg != AggFn::Count => {
                enc.insert(Channel::Y, Encoding::aggregated(&qs[0].0, agg));
                Mark::Bar
            }
            _ => {
                let mut x = raw(&qs[0]);
                x.bin = true;
                enc.insert(Channel::X, x);
                enc.insert(Channel::Y, Encoding::count());
                transforms.push(Transform::Bin {
                    field: qs[0].0.clone(),
                    max_bins: DEFAULT_MAX_BINS,
                });
                Mark::Bar
            }
        },
        (0, 1..=2, 0) => {
            enc.insert(Channel::X, raw(&cs[0]));
            enc.insert(Channel::Y, Encoding::count());
            if let Some(c) = cs.get(1) {
                enc.insert(Channel::Color, raw(c));
            }
            Mark::Bar
        }
        (0, 0..=1, 1) => {
            enc.insert(Channel::X, raw(&ts[0]));
            enc.insert(Channel::Y, Encoding::count());
            if let Some(c) = cs.first() {
                enc.insert(Channel::Color, raw(c));
            }
            Mark::Line
        }
        (1, 1..=2, 0) => {
            enc.insert(Channel::X, raw(&cs[0]));
            enc.insert(Channel::Y, measure(&qs[0]));
            if let Some(c) = cs.get(1) {
                enc.insert(Channel::Color, raw(c));
            }
            Mark::Bar
        }
        (1, 0..=1, 1) => {
            enc.insert(Channel::X, raw(&ts[0]));
            enc.insert(Channel::Y, measure(&qs[0]));
            if let Some(c) = cs.first() {
                enc.insert(Channel::Color, raw(c));
            }
            Mark::Line
        }
        (2..=3, _, _) => {
            enc.insert(Channel::X, raw(&qs[0]));
            enc.insert(Channel::Y, raw(&qs[1]));
            let third = qs.get(2).or(cs.first()).or(ts.first());
            if let Some(t) = third {
                let ch = if qs.len() == 3 { opts.third_quantitative } else { Channel::Color };
                enc.insert(ch, raw(t));
            }
            Mark::Point
        }
        _ => {
            let kinds: Vec<&str> = encoded.iter().map(|(_, k)| k.as_str()).collect();
            return Err(Error::Unencodable(format!("no chart rule for {}", kinds.join(" + "))));
        }
    };

    let intent = &interp.encoding_intent;
    let mark = match intent.mark_request {
        Some(m) if intent.explicit => m,
        _ => mark,
    };
    let spec = ChartSpec {
        data: dataset.id().to_string(),
        transforms,
        mark,
        encodings: enc,
    };
    spec.check_shape()?;
    Ok(spec)
}

/// Kinds of the fields a chart encodes, record counts excluded.
pub fn encoded_kinds(spec: &ChartSpec) -> Vec<AttributeKind> {
    spec.encodings
        .values()
        .filter(|e| e.field.is_some())
        .map(|e| e.kind)
        .collect()
}

/// Marks that suit a combination of encoded attribute kinds, the default
/// first. Empty when no mark suits it. Pie charts are never suggested.
pub fn suitable_marks(kinds: &[AttributeKind]) -> Vec<Mark> {
    let q = kinds.iter().filter(|k| **k == AttributeKind::Quantitative).count();
    let c = kinds.iter().filter(|k| k.is_categorical()).count();
    let t = kinds.iter().filter(|k| **k == AttributeKind::Temporal).count();
    match (q, c, t) {
        (1, 0, 0) => vec![Mark::Bar, Mark::Tick],
        (0, 1..=2, 0) => vec![Mark::Bar],
        (1, 1..=2, 0) => vec![Mark::Bar, Mark::Tick],
        (0..=1, 0..=1, 1) => vec![Mark::Line, Mark::Bar],
        (2, 0..=1, 0) | (2, 0, 1) | (3, 0, 0) => vec![Mark::Point],
        _ => Vec::new(),
    }
}

/// A widget edit of a chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all_fields = "camelCase")]
pub enum Adjustment {
    AddFilter {
        field: String,
        operator: FilterOp,
        operands: Vec<Value>,
    },
    /// Changes the operator and/or operands of the `index`-th filter.
    /// Omitted operands are kept when they fit the new operator.
    ModifyFilter {
        index: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operator: Option<FilterOp>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operands: Option<Vec<Value>>,
    },
    RemoveFilter {
        index: usize,
    },
    AddAttribute {
        field: String,
    },
    RemoveAttribute {
        field: String,
    },
    ChangeAggregate {
        channel: Channel,
        agg_fn: AggFn,
    },
    ChangeMark {
        mark: Mark,
    },
    SwapChannels {
        a: Channel,
        b: Channel,
    },
    /// Picks the attribute an ambiguous query word refers to.
    ResolveAmbiguity {
        token: String,
        field: String,
    },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidAdjustment(msg.into())
}

fn filter_position(spec: &ChartSpec, index: usize) -> Result<usize> {
    spec.transforms
        .iter()
        .enumerate()
        .filter(|(_, t)| matches!(t, Transform::Filter(_)))
        .nth(index)
        .map(|(i, _)| i)
        .ok_or_else(|| invalid(format!("no filter at index {index}")))
}

fn typed_predicate(op: FilterOp, operands: Vec<Value>, kind: AttributeKind) -> Result<Predicate> {
    Predicate::new(op, operands)?.coerced(kind)
}

/// Applies `adj` to `spec`. Only the components named by the adjustment
/// change. Resolving an ambiguity needs the interpretation the chart came
/// from, since the chart is rebuilt around the chosen attribute.
pub fn apply_adjustment(spec: &ChartSpec, adj: &Adjustment, dataset: &Dataset, interp: Option<&Interpretation>) -> Result<ChartSpec> {
    let mut out = spec.conform(dataset)?;
    match adj {
        Adjustment::AddFilter { field, operator, operands } => {
            let field = dataset.canonical_name(field).map_err(|_| invalid(format!("unknown field {field:?}")))?;
            let predicate = typed_predicate(*operator, operands.clone(), dataset.kind_of(field)?)?;
            let at = out
                .transforms
                .iter()
                .position(|t| matches!(t, Transform::Bin { .. }))
                .unwrap_or(out.transforms.len());
            out.transforms.insert(
                at,
                Transform::Filter(FilterTransform {
                    field: field.to_string(),
                    predicate,
                }),
            );
        }
        Adjustment::ModifyFilter { index, operator, operands } => {
            let at = filter_position(&out, *index)?;
            let Transform::Filter(f) = &mut out.transforms[at] else { unreachable!() };
            let op = operator.unwrap_or(f.predicate.op());
            let operands = operands.clone().unwrap_or_else(|| f.predicate.operands().to_vec());
            f.predicate = typed_predicate(op, operands, dataset.kind_of(&f.field)?)?;
        }
        Adjustment::RemoveFilter { index } => {
            let at = filter_position(&out, *index)?;
            out.transforms.remove(at);
        }
        Adjustment::AddAttribute { field } => {
            let field = dataset.canonical_name(field).map_err(|_| invalid(format!("unknown field {field:?}")))?;
            if out.encodings.values().any(|e| e.field.as_deref() == Some(field)) {
                return Err(invalid(format!("{field} is already encoded")));
            }
            let ch = Channel::ALL
                .into_iter()
                .find(|c| !out.encodings.contains_key(c))
                .ok_or_else(|| invalid("no free encoding channel"))?;
            out.encodings.insert(ch, Encoding::field(field, dataset.kind_of(field)?));
        }
        Adjustment::RemoveAttribute { field } => {
            let field = dataset.canonical_name(field).map_err(|_| invalid(format!("unknown field {field:?}")))?;
            let before = (out.encodings.len(), out.transforms.len());
            out.encodings.retain(|_, e| e.field.as_deref() != Some(field));
            out.transforms.retain(|t| t.field() != field);
            if before == (out.encodings.len(), out.transforms.len()) {
                return Err(invalid(format!("{field} is not part of the chart")));
            }
        }
        Adjustment::ChangeAggregate { channel, agg_fn } => {
            let e = out
                .encodings
                .get_mut(channel)
                .ok_or_else(|| invalid(format!("no {channel} encoding")))?;
            if e.bin {
                return Err(invalid(format!("{channel} is binned")));
            }
            if *agg_fn == AggFn::Count {
                *e = Encoding::count();
            } else {
                let field = e.field.clone().ok_or_else(|| invalid(format!("{channel} has no field to aggregate")))?;
                if dataset.kind_of(&field)? != AttributeKind::Quantitative {
                    return Err(invalid(format!("cannot take the {agg_fn} of non-quantitative {field}")));
                }
                *e = Encoding::aggregated(&field, *agg_fn);
            }
        }
        Adjustment::ChangeMark { mark } => out.mark = *mark,
        Adjustment::SwapChannels { a, b } => {
            let ea = out.encodings.remove(a).ok_or_else(|| invalid(format!("no {a} encoding")))?;
            let Some(eb) = out.encodings.remove(b) else {
                out.encodings.insert(*a, ea);
                return Err(invalid(format!("no {b} encoding")));
            };
            out.encodings.insert(*a, eb);
            out.encodings.insert(*b, ea);
        }
        Adjustment::ResolveAmbiguity { token, field } => {
            let interp = interp.ok_or_else(|| invalid("resolving an ambiguity needs the query interpretation"))?;
            return resolve_ambiguity(interp, token, field, dataset, &PreferenceStore::new()).map(|(_, s)| s);
        }
    }
    out.check_shape().map_err(|e| invalid(e.to_string()))?;
    Ok(out)
}

/// Re-reads the query with `token` bound to `field`, keeping every other
/// ambiguous word on its current choice, and rebuilds the chart.
pub fn resolve_ambiguity(
    interp: &Interpretation,
    token: &str,
    field: &str,
    dataset: &Dataset,
    prefs: &PreferenceStore,
) -> Result<(Interpretation, ChartSpec)> {
    let key = crate::text::normalize(token);
    let mut pinned = prefs.clone();
    let mut found = false;
    for r in interp.attribute_refs.iter().filter(|r| r.inference == Inference::Ambiguous) {
        for s in &r.spans {
            let word = s.slice(&interp.query);
            if crate::text::normalize(word) == key {
                if !r.candidates.iter().any(|c| c == field) {
                    return Err(invalid(format!("{field} is not a candidate for {token:?}")));
                }
                found = true;
                pinned.set(word, field);
            } else {
                pinned.set(word, &r.attribute);
            }
        }
    }
    if !found {
        return Err(invalid(format!("{token:?} is not ambiguous in the query")));
    }
    let next = interpret(&interp.query, dataset, &pinned)?;
    let spec = synthesize(&next, dataset)?;
    Ok((next, spec))
}
