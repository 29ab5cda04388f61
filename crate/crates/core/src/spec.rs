//! Chart specifications: the unit `(data, transforms, mark, encodings)`
//! tuple and its Vega-Lite JSON form.
//!
//! The JSON form is a strict subset of the Vega-Lite v5 unit grammar:
//!
//! ```text
//! {"data": {"name": ...},
//!  "transform": [{"filter": {"field": ..., "lt"|"lte"|"gt"|"gte"|"equal"|"range"|"oneOf": ...}}, ...],
//!  "mark": "bar"|"point"|"line"|"tick"|"arc",
//!  "encoding": {"x"|"y"|"color"|"size": {"field"?, "type", "aggregate"?, "bin"?}}}
//! ```
//!
//! Bin transforms are carried by the encoding's `bin: {"maxbins": n}` so
//! the document renders unmodified in a stock Vega-Lite renderer.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::value::{AttributeKind, Value};

/// Default number of bins for histograms.
pub const DEFAULT_MAX_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Bar,
    Point,
    Line,
    Tick,
    Arc,
}

impl Mark {
    pub const ALL: [Mark; 5] = [Mark::Bar, Mark::Point, Mark::Line, Mark::Tick, Mark::Arc];

    pub fn as_str(self) -> &'static str {
        match self {
            Mark::Bar => "bar",
            Mark::Point => "point",
            Mark::Line => "line",
            Mark::Tick => "tick",
            Mark::Arc => "arc",
        }
    }

    /// Human name of the chart type.
    pub fn chart_name(self) -> &'static str {
        match self {
            Mark::Bar => "bar chart",
            Mark::Point => "scatter plot",
            Mark::Line => "line chart",
            Mark::Tick => "tick plot",
            Mark::Arc => "pie chart",
        }
    }

    fn parse(s: &str) -> Option<Mark> {
        Mark::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    X,
    Y,
    Color,
    Size,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::X, Channel::Y, Channel::Color, Channel::Size];

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Color => "color",
            Channel::Size => "size",
        }
    }

    fn parse(s: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggFn {
    Mean,
    Sum,
    Count,
    Min,
    Max,
}

impl AggFn {
    pub const ALL: [AggFn; 5] = [AggFn::Mean, AggFn::Sum, AggFn::Count, AggFn::Min, AggFn::Max];

    pub fn as_str(self) -> &'static str {
        match self {
            AggFn::Mean => "mean",
            AggFn::Sum => "sum",
            AggFn::Count => "count",
            AggFn::Min => "min",
            AggFn::Max => "max",
        }
    }

    /// Whether the function needs a quantitative field.
    pub fn needs_quantitative(self) -> bool {
        !matches!(self, AggFn::Count)
    }

    fn parse(s: &str) -> Option<AggFn> {
        AggFn::ALL.into_iter().find(|a| a.as_str() == s)
    }
}

impl fmt::Display for AggFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Filter comparison operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FilterOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Lte,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Gte,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Neq,
    #[serde(rename = "between")]
    Between,
    /// Membership in a set of values (Vega-Lite `oneOf`).
    #[serde(rename = "oneOf")]
    OneOf,
}

impl FilterOp {
    pub fn symbol(self) -> &'static str {
        match self {
            FilterOp::Lt => "<",
            FilterOp::Lte => "<=",
            FilterOp::Gt => ">",
            FilterOp::Gte => ">=",
            FilterOp::Eq => "=",
            FilterOp::Neq => "!=",
            FilterOp::Between => "between",
            FilterOp::OneOf => "in",
        }
    }

    fn arity_ok(self, n: usize) -> bool {
        match self {
            FilterOp::Between => n == 2,
            FilterOp::OneOf => n >= 1,
            _ => n == 1,
        }
    }
}

/// A filter condition with operands whose count matches the operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Predicate {
    #[serde(rename = "operator")]
    op: FilterOp,
    operands: Vec<Value>,
}

impl Predicate {
    pub fn new(op: FilterOp, operands: Vec<Value>) -> Result<Predicate> {
        if !op.arity_ok(operands.len()) {
            return Err(Error::InvalidAdjustment(format!(
                "operator {} does not take {} operand(s)",
                op.symbol(),
                operands.len()
            )));
        }
        if operands.iter().any(Value::is_null) {
            return Err(Error::InvalidAdjustment("filter operands cannot be null".into()));
        }
        Ok(Predicate { op, operands })
    }

    pub fn op(&self) -> FilterOp {
        self.op
    }

    pub fn operands(&self) -> &[Value] {
        &self.operands
    }

    /// Evaluates the predicate; nulls and mismatched types never satisfy it.
    pub fn test(&self, v: &Value) -> bool {
        use std::cmp::Ordering::*;
        let cmp = |i: usize| v.compare(&self.operands[i]);
        match self.op {
            FilterOp::Lt => cmp(0) == Some(Less),
            FilterOp::Lte => matches!(cmp(0), Some(Less | Equal)),
            FilterOp::Gt => cmp(0) == Some(Greater),
            FilterOp::Gte => matches!(cmp(0), Some(Greater | Equal)),
            FilterOp::Eq => cmp(0) == Some(Equal),
            FilterOp::Neq => matches!(cmp(0), Some(Less | Greater)),
            FilterOp::Between => {
                matches!(cmp(0), Some(Greater | Equal)) && matches!(cmp(1), Some(Less | Equal))
            }
            FilterOp::OneOf => (0..self.operands.len()).any(|i| cmp(i) == Some(Equal)),
        }
    }

    /// Re-types operands to the attribute kind.
    pub fn coerced(&self, kind: AttributeKind) -> Result<Predicate> {
        let operands = self
            .operands
            .iter()
            .map(|v| {
                v.coerce_to(kind).ok_or_else(|| {
                    Error::InvalidAdjustment(format!("operand {v} does not fit a {kind} attribute"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Predicate::new(self.op, operands)
    }

    /// Text such as `< 100,000,000` or `between 1 and 5`.
    pub fn describe(&self) -> String {
        let show = |v: &Value| match v {
            Value::Number(n) => format_grouped(*n),
            other => other.to_string(),
        };
        match self.op {
            FilterOp::Between => format!("between {} and {}", show(&self.operands[0]), show(&self.operands[1])),
            FilterOp::OneOf => format!(
                "in {{{}}}",
                self.operands.iter().map(show).collect::<Vec<_>>().join(", ")
            ),
            op => format!("{} {}", op.symbol(), show(&self.operands[0])),
        }
    }
}

/// Integers with thousands separators, e.g. `100,000,000`.
pub fn format_grouped(n: f64) -> String {
    if n.fract() != 0.0 || n.abs() >= 9.0e15 {
        return format!("{n}");
    }
    let digits = format!("{}", (n as i64).unsigned_abs());
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    if n < 0.0 {
        out.insert(0, '-');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FilterTransform {
    pub field: String,
    pub predicate: Predicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Transform {
    Filter(FilterTransform),
    Bin { field: String, max_bins: usize },
}

impl Transform {
    pub fn field(&self) -> &str {
        match self {
            Transform::Filter(f) => &f.field,
            Transform::Bin { field, .. } => field,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Encoding {
    /// `None` only for record counts.
    pub field: Option<String>,
    pub kind: AttributeKind,
    pub aggregate: Option<AggFn>,
    pub bin: bool,
}

impl Encoding {
    pub fn field(name: &str, kind: AttributeKind) -> Encoding {
        Encoding {
            field: Some(name.to_string()),
            kind,
            aggregate: None,
            bin: false,
        }
    }

    pub fn count() -> Encoding {
        Encoding {
            field: None,
            kind: AttributeKind::Quantitative,
            aggregate: Some(AggFn::Count),
            bin: false,
        }
    }

    pub fn aggregated(name: &str, agg: AggFn) -> Encoding {
        Encoding {
            field: Some(name.to_string()),
            kind: AttributeKind::Quantitative,
            aggregate: Some(agg),
            bin: false,
        }
    }

    /// Column label of the encoded values, e.g. `mean(Production Budget)`.
    pub fn label(&self) -> String {
        match (&self.field, self.aggregate) {
            (None, Some(agg)) => agg.to_string(),
            (Some(f), Some(AggFn::Count)) => format!("count({f})"),
            (Some(f), Some(agg)) => format!("{agg}({f})"),
            (Some(f), None) => f.clone(),
            (None, None) => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartSpec {
    pub data: String,
    pub transforms: Vec<Transform>,
    pub mark: Mark,
    pub encodings: BTreeMap<Channel, Encoding>,
}

impl ChartSpec {
    pub fn filters(&self) -> impl Iterator<Item = &FilterTransform> {
        self.transforms.iter().filter_map(|t| match t {
            Transform::Filter(f) => Some(f),
            Transform::Bin { .. } => None,
        })
    }

    /// Fields in encodings (channel order) then transforms, without repeats.
    pub fn fields(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let encoded = self.encodings.values().filter_map(|e| e.field.clone());
        let transformed = self.transforms.iter().map(|t| t.field().to_string());
        for f in encoded.chain(transformed) {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }

    /// Encoded fields in channel order without repeats.
    pub fn encoded_fields(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for f in self.encodings.values().filter_map(|e| e.field.clone()) {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }

    pub fn bin_for(&self, field: &str) -> Option<usize> {
        self.transforms.iter().find_map(|t| match t {
            Transform::Bin { field: f, max_bins } if f == field => Some(*max_bins),
            _ => None,
        })
    }

    /// Checks the chart against a dataset and returns a copy with canonical
    /// attribute names, encoding kinds taken from the dataset, and filter
    /// operands re-typed to their attribute kinds.
    pub fn conform(&self, dataset: &Dataset) -> Result<ChartSpec> {
        if self.data != dataset.id() && self.data != dataset.name() {
            return Err(Error::SpecDatasetMismatch(format!(
                "spec data {:?} is not dataset {:?}",
                self.data,
                dataset.id()
            )));
        }
        let canonical = |f: &str| -> Result<String> {
            dataset
                .canonical_name(f)
                .map(str::to_string)
                .map_err(|_| Error::SpecDatasetMismatch(format!("unknown field {f:?}")))
        };
        let mut transforms = Vec::with_capacity(self.transforms.len());
        for t in &self.transforms {
            transforms.push(match t {
                Transform::Filter(f) => {
                    let field = canonical(&f.field)?;
                    let kind = dataset.kind_of(&field)?;
                    let predicate = f
                        .predicate
                        .coerced(kind)
                        .map_err(|e| Error::SpecDatasetMismatch(e.to_string()))?;
                    Transform::Filter(FilterTransform { field, predicate })
                }
                Transform::Bin { field, max_bins } => Transform::Bin {
                    field: canonical(field)?,
                    max_bins: *max_bins,
                },
            });
        }
        let mut encodings = BTreeMap::new();
        for (ch, e) in &self.encodings {
            let mut e = e.clone();
            if let Some(f) = &e.field {
                let f = canonical(f)?;
                let kind = dataset.kind_of(&f)?;
                if e.aggregate.is_some_and(AggFn::needs_quantitative) && kind != AttributeKind::Quantitative {
                    return Err(Error::SpecDatasetMismatch(format!("cannot aggregate non-quantitative field {f:?}")));
                }
                e.kind = if e.aggregate.is_some() { AttributeKind::Quantitative } else { kind };
                e.field = Some(f);
            }
            encodings.insert(*ch, e);
        }
        let spec = ChartSpec {
            data: dataset.id().to_string(),
            transforms,
            mark: self.mark,
            encodings,
        };
        spec.check_shape()?;
        Ok(spec)
    }

    /// Structural invariants that need no dataset.
    pub fn check_shape(&self) -> Result<()> {
        if !self.encodings.contains_key(&Channel::X) && !self.encodings.contains_key(&Channel::Y) {
            return Err(Error::InvalidSpec("spec needs an x or y encoding".into()));
        }
        for (ch, e) in &self.encodings {
            if e.field.is_none() && e.aggregate != Some(AggFn::Count) {
                return Err(Error::InvalidSpec(format!("{ch} encoding needs a field")));
            }
            if e.bin && e.kind != AttributeKind::Quantitative {
                return Err(Error::InvalidSpec(format!("{ch} bins a non-quantitative field")));
            }
            if e.bin && e.field.as_deref().and_then(|f| self.bin_for(f)).is_none() {
                return Err(Error::InvalidSpec(format!("{ch} is binned without a bin transform")));
            }
        }
        Ok(())
    }

    /// Equality used to validate generated examples: identical except that
    /// x and y may be exchanged when the mark is `point`.
    pub fn equivalent(&self, other: &ChartSpec) -> bool {
        if self == other {
            return true;
        }
        if self.mark != Mark::Point || other.mark != Mark::Point {
            return false;
        }
        let mut swapped = other.clone();
        let x = swapped.encodings.remove(&Channel::X);
        let y = swapped.encodings.remove(&Channel::Y);
        if let Some(y) = y {
            swapped.encodings.insert(Channel::X, y);
        }
        if let Some(x) = x {
            swapped.encodings.insert(Channel::Y, x);
        }
        *self == swapped
    }

    pub fn to_vega_lite(&self) -> serde_json::Value {
        let transform: Vec<serde_json::Value> = self
            .filters()
            .map(|f| {
                let mut filter = Map::new();
                filter.insert("field".into(), json!(f.field));
                let ops = f.predicate.operands();
                let one = || serde_json::to_value(&ops[0]).expect("values serialize");
                let all = || serde_json::to_value(ops).expect("values serialize");
                match f.predicate.op() {
                    FilterOp::Lt => filter.insert("lt".into(), one()),
                    FilterOp::Lte => filter.insert("lte".into(), one()),
                    FilterOp::Gt => filter.insert("gt".into(), one()),
                    FilterOp::Gte => filter.insert("gte".into(), one()),
                    FilterOp::Eq => filter.insert("equal".into(), one()),
                    FilterOp::Between => filter.insert("range".into(), all()),
                    FilterOp::OneOf => filter.insert("oneOf".into(), all()),
                    FilterOp::Neq => {
                        let mut inner = Map::new();
                        inner.insert("field".into(), json!(f.field));
                        inner.insert("equal".into(), one());
                        return json!({"filter": {"not": inner}});
                    }
                };
                json!({ "filter": filter })
            })
            .collect();

        let mut encoding = Map::new();
        for (ch, e) in &self.encodings {
            let mut enc = Map::new();
            if let Some(f) = &e.field {
                enc.insert("field".into(), json!(f));
            }
            enc.insert("type".into(), json!(e.kind.as_str()));
            if let Some(agg) = e.aggregate {
                enc.insert("aggregate".into(), json!(agg.as_str()));
            }
            if e.bin {
                let max_bins = e
                    .field
                    .as_deref()
                    .and_then(|f| self.bin_for(f))
                    .unwrap_or(DEFAULT_MAX_BINS);
                enc.insert("bin".into(), json!({ "maxbins": max_bins }));
            }
            encoding.insert(ch.as_str().into(), serde_json::Value::Object(enc));
        }

        json!({
            "data": { "name": self.data },
            "transform": transform,
            "mark": self.mark.as_str(),
            "encoding": encoding,
        })
    }

    pub fn from_vega_lite(doc: &serde_json::Value) -> Result<ChartSpec> {
        let bad = |msg: &str| Error::InvalidSpec(msg.to_string());
        let obj = doc.as_object().ok_or_else(|| bad("spec must be a JSON object"))?;
        let data = obj
            .get("data")
            .and_then(|d| d.get("name"))
            .and_then(|n| n.as_str())
            .ok_or_else(|| bad("data.name missing"))?
            .to_string();
        let mark = match obj.get("mark") {
            Some(serde_json::Value::String(s)) => Mark::parse(s),
            Some(serde_json::Value::Object(m)) => m.get("type").and_then(|t| t.as_str()).and_then(Mark::parse),
            _ => None,
        }
        .ok_or_else(|| bad("unsupported or missing mark"))?;

        let mut transforms = Vec::new();
        if let Some(list) = obj.get("transform") {
            let list = list.as_array().ok_or_else(|| bad("transform must be an array"))?;
            for t in list {
                let filter = t
                    .get("filter")
                    .and_then(|f| f.as_object())
                    .ok_or_else(|| bad("only filter transforms are supported"))?;
                transforms.push(Transform::Filter(parse_filter(filter)?));
            }
        }

        let mut encodings = BTreeMap::new();
        let mut bins = Vec::new();
        if let Some(enc) = obj.get("encoding") {
            let enc = enc.as_object().ok_or_else(|| bad("encoding must be an object"))?;
            for (name, def) in enc {
                let ch = Channel::parse(name).ok_or_else(|| Error::InvalidSpec(format!("unsupported channel {name:?}")))?;
                let def = def.as_object().ok_or_else(|| bad("channel definition must be an object"))?;
                let field = match def.get("field") {
                    None => None,
                    Some(f) => Some(f.as_str().ok_or_else(|| bad("field must be a string"))?.to_string()),
                };
                let kind: AttributeKind = def
                    .get("type")
                    .cloned()
                    .map(serde_json::from_value)
                    .transpose()
                    .map_err(|_| bad("unsupported encoding type"))?
                    .ok_or_else(|| bad("encoding type missing"))?;
                let aggregate = match def.get("aggregate") {
                    None => None,
                    Some(a) => Some(a.as_str().and_then(AggFn::parse).ok_or_else(|| bad("unsupported aggregate"))?),
                };
                let bin = match def.get("bin") {
                    None | Some(serde_json::Value::Bool(false)) => None,
                    Some(serde_json::Value::Bool(true)) => Some(DEFAULT_MAX_BINS),
                    Some(serde_json::Value::Object(b)) => Some(
                        b.get("maxbins")
                            .map(|m| m.as_u64().filter(|&m| m > 0).ok_or_else(|| bad("maxbins must be a positive integer")))
                            .transpose()?
                            .map_or(DEFAULT_MAX_BINS, |m| m as usize),
                    ),
                    Some(_) => return Err(bad("unsupported bin definition")),
                };
                if let (Some(max_bins), Some(f)) = (bin, &field) {
                    bins.push(Transform::Bin { field: f.clone(), max_bins });
                }
                encodings.insert(
                    ch,
                    Encoding {
                        field,
                        kind,
                        aggregate,
                        bin: bin.is_some(),
                    },
                );
            }
        }
        for b in bins {
            if !transforms.contains(&b) {
                transforms.push(b);
            }
        }
        let spec = ChartSpec {
            data,
            transforms,
            mark,
            encodings,
        };
        spec.check_shape()?;
        Ok(spec)
    }
}

fn parse_filter(filter: &Map<String, serde_json::Value>) -> Result<FilterTransform> {
    let bad = |msg: &str| Error::InvalidSpec(msg.to_string());
    if let Some(inner) = filter.get("not") {
        let inner = inner.as_object().ok_or_else(|| bad("not must wrap a predicate"))?;
        let eq = parse_filter(inner)?;
        if eq.predicate.op() != FilterOp::Eq {
            return Err(bad("only negated equality is supported"));
        }
        let operands = eq.predicate.operands().to_vec();
        return Ok(FilterTransform {
            field: eq.field,
            predicate: Predicate::new(FilterOp::Neq, operands).map_err(|e| Error::InvalidSpec(e.to_string()))?,
        });
    }
    let field = filter
        .get("field")
        .and_then(|f| f.as_str())
        .ok_or_else(|| bad("filter field missing"))?
        .to_string();
    let value = |v: &serde_json::Value| Value::from_json(v).map_err(Error::InvalidSpec);
    let list = |v: &serde_json::Value| -> Result<Vec<Value>> {
        v.as_array()
            .ok_or_else(|| bad("expected an array of operands"))?
            .iter()
            .map(value)
            .collect()
    };
    let (op, operands) = if let Some(v) = filter.get("lt") {
        (FilterOp::Lt, vec![value(v)?])
    } else if let Some(v) = filter.get("lte") {
        (FilterOp::Lte, vec![value(v)?])
    } else if let Some(v) = filter.get("gt") {
        (FilterOp::Gt, vec![value(v)?])
    } else if let Some(v) = filter.get("gte") {
        (FilterOp::Gte, vec![value(v)?])
    } else if let Some(v) = filter.get("equal") {
        (FilterOp::Eq, vec![value(v)?])
    } else if let Some(v) = filter.get("range") {
        (FilterOp::Between, list(v)?)
    } else if let Some(v) = filter.get("oneOf") {
        (FilterOp::OneOf, list(v)?)
    } else {
        return Err(bad("unsupported filter predicate"));
    };
    let predicate = Predicate::new(op, operands).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    Ok(FilterTransform { field, predicate })
}

impl Serialize for ChartSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vega_lite().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChartSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = serde_json::Value::deserialize(deserializer)?;
        ChartSpec::from_vega_lite(&doc).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for Predicate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            operator: FilterOp,
            operands: Vec<Value>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Predicate::new(raw.operator, raw.operands).map_err(serde::de::Error::custom)
    }
}
