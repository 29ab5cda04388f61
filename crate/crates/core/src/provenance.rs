//! Step-by-step execution of a chart over its dataset, with sampled
//! demonstration tables and visual cues for each step.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::spec::{AggFn, ChartSpec, FilterTransform, Transform};
use crate::value::{format_number, round_significant, AttributeKind, Value};

/// Default number of demonstration rows.
pub const DEFAULT_SAMPLE_SIZE: usize = 6;

/// Name of the synthetic key column used when the dataset has no nominal or
/// ordinal attribute.
pub const ROW_INDEX: &str = "#";

/// Significant digits of aggregate values shown in sample tables.
const SHOWN_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepOp {
    Load,
    Filter,
    Bin,
    GroupAggregate,
    Encode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Kept,
    Removed,
    MergedIntoGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRow {
    pub id: usize,
    pub values: Vec<Value>,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTable {
    pub columns: Vec<String>,
    pub rows: Vec<SampleRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CueKind {
    HighlightColumn,
    StrikeRow,
    MergeCells,
    LinkToMark,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CueTarget {
    Column(String),
    Row(usize),
    Group(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cue {
    pub kind: CueKind,
    pub target: CueTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Step {
    pub op: StepOp,
    pub descriptor: String,
    pub input_count: usize,
    pub output_count: usize,
    /// Column the step operates on (filters and bins).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    pub sample: SampleTable,
    pub cues: Vec<Cue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProvenanceTrace {
    pub key_attribute: String,
    pub relevant_columns: Vec<String>,
    pub sample_row_ids: Vec<usize>,
    /// Filters (by index among filters) that could have shown both a kept
    /// and a removed row but did not for lack of sample capacity.
    pub skipped_constraints: Vec<usize>,
    pub steps: Vec<Step>,
}

/// A grouping dimension of the chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim {
    pub field: String,
    pub binned: bool,
}

/// An aggregated measure: `field` is `None` for a record count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub field: Option<String>,
    pub agg: AggFn,
    pub label: String,
}

/// Splits a chart's encodings into grouping dimensions (raw or binned
/// fields) and aggregated measures, in channel order.
pub fn extract_group_aggregate(spec: &ChartSpec) -> (Vec<Dim>, Vec<Measure>) {
    let mut dims: Vec<Dim> = Vec::new();
    let mut measures: Vec<Measure> = Vec::new();
    for e in spec.encodings.values() {
        match (e.aggregate, &e.field) {
            (Some(agg), field) => {
                let m = Measure {
                    field: if agg == AggFn::Count { None } else { field.clone() },
                    agg,
                    label: e.label(),
                };
                if !measures.contains(&m) {
                    measures.push(m);
                }
            }
            (None, Some(f)) => {
                if !dims.iter().any(|d| d.field == *f) {
                    dims.push(Dim { field: f.clone(), binned: e.bin });
                }
            }
            (None, None) => {}
        }
    }
    (dims, measures)
}

/// The nominal or ordinal attribute with the lowest repetition rate
/// `1 - distinct/rows`, earliest column on ties; [`ROW_INDEX`] if none.
pub fn select_key_attribute(dataset: &Dataset) -> String {
    let rows = dataset.row_count().max(1) as f64;
    let mut best: Option<(f64, &str)> = None;
    for a in dataset.attributes() {
        if !a.kind.is_categorical() {
            continue;
        }
        let rate = 1.0 - a.distinct_count as f64 / rows;
        if best.is_none_or(|(r, _)| rate < r) {
            best = Some((rate, &a.name));
        }
    }
    best.map_or_else(|| ROW_INDEX.to_string(), |(_, n)| n.to_string())
}

/// Result table of an execution: one row per mark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// A group of rows sharing dimension values.
#[derive(Debug, Clone)]
struct Group {
    key: Vec<Value>,
    rows: Vec<usize>,
    measures: Vec<Value>,
}

impl Group {
    fn label(&self, dims: &[Dim], bins: &[Option<BinScale>]) -> String {
        if self.key.is_empty() {
            return "all".to_string();
        }
        self.key
            .iter()
            .zip(dims.iter().zip(bins))
            .map(|(v, (_, b))| match (b, v) {
                (Some(b), Value::Number(start)) => b.label(*start),
                _ => v.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// Equal-width bins over `[min, max]`; every bin is right-open except the last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinScale {
    pub min: f64,
    pub width: f64,
    pub max: f64,
    pub bins: usize,
}

impl BinScale {
    fn fit(values: impl Iterator<Item = f64>, bins: usize) -> Option<BinScale> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo <= hi).then(|| BinScale {
            min: lo,
            width: (hi - lo) / bins as f64,
            max: hi,
            bins,
        })
    }

    pub fn index(&self, v: f64) -> usize {
        if self.width == 0.0 {
            return 0;
        }
        (((v - self.min) / self.width).floor() as usize).min(self.bins - 1)
    }

    pub fn start(&self, v: f64) -> f64 {
        self.min + self.index(v) as f64 * self.width
    }

    fn label(&self, start: f64) -> String {
        let end = start + self.width;
        let last = self.width == 0.0 || end >= self.max;
        let end = if last { self.max } else { end };
        let (a, b) = (format_number(round_significant(start, SHOWN_DIGITS)), format_number(round_significant(end, SHOWN_DIGITS)));
        if last {
            format!("[{a}, {b}]")
        } else {
            format!("[{a}, {b})")
        }
    }
}

/// Full-data execution of a chart: per-step counts and the final table.
#[derive(Debug, Clone)]
pub struct Execution {
    /// Rows alive before each filter, and after the last one.
    pub alive: Vec<Vec<usize>>,
    pub bins: Vec<(String, BinScale)>,
    pub dims: Vec<Dim>,
    pub measures: Vec<Measure>,
    groups: Option<Vec<Group>>,
    pub table: ResultTable,
}

impl Execution {
    pub fn survivors(&self) -> &[usize] {
        self.alive.last().expect("at least the loaded rows")
    }

    pub fn group_count(&self) -> Option<usize> {
        self.groups.as_ref().map(Vec::len)
    }

    fn bin_of(&self, field: &str) -> Option<&BinScale> {
        self.bins.iter().find(|(f, _)| f == field).map(|(_, b)| b)
    }

    fn dim_value(&self, dataset: &Dataset, row: usize, dim: &Dim) -> Value {
        let col = dataset.column_index(&dim.field).expect("conformed field");
        let v = &dataset.rows()[row][col];
        match (self.bin_of(&dim.field), v) {
            (Some(b), Value::Number(n)) if dim.binned => Value::Number(b.start(*n)),
            _ => v.clone(),
        }
    }
}

fn filters(spec: &ChartSpec) -> Vec<&FilterTransform> {
    spec.filters().collect()
}

/// Numerically stable sum (Neumaier).
fn stable_sum(values: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn aggregate(dataset: &Dataset, rows: &[usize], m: &Measure) -> Value {
    if m.agg == AggFn::Count {
        return Value::Number(rows.len() as f64);
    }
    let col = dataset
        .column_index(m.field.as_deref().expect("non-count measures have a field"))
        .expect("conformed field");
    let values: Vec<f64> = rows.iter().filter_map(|&r| dataset.rows()[r][col].as_number()).collect();
    if values.is_empty() {
        return Value::Null;
    }
    let n = match m.agg {
        AggFn::Sum => stable_sum(&values),
        AggFn::Mean => stable_sum(&values) / values.len() as f64,
        AggFn::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
        AggFn::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        AggFn::Count => unreachable!(),
    };
    Value::Number(n)
}

/// Executes a conformed chart over the whole dataset.
pub fn execute(spec: &ChartSpec, dataset: &Dataset) -> Result<Execution> {
    let spec = spec.conform(dataset)?;
    let mut alive: Vec<Vec<usize>> = vec![(0..dataset.row_count()).collect()];
    for f in filters(&spec) {
        let col = dataset.column_index(&f.field).expect("conformed field");
        let next = alive
            .last()
            .expect("non-empty")
            .iter()
            .copied()
            .filter(|&r| f.predicate.test(&dataset.rows()[r][col]))
            .collect();
        alive.push(next);
    }
    let survivors = alive.last().expect("non-empty").clone();
    let mut bins = Vec::new();
    for t in &spec.transforms {
        if let Transform::Bin { field, max_bins } = t {
            let col = dataset.column_index(field).expect("conformed field");
            let values = survivors.iter().filter_map(|&r| dataset.rows()[r][col].as_number());
            if let Some(scale) = BinScale::fit(values, (*max_bins).max(1)) {
                bins.push((field.clone(), scale));
            }
        }
    }
    let (dims, measures) = extract_group_aggregate(&spec);
    let mut exec = Execution {
        alive,
        bins,
        dims,
        measures,
        groups: None,
        table: ResultTable { columns: Vec::new(), rows: Vec::new() },
    };
    let mut columns: Vec<String> = exec.dims.iter().map(|d| d.field.clone()).collect();
    if exec.measures.is_empty() {
        exec.table = ResultTable {
            columns,
            rows: survivors
                .iter()
                .map(|&r| exec.dims.iter().map(|d| exec.dim_value(dataset, r, d)).collect())
                .collect(),
        };
        return Ok(exec);
    }
    let mut keyed: Vec<(Vec<Value>, usize)> = survivors
        .iter()
        .map(|&r| (exec.dims.iter().map(|d| exec.dim_value(dataset, r, d)).collect(), r))
        .collect();
    keyed.sort_by(|(a, ra), (b, rb)| cmp_keys(a, b).then(ra.cmp(rb)));
    let mut groups: Vec<Group> = Vec::new();
    for (key, r) in keyed {
        match groups.last_mut() {
            Some(g) if cmp_keys(&g.key, &key) == Ordering::Equal => g.rows.push(r),
            _ => groups.push(Group { key, rows: vec![r], measures: Vec::new() }),
        }
    }
    for g in &mut groups {
        g.measures = exec.measures.iter().map(|m| aggregate(dataset, &g.rows, m)).collect();
    }
    columns.extend(exec.measures.iter().map(|m| m.label.clone()));
    exec.table = ResultTable {
        columns,
        rows: groups.iter().map(|g| g.key.iter().chain(&g.measures).cloned().collect()).collect(),
    };
    exec.groups = Some(groups);
    Ok(exec)
}

fn cmp_keys(a: &[Value], b: &[Value]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Sampled rows and the filter constraints that could not be honoured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub row_ids: Vec<usize>,
    pub skipped: Vec<usize>,
}

/// Chooses at most `n` demonstration rows so that each filter step shows
/// both a row it keeps and a row it removes whenever the data reaching that
/// step has both.
///
/// Filters are visited in order. A missing removed row is filled with the
/// lowest-id qualifying row. A missing kept row is filled with the lowest-id
/// row among those that survive the most later filters, so that one row can
/// demonstrate every later "kept" case as well. Remaining capacity is padded
/// with the lowest-id unused rows.
pub fn select_sample(spec: &ChartSpec, dataset: &Dataset, n: usize) -> Result<Sample> {
    let spec = spec.conform(dataset)?;
    let fs = filters(&spec);
    let cols: Vec<usize> = fs
        .iter()
        .map(|f| dataset.column_index(&f.field).expect("conformed field"))
        .collect();
    let passes = |f: usize, r: usize| fs[f].predicate.test(&dataset.rows()[r][cols[f]]);
    // Number of consecutive filters a row passes from the start.
    let depth = |r: usize| (0..fs.len()).take_while(|&f| passes(f, r)).count();
    let mut chosen: Vec<usize> = Vec::new();
    let mut skipped = Vec::new();
    for f in 0..fs.len() {
        let reaching = |r: &usize| depth(*r) >= f;
        let alive: Vec<usize> = (0..dataset.row_count()).filter(reaching).collect();
        let has_pass = chosen.iter().any(|&r| reaching(&r) && passes(f, r));
        let has_fail = chosen.iter().any(|&r| reaching(&r) && !passes(f, r));
        let mut ok = true;
        if !has_pass {
            let best = alive
                .iter()
                .copied()
                .filter(|&r| passes(f, r))
                .max_by(|&a, &b| depth(a).cmp(&depth(b)).then(b.cmp(&a)));
            ok &= match best {
                Some(r) if chosen.len() < n => {
                    chosen.push(r);
                    true
                }
                Some(_) => false,
                None => true,
            };
        }
        if !has_fail {
            let first = alive.iter().copied().find(|&r| !passes(f, r));
            ok &= match first {
                Some(r) if chosen.len() < n => {
                    chosen.push(r);
                    true
                }
                Some(_) => false,
                None => true,
            };
        }
        if !ok {
            skipped.push(f);
        }
    }
    for r in 0..dataset.row_count() {
        if chosen.len() >= n {
            break;
        }
        if !chosen.contains(&r) {
            chosen.push(r);
        }
    }
    chosen.sort_unstable();
    Ok(Sample { row_ids: chosen, skipped })
}

fn describe_encodings(spec: &ChartSpec) -> String {
    let channels: Vec<String> = spec
        .encodings
        .iter()
        .map(|(ch, e)| {
            let label = if e.bin { format!("bin({})", e.label()) } else { e.label() };
            format!("{ch} = {label}")
        })
        .collect();
    format!("Encode as {}: {}", spec.mark.chart_name(), channels.join(", "))
}

/// Builds the provenance trace of a chart with the default sample size.
pub fn build_trace(spec: &ChartSpec, dataset: &Dataset) -> Result<ProvenanceTrace> {
    build_trace_with(spec, dataset, DEFAULT_SAMPLE_SIZE)
}

pub fn build_trace_with(spec: &ChartSpec, dataset: &Dataset, sample_size: usize) -> Result<ProvenanceTrace> {
    let spec = spec.conform(dataset)?;
    let exec = execute(&spec, dataset)?;
    let sample = select_sample(&spec, dataset, sample_size)?;
    let key = select_key_attribute(dataset);
    let aggregated = !exec.measures.is_empty();

    let mut relevant: Vec<String> = spec.fields();
    if aggregated {
        relevant.extend(exec.measures.iter().map(|m| m.label.clone()));
    }
    let mut base_columns = vec![key.clone()];
    base_columns.extend(spec.fields().into_iter().filter(|f| *f != key));

    let row_values = |r: usize, binned: bool| -> Vec<Value> {
        base_columns
            .iter()
            .map(|c| {
                if c == ROW_INDEX {
                    return Value::Number(r as f64);
                }
                let col = dataset.column_index(c).expect("conformed field");
                let v = dataset.rows()[r][col].clone();
                match (binned, exec.bin_of(c), &v) {
                    (true, Some(b), Value::Number(n)) => Value::Text(b.label(b.start(*n))),
                    _ => v,
                }
            })
            .collect()
    };
    let in_sample = |alive: &[usize]| -> Vec<usize> {
        sample.row_ids.iter().copied().filter(|r| alive.contains(r)).collect()
    };

    let mut steps = Vec::new();
    let n = dataset.row_count();
    steps.push(Step {
        op: StepOp::Load,
        descriptor: format!("Load {} ({} rows)", dataset.name(), n),
        input_count: n,
        output_count: n,
        column: None,
        sample: SampleTable {
            columns: base_columns.clone(),
            rows: sample
                .row_ids
                .iter()
                .map(|&r| SampleRow { id: r, values: row_values(r, false), status: RowStatus::Kept, group: None })
                .collect(),
        },
        cues: Vec::new(),
    });

    for (i, f) in filters(&spec).into_iter().enumerate() {
        let before = &exec.alive[i];
        let after = &exec.alive[i + 1];
        steps.push(Step {
            op: StepOp::Filter,
            descriptor: format!("{} {}", f.field, f.predicate.describe()),
            input_count: before.len(),
            output_count: after.len(),
            column: Some(f.field.clone()),
            sample: SampleTable {
                columns: base_columns.clone(),
                rows: in_sample(before)
                    .into_iter()
                    .map(|r| SampleRow {
                        id: r,
                        values: row_values(r, false),
                        status: if after.contains(&r) { RowStatus::Kept } else { RowStatus::Removed },
                        group: None,
                    })
                    .collect(),
            },
            cues: Vec::new(),
        });
    }

    let survivors = exec.survivors().to_vec();
    let shown = in_sample(&survivors);
    for t in &spec.transforms {
        let Transform::Bin { field, max_bins } = t else { continue };
        steps.push(Step {
            op: StepOp::Bin,
            descriptor: format!("Bin {field} into {max_bins} bins"),
            input_count: survivors.len(),
            output_count: survivors.len(),
            column: Some(field.clone()),
            sample: SampleTable {
                columns: base_columns.clone(),
                rows: shown
                    .iter()
                    .map(|&r| SampleRow { id: r, values: row_values(r, true), status: RowStatus::Kept, group: None })
                    .collect(),
            },
            cues: Vec::new(),
        });
    }

    let bin_scales: Vec<Option<BinScale>> = exec
        .dims
        .iter()
        .map(|d| if d.binned { exec.bin_of(&d.field).copied() } else { None })
        .collect();
    let mut encode_count = survivors.len();
    let mut grouped_columns = base_columns.clone();
    if let Some(groups) = &exec.groups {
        grouped_columns.extend(exec.measures.iter().map(|m| m.label.clone()));
        let group_of = |r: usize| groups.iter().find(|g| g.rows.contains(&r)).expect("survivor is grouped");
        let grouped_row = |r: usize, status: RowStatus| {
            let g = group_of(r);
            let mut values = row_values(r, true);
            values.extend(g.measures.iter().map(|v| match v {
                Value::Number(x) => Value::Number(round_significant(*x, SHOWN_DIGITS)),
                other => other.clone(),
            }));
            SampleRow { id: r, values, status, group: Some(g.label(&exec.dims, &bin_scales)) }
        };
        let dims: Vec<&str> = exec.dims.iter().map(|d| d.field.as_str()).collect();
        let measures: Vec<&str> = exec.measures.iter().map(|m| m.label.as_str()).collect();
        let descriptor = if dims.is_empty() {
            format!("Aggregate {}", measures.join(", "))
        } else {
            format!("Group by {}; aggregate {}", dims.join(", "), measures.join(", "))
        };
        steps.push(Step {
            op: StepOp::GroupAggregate,
            descriptor,
            input_count: survivors.len(),
            output_count: groups.len(),
            column: None,
            sample: SampleTable {
                columns: grouped_columns.clone(),
                rows: shown.iter().map(|&r| grouped_row(r, RowStatus::MergedIntoGroup)).collect(),
            },
            cues: Vec::new(),
        });
        encode_count = groups.len();
        steps.push(Step {
            op: StepOp::Encode,
            descriptor: describe_encodings(&spec),
            input_count: encode_count,
            output_count: encode_count,
            column: None,
            sample: SampleTable {
                columns: grouped_columns,
                rows: shown.iter().map(|&r| grouped_row(r, RowStatus::Kept)).collect(),
            },
            cues: Vec::new(),
        });
    } else {
        steps.push(Step {
            op: StepOp::Encode,
            descriptor: describe_encodings(&spec),
            input_count: encode_count,
            output_count: encode_count,
            column: None,
            sample: SampleTable {
                columns: base_columns.clone(),
                rows: shown
                    .iter()
                    .map(|&r| SampleRow { id: r, values: row_values(r, true), status: RowStatus::Kept, group: None })
                    .collect(),
            },
            cues: Vec::new(),
        });
    }

    let trace = ProvenanceTrace {
        key_attribute: key,
        relevant_columns: relevant,
        sample_row_ids: sample.row_ids,
        skipped_constraints: sample.skipped,
        steps,
    };
    Ok(annotate_cues(trace))
}

/// Derives the visual cues of every step from its sample view.
pub fn annotate_cues(mut trace: ProvenanceTrace) -> ProvenanceTrace {
    for step in &mut trace.steps {
        let mut cues = Vec::new();
        match step.op {
            StepOp::Load => {}
            StepOp::Filter | StepOp::Bin => {
                if let Some(c) = &step.column {
                    cues.push(Cue { kind: CueKind::HighlightColumn, target: CueTarget::Column(c.clone()) });
                }
                for r in step.sample.rows.iter().filter(|r| r.status == RowStatus::Removed) {
                    cues.push(Cue { kind: CueKind::StrikeRow, target: CueTarget::Row(r.id) });
                }
            }
            StepOp::GroupAggregate => {
                let mut seen: Vec<&str> = Vec::new();
                for g in step.sample.rows.iter().filter_map(|r| r.group.as_deref()) {
                    if !seen.contains(&g) {
                        seen.push(g);
                        cues.push(Cue { kind: CueKind::MergeCells, target: CueTarget::Group(g.to_string()) });
                    }
                }
            }
            StepOp::Encode => {
                let mut seen: Vec<&str> = Vec::new();
                for r in &step.sample.rows {
                    match r.group.as_deref() {
                        Some(g) if seen.contains(&g) => {}
                        Some(g) => {
                            seen.push(g);
                            cues.push(Cue { kind: CueKind::LinkToMark, target: CueTarget::Group(g.to_string()) });
                        }
                        None => cues.push(Cue { kind: CueKind::LinkToMark, target: CueTarget::Row(r.id) }),
                    }
                }
            }
        }
        step.cues = cues;
    }
    trace
}

/// Non-null values of `field` among the rows reaching filter `index`, as
/// (min, max) for ordered kinds or the typical values otherwise.
pub fn values_before_filter(spec: &ChartSpec, dataset: &Dataset, index: usize) -> Result<Vec<Value>> {
    let exec = execute(spec, dataset)?;
    let spec = spec.conform(dataset)?;
    let Some(f) = spec.filters().nth(index) else { return Ok(Vec::new()) };
    let col = dataset.column_index(&f.field).expect("conformed field");
    let kind = dataset.kind_of(&f.field)?;
    let rows = &exec.alive[index];
    let mut values: Vec<Value> = rows
        .iter()
        .map(|&r| dataset.rows()[r][col].clone())
        .filter(|v| !v.is_null())
        .collect();
    values.sort_by(Value::total_cmp);
    values.dedup();
    if matches!(kind, AttributeKind::Quantitative | AttributeKind::Temporal) && values.len() > 2 {
        let last = values.len() - 1;
        values = vec![values[0].clone(), values[last].clone()];
    }
    Ok(values)
}
