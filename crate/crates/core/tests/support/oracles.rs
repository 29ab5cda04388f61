//! Reference implementations used to check the engine: a brute-force chart
//! executor, a DP edit-distance matcher and an exhaustive sample search.
//! They share no code with the engine beyond its data types.
#![allow(dead_code)]

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xnli_core::provenance::{build_trace, execute, select_sample};
use xnli_core::spec::FilterTransform;
use xnli_core::*;

// ---------------------------------------------------------------------------
// Random tables and charts

const COLORS: &[&str] = &["red", "green", "blue", "cyan"];

/// A random table of up to `max_rows` rows with a nominal column `k`,
/// quantitative `a` (integers) and `b` (decimals), and a temporal `year`.
pub fn random_table(rng: &mut ChaCha8Rng, max_rows: usize) -> Dataset {
    let n = rng.gen_range(1..=max_rows);
    let null = |rng: &mut ChaCha8Rng| rng.gen_bool(0.04);
    let rows: Vec<Vec<String>> = (0..n)
        .map(|_| {
            let k = if null(rng) { String::new() } else { COLORS[rng.gen_range(0..COLORS.len())].to_string() };
            let a = if null(rng) { String::new() } else { rng.gen_range(-50..=50).to_string() };
            let b = format!("{:.3}", rng.gen_range(0.0..1000.0));
            let y = rng.gen_range(1990..=2020).to_string();
            vec![k, a, b, y]
        })
        .collect();
    let headers = ["k", "a", "b", "year"].iter().map(|s| s.to_string()).collect();
    Dataset::from_rows("t", headers, rows).unwrap()
}

fn random_filter(rng: &mut ChaCha8Rng, ds: &Dataset) -> Transform {
    let field = ["k", "a", "b", "year"][rng.gen_range(0..4)];
    let kind = ds.kind_of(field).unwrap();
    let number = |rng: &mut ChaCha8Rng| match field {
        "a" => Value::Number(rng.gen_range(-55..=55) as f64),
        "b" => Value::Number((rng.gen_range(0.0..1000.0f64) * 10.0).round() / 10.0),
        _ => Value::Timestamp(Timestamp::from_year(rng.gen_range(1988..=2022)).unwrap()),
    };
    let predicate = if kind.is_categorical() {
        let pick = |rng: &mut ChaCha8Rng| Value::Text(COLORS[rng.gen_range(0..COLORS.len())].into());
        match rng.gen_range(0..3) {
            0 => Predicate::new(FilterOp::Eq, vec![pick(rng)]),
            1 => Predicate::new(FilterOp::Neq, vec![pick(rng)]),
            _ => Predicate::new(FilterOp::OneOf, vec![pick(rng), pick(rng)]),
        }
    } else {
        let ops = [FilterOp::Lt, FilterOp::Lte, FilterOp::Gt, FilterOp::Gte, FilterOp::Eq, FilterOp::Neq, FilterOp::Between];
        match *ops.choose(rng).unwrap() {
            FilterOp::Between => {
                let (mut lo, mut hi) = (number(rng), number(rng));
                if lo.total_cmp(&hi) == Ordering::Greater {
                    std::mem::swap(&mut lo, &mut hi);
                }
                Predicate::new(FilterOp::Between, vec![lo, hi])
            }
            op => Predicate::new(op, vec![number(rng)]),
        }
    }
    .unwrap();
    Transform::Filter(FilterTransform { field: field.into(), predicate })
}

/// A random chart over [`random_table`] columns with at most three
/// transforms.
pub fn random_chart(rng: &mut ChaCha8Rng, ds: &Dataset) -> ChartSpec {
    use AttributeKind::*;
    let q = |f: &str| Encoding::field(f, Quantitative);
    let agg = |rng: &mut ChaCha8Rng| [AggFn::Mean, AggFn::Sum, AggFn::Min, AggFn::Max][rng.gen_range(0..4)];
    let family = rng.gen_range(0..7);
    let mut bin = None;
    let (mark, enc): (Mark, Vec<(Channel, Encoding)>) = match family {
        0 => (Mark::Point, vec![(Channel::X, q("a")), (Channel::Y, q("b"))]),
        1 => (Mark::Bar, vec![(Channel::X, Encoding::field("k", Nominal)), (Channel::Y, Encoding::count())]),
        2 => {
            let f = if rng.gen_bool(0.5) { "a" } else { "b" };
            (Mark::Bar, vec![(Channel::X, Encoding::field("k", Nominal)), (Channel::Y, Encoding::aggregated(f, agg(rng)))])
        }
        3 => (Mark::Line, vec![(Channel::X, Encoding::field("year", Temporal)), (Channel::Y, Encoding::count())]),
        4 => {
            let f = if rng.gen_bool(0.5) { "a" } else { "b" };
            let mut x = q(f);
            x.bin = true;
            bin = Some(Transform::Bin { field: f.into(), max_bins: rng.gen_range(1..=12) });
            (Mark::Bar, vec![(Channel::X, x), (Channel::Y, Encoding::count())])
        }
        5 => (
            Mark::Line,
            vec![
                (Channel::X, Encoding::field("year", Temporal)),
                (Channel::Y, Encoding::aggregated("b", agg(rng))),
                (Channel::Color, Encoding::field("k", Nominal)),
            ],
        ),
        _ => (
            Mark::Point,
            vec![(Channel::X, q("a")), (Channel::Y, q("b")), (Channel::Color, Encoding::field("k", Nominal))],
        ),
    };
    let max_filters = if bin.is_some() { 2 } else { 3 };
    let mut transforms: Vec<Transform> = (0..rng.gen_range(0..=max_filters)).map(|_| random_filter(rng, ds)).collect();
    transforms.extend(bin);
    ChartSpec { data: ds.id().into(), transforms, mark, encodings: enc.into_iter().collect() }
}

// ---------------------------------------------------------------------------
// Brute-force executor

fn ref_compare(v: &Value, o: &Value) -> Option<Ordering> {
    match (v, o) {
        (Value::Number(a), Value::Number(b)) => a.partial_cmp(b),
        (Value::Text(a), Value::Text(b)) => Some(a.as_str().cmp(b.as_str())),
        (Value::Timestamp(a), Value::Timestamp(b)) => Some(a.cmp(b)),
        _ => None,
    }
}

fn ref_test(op: FilterOp, operands: &[Value], v: &Value) -> bool {
    if v.is_null() {
        return false;
    }
    let c = |i: usize| ref_compare(v, &operands[i]);
    match op {
        FilterOp::Lt => c(0) == Some(Ordering::Less),
        FilterOp::Lte => c(0).is_some_and(|o| o != Ordering::Greater),
        FilterOp::Gt => c(0) == Some(Ordering::Greater),
        FilterOp::Gte => c(0).is_some_and(|o| o != Ordering::Less),
        FilterOp::Eq => c(0) == Some(Ordering::Equal),
        FilterOp::Neq => c(0).is_some_and(|o| o != Ordering::Equal),
        FilterOp::Between => {
            c(0).is_some_and(|o| o != Ordering::Less) && c(1).is_some_and(|o| o != Ordering::Greater)
        }
        FilterOp::OneOf => operands.iter().any(|o| ref_compare(v, o) == Some(Ordering::Equal)),
    }
}

fn rank(v: &Value) -> u8 {
    match v {
        Value::Null => 0,
        Value::Number(_) => 1,
        Value::Text(_) => 2,
        Value::Timestamp(_) => 3,
    }
}

fn key_cmp(a: &[Value], b: &[Value]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = match (x, y) {
            (Value::Number(p), Value::Number(q)) => p.partial_cmp(q).unwrap(),
            _ => ref_compare(x, y).unwrap_or_else(|| rank(x).cmp(&rank(y))),
        };
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

pub struct Reference {
    /// Output row count of every trace step, in order.
    pub step_counts: Vec<usize>,
    pub table: Vec<Vec<Value>>,
}

pub fn ref_execute(spec: &ChartSpec, ds: &Dataset) -> Reference {
    let col = |f: &str| ds.attributes().iter().position(|a| a.name == f).unwrap();
    let rows = ds.rows();
    let mut alive: Vec<usize> = (0..rows.len()).collect();
    let mut counts = vec![alive.len()];
    for t in &spec.transforms {
        if let Transform::Filter(f) = t {
            let c = col(&f.field);
            alive.retain(|&r| ref_test(f.predicate.op(), f.predicate.operands(), &rows[r][c]));
            counts.push(alive.len());
        }
    }
    // Bin scales from the surviving rows.
    let mut scales: Vec<(String, f64, f64, usize)> = Vec::new();
    for t in &spec.transforms {
        if let Transform::Bin { field, max_bins } = t {
            let c = col(field);
            let vals: Vec<f64> = alive.iter().filter_map(|&r| rows[r][c].as_number()).collect();
            if let (Some(lo), Some(hi)) = (
                vals.iter().copied().reduce(f64::min),
                vals.iter().copied().reduce(f64::max),
            ) {
                scales.push((field.clone(), lo, (hi - lo) / *max_bins as f64, *max_bins));
            }
            counts.push(alive.len());
        }
    }
    let dim_value = |r: usize, e: &Encoding| -> Value {
        let f = e.field.as_deref().unwrap();
        let v = rows[r][col(f)].clone();
        match (e.bin, scales.iter().find(|s| s.0 == f), &v) {
            (true, Some((_, lo, w, n)), Value::Number(x)) => {
                let i = if *w == 0.0 { 0 } else { (((x - lo) / w).floor() as usize).min(n - 1) };
                Value::Number(lo + i as f64 * w)
            }
            _ => v,
        }
    };
    let mut dims: Vec<&Encoding> = Vec::new();
    let mut measures: Vec<&Encoding> = Vec::new();
    for ch in [Channel::X, Channel::Y, Channel::Color, Channel::Size] {
        let Some(e) = spec.encodings.get(&ch) else { continue };
        if e.aggregate.is_some() {
            if !measures.iter().any(|m| m.aggregate == e.aggregate && (m.field == e.field || e.aggregate == Some(AggFn::Count))) {
                measures.push(e);
            }
        } else if !dims.iter().any(|d| d.field == e.field) {
            dims.push(e);
        }
    }
    if measures.is_empty() {
        counts.push(alive.len());
        let table = alive.iter().map(|&r| dims.iter().map(|d| dim_value(r, d)).collect()).collect();
        return Reference { step_counts: counts, table };
    }
    let mut groups: Vec<(Vec<Value>, Vec<usize>)> = Vec::new();
    for &r in &alive {
        let key: Vec<Value> = dims.iter().map(|d| dim_value(r, d)).collect();
        match groups.iter_mut().find(|(k, _)| key_cmp(k, &key) == Ordering::Equal) {
            Some((_, members)) => members.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups.sort_by(|a, b| key_cmp(&a.0, &b.0));
    counts.push(groups.len());
    counts.push(groups.len());
    let table = groups
        .iter()
        .map(|(key, members)| {
            let mut row = key.clone();
            for m in &measures {
                let agg = m.aggregate.unwrap();
                if agg == AggFn::Count {
                    row.push(Value::Number(members.len() as f64));
                    continue;
                }
                let c = col(m.field.as_deref().unwrap());
                let xs: Vec<f64> = members.iter().filter_map(|&r| rows[r][c].as_number()).collect();
                row.push(if xs.is_empty() {
                    Value::Null
                } else {
                    Value::Number(match agg {
                        AggFn::Sum => xs.iter().sum(),
                        AggFn::Mean => xs.iter().sum::<f64>() / xs.len() as f64,
                        AggFn::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
                        AggFn::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        AggFn::Count => unreachable!(),
                    })
                });
            }
            row
        })
        .collect();
    Reference { step_counts: counts, table }
}

fn close(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            x == y || (x - y).abs() <= 1e-9 * x.abs().max(y.abs())
        }
        _ => a == b,
    }
}

/// Compares the engine's trace counts and result table with the reference.
pub fn check_execution(spec: &ChartSpec, ds: &Dataset) -> Result<(), String> {
    let expected = ref_execute(spec, ds);
    let trace = build_trace(spec, ds).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = trace.steps.iter().map(|s| s.output_count).collect();
    if counts != expected.step_counts {
        return Err(format!("step counts {counts:?} != {:?}", expected.step_counts));
    }
    let exec = execute(spec, ds).map_err(|e| e.to_string())?;
    let got = &exec.table.rows;
    if got.len() != expected.table.len() {
        return Err(format!("{} result rows != {}", got.len(), expected.table.len()));
    }
    for (g, e) in got.iter().zip(&expected.table) {
        if g.len() != e.len() || !g.iter().zip(e).all(|(a, b)| close(a, b)) {
            return Err(format!("row {g:?} != {e:?}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Fuzzy matching

/// Whether `token` is close enough to `name` under the 0.2 length rule,
/// measured with an independent Levenshtein implementation.
pub fn oracle_close(token: &str, name: &str) -> Option<usize> {
    let d = strsim::levenshtein(&token.to_lowercase(), &name.to_lowercase());
    (d as f64 <= 0.2 * name.chars().count() as f64).then_some(d)
}

/// A lowercase word from a small alphabet so that near misses are common.
fn word(rng: &mut ChaCha8Rng, len: usize) -> String {
    const LETTERS: &[u8] = b"aeiorstnlkm";
    (0..len).map(|_| LETTERS[rng.gen_range(0..LETTERS.len())] as char).collect()
}

/// A (name, token) pair where the token is an edited copy of the name.
pub fn fuzzy_pair(rng: &mut ChaCha8Rng) -> (String, String) {
    let len = rng.gen_range(3..=12);
    let name = word(rng, len);
    let mut token: Vec<char> = name.chars().collect();
    for _ in 0..rng.gen_range(0..=3) {
        let i = rng.gen_range(0..=token.len());
        match rng.gen_range(0..3) {
            0 => token.insert(i, word(rng, 1).chars().next().unwrap()),
            1 if i < token.len() && token.len() > 1 => {
                token.remove(i);
            }
            _ if i < token.len() => token[i] = word(rng, 1).chars().next().unwrap(),
            _ => {}
        }
    }
    (name, token.into_iter().collect())
}

/// Runs the interpreter on a one-word query against a one-column table and
/// checks the match decision and the misspelling hint against the oracle.
/// Returns `Ok(false)` when the token collides with a reserved word and the
/// pair says nothing about matching.
pub fn check_fuzzy(name: &str, token: &str) -> Result<bool, String> {
    if text::is_stopword(token) || lexicon::is_keyword(token) || token == "t" || token == "ts" {
        return Ok(false);
    }
    let ds = Dataset::from_rows("t", vec![name.to_string()], vec![vec!["1".into()], vec!["2".into()]]).unwrap();
    let interp = interpret(token, &ds, &PreferenceStore::new()).map_err(|e| e.to_string())?;
    let matched = interp.attribute_refs.iter().find(|r| r.attribute == name);
    let expected = oracle_close(token, name);
    match (expected, matched) {
        (None, None) => Ok(true),
        (Some(0), Some(r)) if r.fuzzy.is_empty() && r.inference == Inference::Explicit => Ok(true),
        (Some(d), Some(r)) if d > 0 => {
            if r.fuzzy.len() != 1 || r.fuzzy[0].distance != d {
                return Err(format!("{token:?} vs {name:?}: fuzzy record {:?}, oracle distance {d}", r.fuzzy));
            }
            let spec = synthesize(&interp, &ds).map_err(|e| e.to_string())?;
            let trace = build_trace(&spec, &ds).map_err(|e| e.to_string())?;
            let hints = rule_based_hints(&interp, &spec, &trace, &ds);
            if hints.iter().filter(|h| h.kind == HintKind::Misspelling).count() != 1 {
                return Err(format!("{token:?} vs {name:?}: expected one misspelling hint, got {hints:?}"));
            }
            Ok(true)
        }
        (e, m) => Err(format!("{token:?} vs {name:?}: oracle {e:?}, engine {:?}", m.map(|r| &r.fuzzy))),
    }
}

// ---------------------------------------------------------------------------
// Sampling

/// Filters of a chart that have both kept and removed rows among the rows
/// reaching them, with those rows. A sample satisfies the chart when, for
/// every such filter, it contains a kept and a removed row reaching it.
fn demanding_filters(spec: &ChartSpec, ds: &Dataset) -> Vec<(Vec<usize>, Vec<usize>)> {
    let rows = ds.rows();
    let filters: Vec<&FilterTransform> = spec.filters().collect();
    let mut alive: Vec<usize> = (0..rows.len()).collect();
    let mut out = Vec::new();
    for f in filters {
        let c = ds.attributes().iter().position(|a| a.name == f.field).unwrap();
        let (kept, removed): (Vec<usize>, Vec<usize>) =
            alive.iter().partition(|&&r| ref_test(f.predicate.op(), f.predicate.operands(), &rows[r][c]));
        if !kept.is_empty() && !removed.is_empty() {
            out.push((kept.clone(), removed));
        }
        alive = kept;
    }
    out
}

pub fn satisfies(sample: &[usize], spec: &ChartSpec, ds: &Dataset) -> bool {
    demanding_filters(spec, ds)
        .iter()
        .all(|(k, r)| sample.iter().any(|s| k.contains(s)) && sample.iter().any(|s| r.contains(s)))
}

/// Whether some set of at most `n` rows satisfies the chart.
pub fn satisfiable(spec: &ChartSpec, ds: &Dataset, n: usize) -> bool {
    let m = ds.row_count();
    let demands = demanding_filters(spec, ds);
    (0u32..1 << m).filter(|s| s.count_ones() as usize <= n).any(|set| {
        let pick = |rows: &Vec<usize>| rows.iter().any(|r| set >> r & 1 == 1);
        demands.iter().all(|(k, r)| pick(k) && pick(r))
    })
}

/// A small table with a chain of numeric filters that is likely to make
/// sampling choices matter.
pub fn sampling_case(rng: &mut ChaCha8Rng) -> (Dataset, ChartSpec, usize) {
    let m = rng.gen_range(2..=12);
    let rows: Vec<Vec<String>> = (0..m)
        .map(|_| (0..3).map(|_| rng.gen_range(0..6).to_string()).collect())
        .collect();
    let ds = Dataset::from_rows("s", vec!["u".into(), "v".into(), "w".into()], rows).unwrap();
    let mut transforms = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let field = ["u", "v", "w"][rng.gen_range(0..3)];
        let op = [FilterOp::Lt, FilterOp::Gt, FilterOp::Gte, FilterOp::Lte, FilterOp::Neq][rng.gen_range(0..5)];
        let predicate = Predicate::new(op, vec![Value::Number(rng.gen_range(0..6) as f64)]).unwrap();
        transforms.push(Transform::Filter(FilterTransform { field: field.into(), predicate }));
    }
    let spec = ChartSpec {
        data: ds.id().into(),
        transforms,
        mark: Mark::Point,
        encodings: [
            (Channel::X, Encoding::field("u", AttributeKind::Quantitative)),
            (Channel::Y, Encoding::field("v", AttributeKind::Quantitative)),
        ]
        .into_iter()
        .collect(),
    };
    (ds, spec, rng.gen_range(2..=5))
}

/// `Ok(true)` when the case was provably satisfiable and the engine's sample
/// satisfies it, `Ok(false)` when no satisfying sample exists.
pub fn check_sampling(ds: &Dataset, spec: &ChartSpec, n: usize) -> Result<bool, String> {
    if !satisfiable(spec, ds, n) {
        return Ok(false);
    }
    let sample = select_sample(spec, ds, n).map_err(|e| e.to_string())?;
    if sample.row_ids.len() > n {
        return Err(format!("sample of {} rows exceeds {n}", sample.row_ids.len()));
    }
    if !sample.skipped.is_empty() || !satisfies(&sample.row_ids, spec, ds) {
        return Err(format!("sample {:?} (skipped {:?}) misses a demonstrable filter", sample.row_ids, sample.skipped));
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Discriminator

pub fn movies() -> Dataset {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/movies.csv");
    load_csv(std::fs::File::open(path).unwrap(), "movies").unwrap()
}

const QUANT: &[&str] = &["Worldwide Gross", "Production Budget", "IMDB Rating", "Running Time"];
const NOMINAL: &[&str] = &["Genre", "Content Rating", "Creative Type"];

fn movie_filter(rng: &mut ChaCha8Rng, ds: &Dataset) -> Transform {
    let (field, predicate) = match rng.gen_range(0..4) {
        0 => {
            let f = ["Worldwide Gross", "Production Budget"][rng.gen_range(0..2)];
            let op = [FilterOp::Gt, FilterOp::Lt, FilterOp::Gte, FilterOp::Lte][rng.gen_range(0..4)];
            (f, Predicate::new(op, vec![Value::Number(rng.gen_range(1..=5) as f64 * 50e6)]))
        }
        1 => {
            let op = [FilterOp::Gt, FilterOp::Lt][rng.gen_range(0..2)];
            (
                "Release Year",
                Predicate::new(op, vec![Value::Timestamp(Timestamp::from_year(rng.gen_range(1998..=2010)).unwrap())]),
            )
        }
        2 => {
            let op = [FilterOp::Gt, FilterOp::Lt, FilterOp::Gte][rng.gen_range(0..3)];
            ("IMDB Rating", Predicate::new(op, vec![Value::Number(rng.gen_range(6..=8) as f64)]))
        }
        _ => {
            let values = ds.distinct_values("Genre").unwrap();
            let v = values[rng.gen_range(0..values.len())].clone();
            ("Genre", Predicate::new(FilterOp::Eq, vec![v]))
        }
    };
    Transform::Filter(FilterTransform { field: field.into(), predicate: predicate.unwrap() })
}

/// A random valid chart over the movies fixture.
pub fn random_movie_chart(rng: &mut ChaCha8Rng, ds: &Dataset) -> ChartSpec {
    use AttributeKind::*;
    let mut qs = QUANT.to_vec();
    qs.shuffle(rng);
    let n = NOMINAL[rng.gen_range(0..NOMINAL.len())];
    let agg = [AggFn::Mean, AggFn::Sum, AggFn::Min, AggFn::Max][rng.gen_range(0..4)];
    let mut bin = None;
    let (mark, enc): (Mark, Vec<(Channel, Encoding)>) = match rng.gen_range(0..6) {
        0 => (Mark::Point, vec![(Channel::X, Encoding::field(qs[0], Quantitative)), (Channel::Y, Encoding::field(qs[1], Quantitative))]),
        1 => (
            Mark::Point,
            vec![
                (Channel::X, Encoding::field(qs[0], Quantitative)),
                (Channel::Y, Encoding::field(qs[1], Quantitative)),
                (Channel::Color, Encoding::field(n, Nominal)),
            ],
        ),
        2 => (Mark::Bar, vec![(Channel::X, Encoding::field(n, Nominal)), (Channel::Y, Encoding::aggregated(qs[0], agg))]),
        3 => (Mark::Bar, vec![(Channel::X, Encoding::field(n, Nominal)), (Channel::Y, Encoding::count())]),
        4 => {
            let mut x = Encoding::field(qs[0], Quantitative);
            x.bin = true;
            bin = Some(Transform::Bin { field: qs[0].into(), max_bins: 10 });
            (Mark::Bar, vec![(Channel::X, x), (Channel::Y, Encoding::count())])
        }
        _ => {
            let y = if rng.gen_bool(0.5) { Encoding::count() } else { Encoding::aggregated(qs[0], agg) };
            (Mark::Line, vec![(Channel::X, Encoding::field("Release Year", Temporal)), (Channel::Y, y)])
        }
    };
    let mut transforms: Vec<Transform> = (0..rng.gen_range(0..=2)).map(|_| movie_filter(rng, ds)).collect();
    transforms.extend(bin);
    let spec = ChartSpec { data: ds.id().into(), transforms, mark, encodings: enc.into_iter().collect() };
    spec.conform(ds).unwrap()
}

/// Checks every validated example of `target` against the pipeline and the
/// determinism of the recommendation. Returns the number of examples.
pub fn check_discriminator(target: &ChartSpec, ds: &Dataset, seed: u64) -> Result<usize, String> {
    let ex = match generate_examples(target, ds, seed) {
        Ok(ex) => ex,
        Err(Error::NoValidExample) => return Ok(0),
        Err(e) => return Err(e.to_string()),
    };
    for e in &ex.valid {
        let interp = interpret(&e.text, ds, &PreferenceStore::new()).map_err(|x| format!("{}: {x}", e.text))?;
        let spec = synthesize(&interp, ds).map_err(|x| format!("{}: {x}", e.text))?;
        if !e.validated || !spec.equivalent(target) {
            return Err(format!("{:?} does not reproduce the target", e.text));
        }
    }
    let again = generate_examples(target, ds, seed).map_err(|e| e.to_string())?;
    if again.recommended != ex.recommended {
        return Err("recommendation is not deterministic".into());
    }
    Ok(ex.valid.len())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
