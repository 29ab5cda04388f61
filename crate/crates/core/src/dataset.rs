//! Tabular datasets: CSV loading, attribute typing and summaries.
//!
//! A [`Dataset`] is immutable once built. Every row holds exactly one
//! [`Value`] per attribute, in attribute order.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::value::{parse_plain_number, AttributeKind, Timestamp, Value};

/// Number of typical values kept per attribute for the data overview.
pub const TYPICAL_VALUES: usize = 5;

/// Share of non-null values that must parse for a numeric or temporal kind.
const KIND_THRESHOLD: f64 = 0.95;

/// Maximum distinct values for an ordinal attribute.
const MAX_ORDINAL_DISTINCT: usize = 12;

/// Ordered vocabularies that mark a text column as ordinal. A column is
/// ordinal when every non-null value (case-insensitively) belongs to one of
/// these lists.
const ORDINAL_VOCABULARIES: &[&[&str]] = &[
    &["very low", "low", "medium", "high", "very high"],
    &["small", "medium", "large"],
    &["xs", "s", "m", "l", "xl", "xxl"],
    &["poor", "fair", "good", "very good", "excellent"],
    &["strongly disagree", "disagree", "neutral", "agree", "strongly agree"],
    &["never", "rarely", "sometimes", "often", "always"],
    &["first", "second", "third", "fourth", "fifth"],
    &[
        "january", "february", "march", "april", "may", "june", "july", "august", "september",
        "october", "november", "december",
    ],
    &["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"],
    &["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"],
    &["mon", "tue", "wed", "thu", "fri", "sat", "sun"],
    &["q1", "q2", "q3", "q4"],
];

const TEMPORAL_HEADER_WORDS: &[&str] = &["year", "date", "time"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttributeMeta {
    pub name: String,
    pub kind: AttributeKind,
    pub typical_values: Vec<Value>,
    pub distinct_count: usize,
    pub null_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    id: String,
    name: String,
    attributes: Vec<AttributeMeta>,
    rows: Vec<Vec<Value>>,
}

/// JSON summary shown in the data overview panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetOverview {
    pub name: String,
    pub attributes: Vec<AttributeSummary>,
    pub row_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AttributeSummary {
    pub name: String,
    pub kind: AttributeKind,
    pub typical_values: Vec<Value>,
    pub distinct_count: usize,
}

/// Reads an RFC 4180 CSV document with a header row.
pub fn load_csv<R: Read>(mut source: R, name: &str) -> Result<Dataset> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|e| Error::MalformedCsv(e.to_string()))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::MalformedCsv("input is not UTF-8".into()))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    // Doubled quotes inside quoted fields keep the count even, so an odd
    // count always means an unterminated field.
    if text.bytes().filter(|&b| b == b'"').count() % 2 != 0 {
        return Err(Error::MalformedCsv("unbalanced quotes".into()));
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Dataset::from_raw(name, headers, rows, dataset_id(name, &bytes))
}

fn csv_error(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => Error::MalformedCsv(format!(
            "ragged row{}: expected {expected_len} fields, found {len}",
            pos.as_ref().map(|p| format!(" at line {}", p.line())).unwrap_or_default()
        )),
        _ => Error::MalformedCsv(e.to_string()),
    }
}

fn dataset_id(name: &str, bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(name.as_bytes());
    hasher.update([0u8]);
    hasher.update(bytes);
    let digest = hasher.finalize();
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("ds-{hex}")
}

impl Dataset {
    /// Builds a dataset from raw string cells, inferring attribute kinds the
    /// same way [`load_csv`] does.
    pub fn from_rows(name: &str, headers: Vec<String>, rows: Vec<Vec<String>>) -> Result<Dataset> {
        let mut hasher = Sha256::new();
        for h in &headers {
            hasher.update(h.as_bytes());
            hasher.update([0x1f]);
        }
        for row in &rows {
            for c in row {
                hasher.update(c.as_bytes());
                hasher.update([0x1f]);
            }
            hasher.update([0x1e]);
        }
        let id = dataset_id(name, &hasher.finalize());
        Dataset::from_raw(name, headers, rows, id)
    }

    fn from_raw(name: &str, headers: Vec<String>, rows: Vec<Vec<String>>, id: String) -> Result<Dataset> {
        let mut seen: HashMap<String, ()> = HashMap::new();
        for h in &headers {
            if h.is_empty() {
                return Err(Error::MalformedCsv("empty column header".into()));
            }
            if seen.insert(h.to_lowercase(), ()).is_some() {
                return Err(Error::DuplicateHeader(h.clone()));
            }
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != headers.len()) {
            return Err(Error::MalformedCsv(format!(
                "ragged row {}: expected {} fields, found {}",
                bad + 1,
                headers.len(),
                rows[bad].len()
            )));
        }

        let mut typed: Vec<Vec<Value>> = vec![Vec::with_capacity(headers.len()); rows.len()];
        let mut attributes = Vec::with_capacity(headers.len());
        for (col, header) in headers.iter().enumerate() {
            let raw: Vec<&str> = rows.iter().map(|r| r[col].as_str()).collect();
            let kind = infer_kind(Some(header), &raw);
            for (r, cell) in raw.iter().enumerate() {
                typed[r].push(parse_cell(cell, kind));
            }
            attributes.push(AttributeMeta {
                name: header.clone(),
                kind,
                typical_values: Vec::new(),
                distinct_count: 0,
                null_count: 0,
            });
        }

        let mut dataset = Dataset {
            id,
            name: name.to_string(),
            attributes,
            rows: typed,
        };
        for col in 0..dataset.attributes.len() {
            let counts = dataset.value_counts(col);
            let nulls = dataset.rows.iter().filter(|r| r[col].is_null()).count();
            let meta = &mut dataset.attributes[col];
            meta.distinct_count = counts.len();
            meta.null_count = nulls;
            meta.typical_values = top_k(&counts, TYPICAL_VALUES);
        }
        Ok(dataset)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[AttributeMeta] {
        &self.attributes
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Case-insensitive attribute lookup.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.attributes
            .iter()
            .position(|a| a.name == name)
            .or_else(|| self.attributes.iter().position(|a| a.name.eq_ignore_ascii_case(name)))
    }

    pub fn attribute(&self, name: &str) -> Result<&AttributeMeta> {
        self.column_index(name)
            .map(|i| &self.attributes[i])
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn kind_of(&self, name: &str) -> Result<AttributeKind> {
        self.attribute(name).map(|a| a.kind)
    }

    /// Canonical spelling of an attribute name.
    pub fn canonical_name(&self, name: &str) -> Result<&str> {
        self.attribute(name).map(|a| a.name.as_str())
    }

    /// Noun used for the dataset's records in generated text, e.g. "movies".
    pub fn entity_noun(&self) -> String {
        let word = self
            .name
            .trim_end_matches(".csv")
            .split(|c: char| !c.is_alphabetic()).rfind(|w| !w.is_empty())
            .map(str::to_lowercase);
        match word {
            Some(w) if w.ends_with('s') => w,
            Some(w) => format!("{w}s"),
            None => "records".to_string(),
        }
    }

    /// Distinct non-null values of a column with their occurrence counts, in
    /// order of first appearance.
    fn value_counts(&self, col: usize) -> Vec<(Value, usize)> {
        let mut index: HashMap<&Value, usize> = HashMap::new();
        let mut counts: Vec<(Value, usize)> = Vec::new();
        for row in &self.rows {
            let v = &row[col];
            if v.is_null() {
                continue;
            }
            match index.get(v) {
                Some(&i) => counts[i].1 += 1,
                None => {
                    index.insert(v, counts.len());
                    counts.push((v.clone(), 1));
                }
            }
        }
        counts
    }

    /// Distinct non-null values of an attribute, in order of first appearance.
    pub fn distinct_values(&self, attribute: &str) -> Result<Vec<Value>> {
        let col = self
            .column_index(attribute)
            .ok_or_else(|| Error::UnknownAttribute(attribute.to_string()))?;
        Ok(self.value_counts(col).into_iter().map(|(v, _)| v).collect())
    }

    pub fn overview(&self) -> DatasetOverview {
        DatasetOverview {
            name: self.name.clone(),
            attributes: self
                .attributes
                .iter()
                .map(|a| AttributeSummary {
                    name: a.name.clone(),
                    kind: a.kind,
                    typical_values: a.typical_values.clone(),
                    distinct_count: a.distinct_count,
                })
                .collect(),
            row_count: self.rows.len(),
        }
    }
}

/// The `k` most frequent non-null values of `attribute`, most frequent first;
/// ties keep first-appearance order.
pub fn typical_values(dataset: &Dataset, attribute: &str, k: usize) -> Result<Vec<Value>> {
    let col = dataset
        .column_index(attribute)
        .ok_or_else(|| Error::UnknownAttribute(attribute.to_string()))?;
    Ok(top_k(&dataset.value_counts(col), k))
}

fn top_k(counts: &[(Value, usize)], k: usize) -> Vec<Value> {
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // stable sort keeps first appearance among equal counts
    order.sort_by(|&a, &b| counts[b].1.cmp(&counts[a].1));
    order.into_iter().take(k).map(|i| counts[i].0.clone()).collect()
}

/// Infers the kind of a column of raw cells without header information.
pub fn infer_attribute_kind(column: &[&str]) -> AttributeKind {
    infer_kind(None, column)
}

/// Kind precedence: temporal, quantitative, ordinal, nominal.
///
/// Four-digit years only count as temporal when the header (if known)
/// mentions a year, date or time; ISO dates always do.
pub fn infer_kind(header: Option<&str>, column: &[&str]) -> AttributeKind {
    let values: Vec<&str> = column.iter().map(|c| c.trim()).filter(|c| !c.is_empty()).collect();
    if values.is_empty() {
        return AttributeKind::Nominal;
    }
    let total = values.len() as f64;
    let header_allows_years = header.is_none_or(|h| {
        let h = h.to_lowercase();
        TEMPORAL_HEADER_WORDS.iter().any(|w| h.contains(w))
    });

    let temporal = values
        .iter()
        .filter(|v| Timestamp::parse_iso(v).is_some() || (header_allows_years && Timestamp::parse_year(v).is_some()))
        .count();
    if temporal as f64 >= KIND_THRESHOLD * total {
        return AttributeKind::Temporal;
    }

    let numeric = values.iter().filter(|v| parse_plain_number(v).is_some()).count();
    if numeric as f64 >= KIND_THRESHOLD * total {
        return AttributeKind::Quantitative;
    }

    let lowered: Vec<String> = values.iter().map(|v| v.to_lowercase()).collect();
    let mut distinct = lowered.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() <= MAX_ORDINAL_DISTINCT
        && ORDINAL_VOCABULARIES
            .iter()
            .any(|vocab| distinct.iter().all(|v| vocab.contains(&v.as_str())))
    {
        return AttributeKind::Ordinal;
    }
    AttributeKind::Nominal
}

/// Converts one raw cell to a value of `kind`. Empty cells, and cells that do
/// not conform to a numeric or temporal kind, become null.
pub fn parse_cell(raw: &str, kind: AttributeKind) -> Value {
    let raw = raw.trim();
    if raw.is_empty() {
        return Value::Null;
    }
    match kind {
        AttributeKind::Quantitative => parse_plain_number(raw).map_or(Value::Null, Value::Number),
        AttributeKind::Temporal => Timestamp::parse_iso(raw)
            .or_else(|| Timestamp::parse_year(raw))
            .map_or(Value::Null, Value::Timestamp),
        AttributeKind::Nominal | AttributeKind::Ordinal => Value::Text(raw.to_string()),
    }
}

/// Position of an ordinal value in its vocabulary, used for sorting.
pub fn ordinal_rank(value: &str) -> Option<usize> {
    let v = value.to_lowercase();
    ORDINAL_VOCABULARIES
        .iter()
        .find_map(|vocab| vocab.iter().position(|w| *w == v))
}
