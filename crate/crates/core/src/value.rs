//! Cell values and attribute kinds.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

/// The four attribute kinds of the visualization grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Quantitative,
    Nominal,
    Ordinal,
    Temporal,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Quantitative => "quantitative",
            AttributeKind::Nominal => "nominal",
            AttributeKind::Ordinal => "ordinal",
            AttributeKind::Temporal => "temporal",
        }
    }

    /// Nominal or ordinal.
    pub fn is_categorical(self) -> bool {
        matches!(self, AttributeKind::Nominal | AttributeKind::Ordinal)
    }

    /// Kinds whose values support `<`/`>` comparison in filters.
    pub fn is_ordered_scalar(self) -> bool {
        matches!(self, AttributeKind::Quantitative | AttributeKind::Temporal)
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point in time with second resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Timestamp(NaiveDateTime);

impl Timestamp {
    pub fn from_year(year: i32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, 1, 1)
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .map(Timestamp)
    }

    pub fn from_datetime(dt: NaiveDateTime) -> Self {
        Timestamp(dt)
    }

    pub fn datetime(&self) -> NaiveDateTime {
        self.0
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    /// True when the timestamp is midnight on January 1st, i.e. it carries
    /// only year information.
    pub fn is_year_only(&self) -> bool {
        self.0.month() == 1 && self.0.day() == 1 && self.0.num_seconds_from_midnight() == 0
    }

    /// Parses `YYYY-MM-DD`, `YYYY/MM/DD` and the same followed by a
    /// `HH:MM:SS` time separated by `T` or a space.
    pub fn parse_iso(s: &str) -> Option<Self> {
        let s = s.trim();
        for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
            if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
                return Some(Timestamp(dt));
            }
        }
        for fmt in ["%Y-%m-%d", "%Y/%m/%d"] {
            if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
                return d.and_hms_opt(0, 0, 0).map(Timestamp);
            }
        }
        None
    }

    /// Parses a bare four-digit year in `[1000, 2999]`.
    pub fn parse_year(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.len() != 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let year: i32 = s.parse().ok()?;
        if (1000..=2999).contains(&year) {
            Timestamp::from_year(year)
        } else {
            None
        }
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_year_only() {
            write!(f, "{}", self.0.year())
        } else if self.0.num_seconds_from_midnight() == 0 {
            write!(f, "{}", self.0.format("%Y-%m-%d"))
        } else {
            write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%S"))
        }
    }
}

/// One cell of a dataset.
///
/// Numbers are always finite. Serialized to JSON as `null`, a number, a
/// string, or (for timestamps) a Vega-Lite `DateTime` object such as
/// `{"year": 2009}`.
#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Number(f64),
    Text(String),
    Timestamp(Timestamp),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Number(_) => 1,
            Value::Text(_) => 2,
            Value::Timestamp(_) => 3,
        }
    }

    /// Comparison used by filter predicates: only values of the same variant
    /// are comparable and null compares with nothing.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a.partial_cmp(b),
            (Value::Text(a), Value::Text(b)) => Some(a.cmp(b)),
            (Value::Timestamp(a), Value::Timestamp(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Total order used for sorting groups: null < numbers < text < timestamps.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) if a == b => Ordering::Equal,
            (Value::Number(a), Value::Number(b)) => a.total_cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Timestamp(a), Value::Timestamp(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    /// Re-types a loosely parsed value (e.g. from JSON, where a year arrives as
    /// a number and a number may arrive as a string) to match `kind`.
    pub fn coerce_to(&self, kind: AttributeKind) -> Option<Value> {
        match (kind, self) {
            (_, Value::Null) => Some(Value::Null),
            (AttributeKind::Quantitative, Value::Number(_)) => Some(self.clone()),
            (AttributeKind::Quantitative, Value::Text(s)) => {
                crate::interpret::parse_numeric_literal(s).ok().map(Value::Number)
            }
            (AttributeKind::Temporal, Value::Timestamp(_)) => Some(self.clone()),
            (AttributeKind::Temporal, Value::Number(n)) => {
                if n.fract() == 0.0 && (1000.0..=2999.0).contains(n) {
                    Timestamp::from_year(*n as i32).map(Value::Timestamp)
                } else {
                    None
                }
            }
            (AttributeKind::Temporal, Value::Text(s)) => Timestamp::parse_iso(s)
                .or_else(|| Timestamp::parse_year(s))
                .map(Value::Timestamp),
            (AttributeKind::Nominal | AttributeKind::Ordinal, Value::Text(_)) => Some(self.clone()),
            (AttributeKind::Nominal | AttributeKind::Ordinal, other) => {
                Some(Value::Text(other.to_string()))
            }
            _ => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.total_cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Null => {}
            // -0.0 == 0.0, so both must hash alike.
            Value::Number(n) => {
                let n = if *n == 0.0 { 0.0 } else { *n };
                n.to_bits().hash(state)
            }
            Value::Text(s) => s.hash(state),
            Value::Timestamp(t) => t.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Number(n) => write!(f, "{}", format_number(*n)),
            Value::Text(s) => f.write_str(s),
            Value::Timestamp(t) => write!(f, "{t}"),
        }
    }
}

/// Parses a plain decimal number: optional sign, digits with optional
/// thousands separators, optional fraction and exponent. Rejects `inf`/`nan`
/// and anything else `f64::from_str` would accept beyond that grammar.
pub fn parse_plain_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b',') {
        i += 1;
    }
    let int_part = &s[int_start..i];
    if int_part.contains(',') && !valid_thousands(int_part) {
        return None;
    }
    let mut digits = int_part.len();
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    s.replace(',', "").parse::<f64>().ok().filter(|n| n.is_finite())
}

fn valid_thousands(int_part: &str) -> bool {
    let groups: Vec<&str> = int_part.split(',').collect();
    let first = groups[0];
    !first.is_empty() && first.len() <= 3 && groups[1..].iter().all(|g| g.len() == 3)
}

/// Plain decimal rendering without a trailing `.0` for integers.
pub fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 9.0e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

/// Rounds to `digits` significant decimal digits.
pub fn round_significant(n: f64, digits: usize) -> f64 {
    if n == 0.0 || !n.is_finite() {
        return n;
    }
    format!("{:.*e}", digits.saturating_sub(1), n)
        .parse()
        .unwrap_or(n)
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Null => serializer.serialize_none(),
            Value::Number(n) => {
                if n.fract() == 0.0 && n.abs() < 9.0e15 {
                    serializer.serialize_i64(*n as i64)
                } else {
                    serializer.serialize_f64(*n)
                }
            }
            Value::Text(s) => serializer.serialize_str(s),
            Value::Timestamp(t) => {
                let dt = t.datetime();
                let mut fields: Vec<(&str, i64)> = vec![("year", dt.year() as i64)];
                if !t.is_year_only() {
                    fields.push(("month", dt.month() as i64));
                    fields.push(("date", dt.day() as i64));
                    if dt.num_seconds_from_midnight() != 0 {
                        fields.push(("hours", dt.hour() as i64));
                        fields.push(("minutes", dt.minute() as i64));
                        fields.push(("seconds", dt.second() as i64));
                    }
                }
                let mut map = serializer.serialize_map(Some(fields.len()))?;
                for (k, v) in fields {
                    map.serialize_entry(k, &v)?;
                }
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = serde_json::Value::deserialize(deserializer)?;
        Value::from_json(&json).map_err(de::Error::custom)
    }
}

impl Value {
    pub fn from_json(json: &serde_json::Value) -> Result<Value, String> {
        match json {
            serde_json::Value::Null => Ok(Value::Null),
            serde_json::Value::Number(n) => n
                .as_f64()
                .filter(|f| f.is_finite())
                .map(Value::Number)
                .ok_or_else(|| format!("unrepresentable number {n}")),
            serde_json::Value::String(s) => Ok(Value::Text(s.clone())),
            serde_json::Value::Object(obj) => {
                let get = |k: &str, default: i64| -> Result<i64, String> {
                    match obj.get(k) {
                        None => Ok(default),
                        Some(v) => v.as_i64().ok_or_else(|| format!("DateTime field {k} must be an integer")),
                    }
                };
                let year = obj
                    .get("year")
                    .and_then(|v| v.as_i64())
                    .ok_or("DateTime object requires an integer year")?;
                let date = NaiveDate::from_ymd_opt(year as i32, get("month", 1)? as u32, get("date", 1)? as u32)
                    .ok_or("invalid DateTime date")?;
                let dt = date
                    .and_hms_opt(get("hours", 0)? as u32, get("minutes", 0)? as u32, get("seconds", 0)? as u32)
                    .ok_or("invalid DateTime time")?;
                Ok(Value::Timestamp(Timestamp::from_datetime(dt)))
            }
            other => Err(format!("unsupported value {other}")),
        }
    }
}
