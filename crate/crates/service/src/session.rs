//! Per-session state: the current chart, learned ambiguity preferences and
//! the interaction log. Everything here is synchronous and deterministic
//! given the log, which is what makes replay possible.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};
use xnli_core::{
    adjust, explain, AdjustResponse, Adjustment, ChartSpec, Dataset, Inference, Interpretation, PreferenceStore,
    QueryResponse,
};

use crate::error::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogKind {
    Query,
    Adjustment,
    HintShown,
    AmbiguityResolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: usize,
    pub timestamp: DateTime<Utc>,
    pub kind: LogKind,
    pub payload: Json,
}

/// An ambiguous word shown with its default attribute, waiting for the user
/// to either resolve it or move on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingChoice {
    pub token: String,
    pub attribute: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Current {
    pub interp: Interpretation,
    pub spec: ChartSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub id: String,
    pub dataset_id: String,
    pub current: Option<Current>,
    pub prefs: PreferenceStore,
    pub pending: Vec<PendingChoice>,
    pub log: Vec<LogEntry>,
}

/// Canonical response bytes: compact JSON with sorted keys.
pub fn response_bytes<T: Serialize>(response: &T) -> Vec<u8> {
    let value = serde_json::to_value(response).expect("responses serialize");
    serde_json::to_vec(&value).expect("json values serialize")
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Seed for example recommendation: a hash of the session id and the log
/// length at the time of the request.
pub fn derive_seed(session_id: &str, log_len: usize) -> u64 {
    let h = Sha256::digest(format!("{session_id}:{log_len}").as_bytes());
    u64::from_be_bytes(h[..8].try_into().expect("8 bytes"))
}

impl Session {
    pub fn new(id: &str, dataset_id: &str) -> Session {
        Session {
            id: id.to_string(),
            dataset_id: dataset_id.to_string(),
            current: None,
            prefs: PreferenceStore::new(),
            pending: Vec::new(),
            log: Vec::new(),
        }
    }

    fn append(&mut self, kind: LogKind, payload: Json) -> usize {
        let now = Utc::now();
        let timestamp = self.log.last().map_or(now, |e| e.timestamp.max(now));
        let seq = self.log.len();
        self.log.push(LogEntry { seq, timestamp, kind, payload });
        seq
    }

    fn log_hints(&mut self, seq: usize, kinds: Vec<String>) {
        if !kinds.is_empty() {
            self.append(LogKind::HintShown, json!({ "response": seq, "hints": kinds }));
        }
    }

    fn check_dataset(&self, dataset: &Dataset) -> Result<(), ServiceError> {
        if dataset.id() != self.dataset_id {
            return Err(ServiceError::NoDataset(self.dataset_id.clone()));
        }
        Ok(())
    }

    /// Runs a query. Ambiguous words shown by the previous response and not
    /// resolved since are committed to their default attribute first.
    pub fn post_query(&mut self, dataset: &Dataset, query: &str) -> Result<QueryResponse, ServiceError> {
        self.check_dataset(dataset)?;
        let mut prefs = self.prefs.clone();
        let mut agreed = Vec::new();
        for p in &self.pending {
            if !prefs.contains(&p.token) {
                prefs.set(&p.token, &p.attribute);
                agreed.push(p.clone());
            }
        }
        let response = explain(query, dataset, &prefs)?;
        self.prefs = prefs;
        self.pending = ambiguous_choices(&response.interp);
        self.current = Some(Current { interp: response.interp.clone(), spec: response.spec.clone() });
        let bytes = response_bytes(&response);
        let seq = self.append(
            LogKind::Query,
            json!({ "query": query, "implicitAgreement": agreed, "digest": digest(&bytes) }),
        );
        self.log_hints(seq, hint_kinds(&response.hints));
        Ok(response)
    }

    /// Applies a widget edit to the current chart. `seed` overrides the
    /// derived example seed.
    pub fn post_adjustment(
        &mut self,
        dataset: &Dataset,
        adj: &Adjustment,
        seed: Option<u64>,
    ) -> Result<AdjustResponse, ServiceError> {
        self.check_dataset(dataset)?;
        let seed = seed.unwrap_or_else(|| derive_seed(&self.id, self.log.len()));
        self.apply_logged_adjustment(dataset, adj, seed)
    }

    fn apply_logged_adjustment(&mut self, dataset: &Dataset, adj: &Adjustment, seed: u64) -> Result<AdjustResponse, ServiceError> {
        let current = self.current.as_ref().ok_or(ServiceError::NoCurrentSpec)?;
        let response = adjust(&current.interp, &current.spec, adj, dataset, &self.prefs, seed)?;
        let kind = match adj {
            Adjustment::ResolveAmbiguity { token, field } => {
                self.prefs.set(token, field);
                let key = xnli_core::text::normalize(token);
                self.pending.retain(|p| xnli_core::text::normalize(&p.token) != key);
                LogKind::AmbiguityResolved
            }
            _ => LogKind::Adjustment,
        };
        self.current = Some(Current { interp: response.interp.clone(), spec: response.spec.clone() });
        let bytes = response_bytes(&response);
        let seq = self.append(kind, json!({ "adjustment": adj, "seed": seed, "digest": digest(&bytes) }));
        self.log_hints(seq, hint_kinds(&response.hints));
        Ok(response)
    }
}

fn hint_kinds(hints: &[xnli_core::Hint]) -> Vec<String> {
    hints
        .iter()
        .map(|h| serde_json::to_value(h.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
        .collect()
}

fn ambiguous_choices(interp: &Interpretation) -> Vec<PendingChoice> {
    let mut out: Vec<PendingChoice> = Vec::new();
    for r in interp.attribute_refs.iter().filter(|r| r.inference == Inference::Ambiguous) {
        for s in &r.spans {
            let token = xnli_core::text::normalize(s.slice(&interp.query));
            if !out.iter().any(|p| p.token == token) {
                out.push(PendingChoice { token, attribute: r.attribute.clone() });
            }
        }
    }
    out
}

/// One replayed response, as canonical bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replayed {
    pub seq: usize,
    pub bytes: Vec<u8>,
    /// Whether the bytes hash to the digest recorded in the original log.
    pub matches_log: bool,
}

/// Replays the responses of a log against a fresh session with the same id.
/// Hint entries are informational and skipped.
pub fn replay(id: &str, dataset: &Dataset, log: &[LogEntry]) -> Result<(Session, Vec<Replayed>), ServiceError> {
    let mut session = Session::new(id, dataset.id());
    let mut out = Vec::new();
    for entry in log {
        let p = &entry.payload;
        let bytes = match entry.kind {
            LogKind::HintShown => continue,
            LogKind::Query => {
                let q = p["query"].as_str().ok_or(ServiceError::BadLog(entry.seq))?;
                response_bytes(&session.post_query(dataset, q)?)
            }
            LogKind::Adjustment | LogKind::AmbiguityResolved => {
                let adj: Adjustment =
                    serde_json::from_value(p["adjustment"].clone()).map_err(|_| ServiceError::BadLog(entry.seq))?;
                let seed = p["seed"].as_u64().ok_or(ServiceError::BadLog(entry.seq))?;
                response_bytes(&session.apply_logged_adjustment(dataset, &adj, seed)?)
            }
        };
        let matches_log = p["digest"].as_str() == Some(digest(&bytes).as_str());
        out.push(Replayed { seq: entry.seq, bytes, matches_log });
    }
    Ok((session, out))
}
