//! One-call entry points shared by the CLI and the HTTP service.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::examples::{generate_examples, QueryExample};
use crate::hints::{interaction_hints, rule_based_hints, Hint};
use crate::interpret::{interpret, Interpretation, PreferenceStore};
use crate::provenance::{build_trace, ProvenanceTrace};
use crate::spec::ChartSpec;
use crate::synthesize::{apply_adjustment, resolve_ambiguity, synthesize, Adjustment};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub interp: Interpretation,
    pub spec: ChartSpec,
    pub trace: ProvenanceTrace,
    pub hints: Vec<Hint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustResponse {
    /// The interpretation the chart now stands for. It only differs from the
    /// previous one after an ambiguity is resolved.
    pub interp: Interpretation,
    pub spec: ChartSpec,
    pub trace: ProvenanceTrace,
    pub hints: Vec<Hint>,
    pub examples: Vec<QueryExample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommended: Option<QueryExample>,
}

/// Interprets `query`, builds the chart and explains it.
pub fn explain(query: &str, dataset: &Dataset, prefs: &PreferenceStore) -> Result<QueryResponse> {
    let interp = interpret(query, dataset, prefs)?;
    let spec = synthesize(&interp, dataset)?;
    let trace = build_trace(&spec, dataset)?;
    let hints = rule_based_hints(&interp, &spec, &trace, dataset);
    Ok(QueryResponse { interp, spec, trace, hints })
}

/// Applies a widget edit to the chart built from `interp`, explains the new
/// chart and teaches the wording that would have produced it. `seed` picks
/// the recommended query example.
pub fn adjust(
    interp: &Interpretation,
    spec: &ChartSpec,
    adj: &Adjustment,
    dataset: &Dataset,
    prefs: &PreferenceStore,
    seed: u64,
) -> Result<AdjustResponse> {
    let (next_interp, after) = match adj {
        Adjustment::ResolveAmbiguity { token, field } => resolve_ambiguity(interp, token, field, dataset, prefs)?,
        _ => (interp.clone(), apply_adjustment(spec, adj, dataset, Some(interp))?),
    };
    let trace = build_trace(&after, dataset)?;
    let mut hints = interaction_hints(spec, adj, &after, interp, dataset)?;
    let (examples, recommended) = match generate_examples(&after, dataset, seed) {
        Ok(ex) => (ex.valid, Some(ex.recommended)),
        Err(Error::NoValidExample) => (Vec::new(), None),
        Err(e) => return Err(e),
    };
    if let Some(r) = &recommended {
        for h in &mut hints {
            h.examples.push(r.clone());
        }
    }
    Ok(AdjustResponse { interp: next_interp, spec: after, trace, hints, examples, recommended })
}
