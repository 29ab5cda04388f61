//! Explainable natural-language-to-visualization engine.
//!
//! The pipeline interprets a query against a [`Dataset`], synthesizes a
//! Vega-Lite compatible [`ChartSpec`], reconstructs the data provenance of
//! the chart step by step, and diagnoses problems as hints with validated
//! query examples.

pub mod dataset;
pub mod error;
pub mod examples;
pub mod hints;
pub mod interpret;
pub mod lexicon;
pub mod pipeline;
pub mod provenance;
pub mod spec;
pub mod synthesize;
pub mod text;
pub mod value;

pub use dataset::{load_csv, AttributeMeta, Dataset, DatasetOverview};
pub use error::{Error, Result};
pub use interpret::{interpret, AttributeRef, Inference, Interpretation, PreferenceStore, TaskKind, TaskRef};
pub use provenance::{build_trace, ProvenanceTrace};
pub use spec::{AggFn, Channel, ChartSpec, Encoding, FilterOp, Mark, Predicate, Transform};
pub use text::Span;
pub use value::{AttributeKind, Timestamp, Value};
pub use synthesize::{apply_adjustment, synthesize, Adjustment};
pub use examples::{generate_examples, Examples, QueryExample};
pub use hints::{interaction_hints, rule_based_hints, Hint, HintKind};
pub use pipeline::{adjust, explain, AdjustResponse, QueryResponse};
