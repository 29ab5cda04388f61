use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine can report.
///
/// The variant name doubles as the stable machine-readable error code used by
/// the CLI and HTTP front ends (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("duplicate column header {0:?}")]
    DuplicateHeader(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("query is empty")]
    EmptyQuery,
    #[error("{0:?} is not a number")]
    NotANumber(String),
    #[error("cannot encode the interpretation: {0}")]
    Unencodable(String),
    #[error("invalid adjustment: {0}")]
    InvalidAdjustment(String),
    #[error("chart spec does not match the dataset: {0}")]
    SpecDatasetMismatch(String),
    #[error("invalid chart spec: {0}")]
    InvalidSpec(String),
    #[error("adjusted spec is not the result of applying the adjustment")]
    InconsistentDelta,
    #[error("no generated query example survived validation")]
    NoValidExample,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedCsv(_) => "MalformedCsv",
            Error::EmptyDataset => "EmptyDataset",
            Error::DuplicateHeader(_) => "DuplicateHeader",
            Error::UnknownAttribute(_) => "UnknownAttribute",
            Error::EmptyQuery => "EmptyQuery",
            Error::NotANumber(_) => "NotANumber",
            Error::Unencodable(_) => "Unencodable",
            Error::InvalidAdjustment(_) => "InvalidAdjustment",
            Error::SpecDatasetMismatch(_) => "SpecDatasetMismatch",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::InconsistentDelta => "InconsistentDelta",
            Error::NoValidExample => "NoValidExample",
        }
    }
}
