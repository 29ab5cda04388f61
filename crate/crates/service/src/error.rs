use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Core(#[from] xnli_core::Error),
    #[error("{0} not found")]
    NotFound(String),
    #[error("session is busy with another request")]
    Busy,
    #[error("the session has no chart to adjust yet")]
    NoCurrentSpec,
    #[error("dataset {0} is not loaded")]
    NoDataset(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("log entry {0} cannot be replayed")]
    BadLog(usize),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Core(e) => e.code(),
            ServiceError::NotFound(_) => "NotFound",
            ServiceError::Busy => "Busy",
            ServiceError::NoCurrentSpec => "NoCurrentSpec",
            ServiceError::NoDataset(_) => "NoDataset",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::BadLog(_) => "BadLog",
            ServiceError::Internal(_) => "Internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Busy | ServiceError::NoCurrentSpec => StatusCode::CONFLICT,
            ServiceError::NoDataset(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Internal(_) | ServiceError::BadLog(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ServiceError::Core(_) | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code(), "message": self.to_string() } });
        (self.status(), Json(body)).into_response()
    }
}
