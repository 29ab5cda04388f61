//! HTTP routes. Request and response bodies are JSON with sorted keys;
//! errors are `{"error": {"code", "message"}}`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as JsonValue};
use xnli_core::Adjustment;

use crate::error::ServiceError;
use crate::session::Session;
use crate::store::AppState;

type Reply = Result<Json<JsonValue>, ServiceError>;

const MAX_UPLOAD: usize = 64 * 1024 * 1024;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/datasets", post(upload_dataset))
        .route("/datasets/{id}/overview", get(overview))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/query", post(query))
        .route("/sessions/{id}/adjust", post(adjust))
        .route("/sessions/{id}/log", get(log))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(state)
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ServiceError> {
    serde_json::from_slice(bytes).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

fn reply<T: Serialize>(value: &T) -> Reply {
    serde_json::to_value(value)
        .map(Json)
        .map_err(|e| ServiceError::Internal(e.to_string()))
}

async fn upload_dataset(State(st): State<Arc<AppState>>, mut form: Multipart) -> Reply {
    let mut file: Option<(Vec<u8>, Option<String>)> = None;
    let mut name: Option<String> = None;
    while let Some(field) = form.next_field().await.map_err(|e| ServiceError::BadRequest(e.to_string()))? {
        let filename = field.file_name().map(str::to_string);
        let field_name = field.name().unwrap_or_default().to_string();
        let bytes = field.bytes().await.map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        if field_name == "name" && filename.is_none() {
            name = Some(String::from_utf8_lossy(&bytes).trim().to_string());
        } else if filename.is_some() || field_name == "file" {
            file = Some((bytes.to_vec(), filename));
        }
    }
    let (bytes, filename) = file.ok_or_else(|| ServiceError::BadRequest("no CSV file in the form".into()))?;
    let name = name.filter(|n| !n.is_empty()).unwrap_or_else(|| {
        filename
            .as_deref()
            .and_then(|f| std::path::Path::new(f).file_stem())
            .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned())
    });
    let ds = tokio::task::spawn_blocking(move || st.add_dataset(&bytes, &name))
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))??;
    reply(&json!({ "datasetId": ds.id(), "overview": ds.overview() }))
}

async fn overview(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Reply {
    reply(&st.dataset(&id)?.overview())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct NewSession {
    dataset_id: String,
}

async fn create_session(State(st): State<Arc<AppState>>, raw: Bytes) -> Reply {
    let req: NewSession = body(&raw)?;
    let s = st.create_session(&req.dataset_id)?;
    reply(&json!({ "sessionId": s.id, "datasetId": s.dataset_id }))
}

#[derive(Deserialize)]
struct QueryBody {
    query: String,
}

#[derive(Deserialize)]
struct AdjustBody {
    adjustment: Adjustment,
}

/// Runs `f` on the locked session off the async runtime and persists the
/// session afterwards. A session already serving a request is `Busy`.
async fn with_session<T, F>(st: Arc<AppState>, id: &str, f: F) -> Reply
where
    T: Serialize + Send + 'static,
    F: FnOnce(&mut Session, &xnli_core::Dataset, Option<u64>) -> Result<T, ServiceError> + Send + 'static,
{
    let mut guard = st.session(id)?.try_lock_owned().map_err(|_| ServiceError::Busy)?;
    let ds = st
        .dataset(&guard.dataset_id)
        .map_err(|_| ServiceError::NoDataset(guard.dataset_id.clone()))?;
    tokio::task::spawn_blocking(move || {
        let out = f(&mut guard, &ds, st.seed_override)?;
        st.persist(&guard)?;
        reply(&out)
    })
    .await
    .map_err(|e| ServiceError::Internal(e.to_string()))?
}

async fn query(State(st): State<Arc<AppState>>, Path(id): Path<String>, raw: Bytes) -> Reply {
    let req: QueryBody = body(&raw)?;
    with_session(st, &id, move |s, ds, _| s.post_query(ds, &req.query)).await
}

async fn adjust(State(st): State<Arc<AppState>>, Path(id): Path<String>, raw: Bytes) -> Reply {
    let req: AdjustBody = body(&raw)?;
    with_session(st, &id, move |s, ds, seed| s.post_adjustment(ds, &req.adjustment, seed)).await
}

async fn log(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Reply {
    let session = st.session(&id)?;
    let s = session.lock().await;
    reply(&json!({ "sessionId": s.id, "datasetId": s.dataset_id, "entries": s.log }))
}
