//! Session service: datasets, per-session query and adjustment handling,
//! ambiguity preference learning and an append-only interaction log.
//!
//! Requests to one session are serialized; a second concurrent request to a
//! busy session is rejected with `409 Busy`.

pub mod error;
pub mod http;
pub mod session;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use error::ServiceError;
pub use http::router;
pub use session::{derive_seed, replay, response_bytes, LogEntry, LogKind, Session};
pub use store::AppState;

/// Environment variable that fixes the example seed of every adjustment.
pub const SEED_ENV: &str = "XNLI_SEED";

#[derive(Debug, Clone)]
pub struct Config {
    pub port: u16,
    pub data_dir: Option<PathBuf>,
    pub seed_override: Option<u64>,
}

impl Default for Config {
    fn default() -> Self {
        Config { port: 8080, data_dir: None, seed_override: None }
    }
}

/// Reads [`SEED_ENV`]; unset or unparsable means no override.
pub fn seed_from_env() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok())
}

/// Serves the HTTP API until the process is stopped.
pub async fn serve(config: Config) -> Result<(), ServiceError> {
    let state = Arc::new(AppState::open(config.data_dir, config.seed_override)?);
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| ServiceError::Internal(format!("cannot bind {addr}: {e}")))?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state))
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))
}
