//! Shared service state with optional JSON persistence under a data
//! directory: `datasets/<id>.csv` (+ `<id>.name`) and `sessions/<id>.json`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use tokio::sync::Mutex;
use xnli_core::{load_csv, Dataset};

use crate::error::ServiceError;
use crate::session::Session;

pub struct AppState {
    datasets: RwLock<HashMap<String, Arc<Dataset>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    data_dir: Option<PathBuf>,
    /// Fixed example seed for every adjustment, for reproducible tests.
    pub seed_override: Option<u64>,
}

fn io(e: impl std::fmt::Display) -> ServiceError {
    ServiceError::Internal(e.to_string())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ServiceError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

impl AppState {
    /// Creates the state, loading whatever an earlier run persisted.
    pub fn open(data_dir: Option<PathBuf>, seed_override: Option<u64>) -> Result<AppState, ServiceError> {
        let state = AppState {
            datasets: RwLock::new(HashMap::new()),
            sessions: RwLock::new(HashMap::new()),
            data_dir,
            seed_override,
        };
        let Some(dir) = &state.data_dir else { return Ok(state) };
        fs::create_dir_all(dir.join("datasets")).map_err(io)?;
        fs::create_dir_all(dir.join("sessions")).map_err(io)?;
        for entry in fs::read_dir(dir.join("datasets")).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "csv") {
                let name = fs::read_to_string(path.with_extension("name")).unwrap_or_else(|_| "dataset".into());
                let ds = load_csv(fs::File::open(&path).map_err(io)?, name.trim())?;
                state.datasets.write().expect("lock").insert(ds.id().to_string(), Arc::new(ds));
            }
        }
        for entry in fs::read_dir(dir.join("sessions")).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let s: Session = serde_json::from_slice(&fs::read(&path).map_err(io)?).map_err(io)?;
                state.sessions.write().expect("lock").insert(s.id.clone(), Arc::new(Mutex::new(s)));
            }
        }
        tracing::info!(
            datasets = state.datasets.read().expect("lock").len(),
            sessions = state.sessions.read().expect("lock").len(),
            "loaded persisted state"
        );
        Ok(state)
    }

    pub fn add_dataset(&self, bytes: &[u8], name: &str) -> Result<Arc<Dataset>, ServiceError> {
        let ds = Arc::new(load_csv(bytes, name)?);
        if let Some(dir) = &self.data_dir {
            let base = dir.join("datasets").join(ds.id());
            write_atomic(&base.with_extension("csv"), bytes)?;
            write_atomic(&base.with_extension("name"), name.as_bytes())?;
        }
        self.datasets.write().expect("lock").insert(ds.id().to_string(), ds.clone());
        Ok(ds)
    }

    pub fn dataset(&self, id: &str) -> Result<Arc<Dataset>, ServiceError> {
        self.datasets
            .read()
            .expect("lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(format!("dataset {id}")))
    }

    pub fn create_session(&self, dataset_id: &str) -> Result<Session, ServiceError> {
        self.dataset(dataset_id)?;
        let id = format!("s-{:016x}", rand::random::<u64>());
        let session = Session::new(&id, dataset_id);
        self.persist(&session)?;
        self.sessions.write().expect("lock").insert(id, Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }

    pub fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .read()
            .expect("lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(format!("session {id}")))
    }

    pub fn persist(&self, session: &Session) -> Result<(), ServiceError> {
        let Some(dir) = &self.data_dir else { return Ok(()) };
        let bytes = serde_json::to_vec(session).map_err(io)?;
        write_atomic(&dir.join("sessions").join(format!("{}.json", session.id)), &bytes)
    }
}
