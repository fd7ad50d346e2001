// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use explorebias_core::{DatasetBundle, DatasetDocument, InteractionEvent, Session, SessionConfig};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

fn default_exclude_visited() -> bool {
    true
}

fn default_k() -> usize {
    5
}

/// Model configuration plus the defaults used by the predictions endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    #[serde(flatten)]
    pub model: SessionConfig,
    #[serde(default = "default_exclude_visited")]
    pub exclude_visited: bool,
    #[serde(default = "default_k")]
    pub k: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { model: SessionConfig::default(), exclude_visited: true, k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHandle {
    pub session_id: String,
    pub dataset_id: String,
    pub config: ServiceConfig,
    /// Milliseconds since the Unix epoch.
    pub created_at: u64,
    pub event_count: usize,
}

pub struct SessionEntry {
    pub session_id: String,
    pub dataset_id: String,
    pub config: ServiceConfig,
    pub created_at: u64,
    /// Writers take the lock exclusively, so events apply in receipt order
    /// and readers never see a half-applied event.
    pub session: RwLock<Session>,
}

impl SessionEntry {
    pub fn handle(&self, event_count: usize) -> SessionHandle {
        SessionHandle {
            session_id: self.session_id.clone(),
            dataset_id: self.dataset_id.clone(),
            config: self.config.clone(),
            created_at: self.created_at,
            event_count,
        }
    }
}

/// Append-only on-disk record of datasets, sessions and events.
#[derive(Debug, Clone)]
pub struct Spool {
    root: PathBuf,
}

impl Spool {
    pub fn open(root: impl Into<PathBuf>) -> std::io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("datasets"))?;
        fs::create_dir_all(root.join("sessions"))?;
        Ok(Self { root })
    }

    fn dataset_path(&self, id: &str) -> PathBuf {
        self.root.join("datasets").join(format!("{id}.json"))
    }

    fn session_path(&self, id: &str) -> PathBuf {
        self.root.join("sessions").join(format!("{id}.json"))
    }

    fn events_path(&self, id: &str) -> PathBuf {
        self.root.join("sessions").join(format!("{id}.events.ndjson"))
    }

    fn write_new(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, bytes)?;
        fs::rename(tmp, path)
    }

    fn put_dataset(&self, id: &str, doc: &DatasetDocument) -> std::io::Result<()> {
        Self::write_new(&self.dataset_path(id), &serde_json::to_vec(doc).expect("document serializes"))
    }

    fn put_session(&self, handle: &SessionHandle) -> std::io::Result<()> {
        Self::write_new(
            &self.session_path(&handle.session_id),
            &serde_json::to_vec(handle).expect("handle serializes"),
        )?;
        fs::File::create(self.events_path(&handle.session_id)).map(drop)
    }

    fn append_event(&self, session_id: &str, event: &InteractionEvent) -> std::io::Result<()> {
        let mut f = OpenOptions::new().append(true).create(true).open(self.events_path(session_id))?;
        let mut line = serde_json::to_vec(event).expect("event serializes");
        line.push(b'\n');
        f.write_all(&line)?;
        f.sync_data()
    }

    fn json_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut out: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        out.sort();
        Ok(out)
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

fn id_number(id: &str, prefix: &str) -> u64 {
    id.strip_prefix(prefix).and_then(|n| n.parse().ok()).unwrap_or(0)
}

#[derive(Debug, thiserror::Error)]
pub enum RestoreError {
    #[error("spool I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("spool file {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
}

#[derive(Default)]
pub struct AppState {
    datasets: RwLock<HashMap<String, Arc<DatasetBundle>>>,
    sessions: RwLock<HashMap<String, Arc<SessionEntry>>>,
    next_dataset: AtomicU64,
    next_session: AtomicU64,
    spool: Option<Spool>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    /// State backed by a spool directory; anything already spooled is
    /// replayed first.
    pub fn with_spool(root: impl Into<PathBuf>) -> Result<Self, RestoreError> {
        let spool = Spool::open(root)?;
        let state = Self { spool: Some(spool.clone()), ..Self::default() };
        let corrupt = |path: &Path, message: String| RestoreError::Corrupt { path: path.to_owned(), message };

        let mut max_ds = 0;
        for path in Spool::json_files(&spool.root.join("datasets"))? {
            let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let doc: DatasetDocument =
                serde_json::from_slice(&fs::read(&path)?).map_err(|e| corrupt(&path, e.to_string()))?;
            let bundle = DatasetBundle::from_document(doc).map_err(|e| corrupt(&path, e.to_string()))?;
            max_ds = max_ds.max(id_number(&id, "ds-"));
            state.datasets.write().expect("lock").insert(id, Arc::new(bundle));
        }
        let mut max_s = 0;
        for path in Spool::json_files(&spool.root.join("sessions"))? {
            let handle: SessionHandle =
                serde_json::from_slice(&fs::read(&path)?).map_err(|e| corrupt(&path, e.to_string()))?;
            let dataset = state.dataset(&handle.dataset_id).map_err(|e| corrupt(&path, e.body.message))?;
            let mut session = Session::new(dataset, handle.config.model).map_err(|e| corrupt(&path, e.to_string()))?;
            let events_path = spool.events_path(&handle.session_id);
            let events = fs::read_to_string(&events_path).unwrap_or_default();
            for (i, line) in events.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let event: InteractionEvent =
                    serde_json::from_str(line).map_err(|e| corrupt(&events_path, format!("line {}: {e}", i + 1)))?;
                session.observe(event).map_err(|e| corrupt(&events_path, format!("line {}: {e}", i + 1)))?;
            }
            max_s = max_s.max(id_number(&handle.session_id, "s-"));
            let entry = SessionEntry {
                session_id: handle.session_id.clone(),
                dataset_id: handle.dataset_id,
                config: handle.config,
                created_at: handle.created_at,
                session: RwLock::new(session),
            };
            state.sessions.write().expect("lock").insert(handle.session_id, Arc::new(entry));
        }
        state.next_dataset.store(max_ds, Ordering::SeqCst);
        state.next_session.store(max_s, Ordering::SeqCst);
        log::info!(
            "restored {} datasets and {} sessions from spool",
            state.datasets.read().expect("lock").len(),
            state.sessions.read().expect("lock").len()
        );
        Ok(state)
    }

    pub fn dataset(&self, id: &str) -> Result<Arc<DatasetBundle>, ApiError> {
        self.datasets.read().expect("lock").get(id).cloned().ok_or_else(|| ApiError::unknown_dataset(id))
    }

    pub fn session(&self, id: &str) -> Result<Arc<SessionEntry>, ApiError> {
        self.sessions.read().expect("lock").get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
    }

    pub fn add_dataset(&self, doc: DatasetDocument) -> Result<(String, Arc<DatasetBundle>), ApiError> {
        let bundle = Arc::new(DatasetBundle::from_document(doc.clone())?);
        let id = format!("ds-{}", self.next_dataset.fetch_add(1, Ordering::SeqCst) + 1);
        if let Some(spool) = &self.spool {
            spool.put_dataset(&id, &doc).map_err(|e| ApiError::internal(format!("spool: {e}")))?;
        }
        self.datasets.write().expect("lock").insert(id.clone(), Arc::clone(&bundle));
        Ok((id, bundle))
    }

    pub fn add_session(&self, dataset_id: &str, config: ServiceConfig) -> Result<SessionHandle, ApiError> {
        let dataset = self.dataset(dataset_id)?;
        if config.k == 0 {
            return Err(ApiError::from(explorebias_core::ModelError::InvalidConfig("k must be at least 1".into())));
        }
        let session = Session::new(dataset, config.model)?;
        let id = format!("s-{}", self.next_session.fetch_add(1, Ordering::SeqCst) + 1);
        let entry = SessionEntry {
            session_id: id.clone(),
            dataset_id: dataset_id.to_owned(),
            config,
            created_at: now_ms(),
            session: RwLock::new(session),
        };
        let handle = entry.handle(0);
        if let Some(spool) = &self.spool {
            spool.put_session(&handle).map_err(|e| ApiError::internal(format!("spool: {e}")))?;
        }
        self.sessions.write().expect("lock").insert(id, Arc::new(entry));
        Ok(handle)
    }

    /// Applies one event; the spool line is written before the new state
    /// becomes visible, so a restart never loses an acknowledged event.
    pub fn post_event(
        &self,
        entry: &SessionEntry,
        event_for: impl FnOnce(usize) -> InteractionEvent,
    ) -> Result<usize, ApiError> {
        let mut guard = entry.session.write().expect("lock");
        let event = event_for(guard.event_count() + 1);
        let mut next = guard.clone();
        next.observe(event.clone())?;
        if let Some(spool) = &self.spool {
            spool.append_event(&entry.session_id, &event).map_err(|e| ApiError::internal(format!("spool: {e}")))?;
        }
        *guard = next;
        Ok(guard.event_count())
    }
}
