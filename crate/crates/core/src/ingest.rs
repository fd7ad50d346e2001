// SPDX-License-Identifier: Apache-2.0

//! Dataset and interaction-log files.
//!
//! Datasets are JSON documents (`schema` + `points`). Logs are NDJSON, one
//! `{point_id, kind, dwell_ms?, ts?}` record per line in arrival order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetBundle, DatasetDocument, DatasetError, PointId};
use crate::model::{EventKind, InteractionEvent};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: DatasetError,
    },
}

impl LoadError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        LoadError::Io { path: path.to_owned(), source }
    }
}

pub fn parse_dataset(text: &str) -> Result<DatasetBundle, LoadError> {
    parse_dataset_at(Path::new("<inline>"), text)
}

/// serde_json's message without its trailing "at line L column C", which
/// is relative to the parsed slice rather than the file.
fn serde_message(e: &serde_json::Error) -> String {
    let text = e.to_string();
    match text.rfind(" at line ") {
        Some(i) => text[..i].to_owned(),
        None => text,
    }
}

fn parse_dataset_at(path: &Path, text: &str) -> Result<DatasetBundle, LoadError> {
    let doc: DatasetDocument = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: serde_message(&e),
    })?;
    DatasetBundle::from_document(doc).map_err(|source| LoadError::Invalid { path: path.to_owned(), source })
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<DatasetBundle, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| LoadError::io(path, e))?;
    parse_dataset_at(path, &text)
}

/// One log record as it appeared in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEvent {
    pub point_id: PointId,
    #[serde(default)]
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell_ms: Option<f64>,
    /// Wall-clock stamp, kept verbatim; inference uses order only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<serde_json::Value>,
}

impl RawEvent {
    pub fn click(id: impl Into<PointId>) -> Self {
        Self { point_id: id.into(), kind: EventKind::Click, dwell_ms: None, ts: None }
    }

    pub fn hover(id: impl Into<PointId>, dwell_ms: f64) -> Self {
        Self { point_id: id.into(), kind: EventKind::Hover, dwell_ms: Some(dwell_ms), ts: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub session_id: String,
    pub events: Vec<RawEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl SessionLog {
    pub fn new(session_id: impl Into<String>, events: Vec<RawEvent>) -> Self {
        Self { session_id: session_id.into(), events, provenance: None }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The events with timesteps `1..=n` in file order.
    pub fn interaction_events(&self) -> Vec<InteractionEvent> {
        self.events
            .iter()
            .enumerate()
            .map(|(i, e)| InteractionEvent {
                point_id: e.point_id.clone(),
                timestep: i + 1,
                kind: e.kind,
                dwell_ms: e.dwell_ms,
            })
            .collect()
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("log record serializes"));
            out.push('\n');
        }
        out
    }
}

pub fn parse_log(session_id: &str, text: &str) -> Result<SessionLog, LoadError> {
    parse_log_at(Path::new("<inline>"), session_id, text)
}

fn parse_log_at(path: &Path, session_id: &str, text: &str) -> Result<SessionLog, LoadError> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let event: RawEvent = serde_json::from_str(line).map_err(|e| LoadError::Parse {
            path: path.to_owned(),
            line: i + 1,
            column: e.column(),
            message: serde_message(&e),
        })?;
        if event.dwell_ms.is_some_and(|d| !(d >= 0.0)) {
            return Err(LoadError::Parse {
                path: path.to_owned(),
                line: i + 1,
                column: 0,
                message: "dwell_ms must be non-negative".into(),
            });
        }
        events.push(event);
    }
    Ok(SessionLog { session_id: session_id.to_owned(), events, provenance: Some(path.display().to_string()) })
}

/// Reads an NDJSON log; the session id is the file stem.
pub fn read_log(path: impl AsRef<Path>) -> Result<SessionLog, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| LoadError::io(path, e))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_log_at(path, &id, &text)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoverFilter {
    pub min_dwell_ms: f64,
    pub min_events: usize,
}

impl Default for HoverFilter {
    fn default() -> Self {
        Self { min_dwell_ms: 1000.0, min_events: 4 }
    }
}

/// Drops short hovers, then drops the session if too few events remain.
/// Logs without any hover pass through untouched. Returns `None` when the
/// session is dropped.
pub fn filter_hovers(log: &SessionLog, filter: &HoverFilter) -> Option<SessionLog> {
    if !log.events.iter().any(|e| e.kind == EventKind::Hover) {
        return Some(log.clone());
    }
    let events: Vec<RawEvent> = log
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Click || e.dwell_ms.unwrap_or(0.0) >= filter.min_dwell_ms)
        .cloned()
        .collect();
    if events.len() < filter.min_events {
        return None;
    }
    Some(SessionLog { session_id: log.session_id.clone(), events, provenance: log.provenance.clone() })
}
