use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, ServiceError};

/// One entry of a session's append-only log. Payloads carry both the
/// request inputs and the recorded outcome so a log can be replayed and
/// checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub timestamp_ms: u64,
    pub kind: EventKind,
    pub payload: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    SessionCreated,
    PlanRequested,
    Step,
    BoxRemoved,
    SupportRequested,
    PointingResolved,
}

/// Appends events as JSON lines to `<dir>/<session>.jsonl`.
#[derive(Debug, Clone)]
pub struct EventSink {
    dir: PathBuf,
}

impl EventSink {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)
            .map_err(|e| ServiceError::EventLog(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir })
    }

    pub fn path_for(&self, session_id: &str) -> PathBuf {
        self.dir.join(format!("{session_id}.jsonl"))
    }

    pub fn append(&self, session_id: &str, event: &Event) -> Result<()> {
        let path = self.path_for(session_id);
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| ServiceError::EventLog(format!("{}: {e}", path.display())))?;
        let mut line = serde_json::to_string(event).expect("events serialize");
        line.push('\n');
        f.write_all(line.as_bytes())
            .map_err(|e| ServiceError::EventLog(format!("{}: {e}", path.display())))
    }
}

/// Reads a JSON-lines event file.
pub fn read_events(path: &Path) -> Result<Vec<Event>> {
    let f =
        File::open(path).map_err(|e| ServiceError::EventLog(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| ServiceError::EventLog(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let ev: Event = serde_json::from_str(&line).map_err(|e| {
            ServiceError::Core(shelfplan_core::Error::Schema(format!(
                "line {}: {e}",
                n + 1
            )))
        })?;
        out.push(ev);
    }
    Ok(out)
}
