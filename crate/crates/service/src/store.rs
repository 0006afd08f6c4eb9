use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use shelfplan_core::{PointingConfig, Scene};

use crate::error::{Result, ServiceError};
use crate::events::EventSink;
use crate::session::Session;

pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    })
}

/// All live sessions. Each session sits behind its own lock so requests on
/// different sessions never wait on each other; the map lock is held only
/// for lookup and insertion.
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    sink: Option<EventSink>,
    clock: Clock,
    pointing: PointingConfig,
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::new()
    }
}

impl SessionStore {
    pub fn new() -> Self {
        Self {
            sessions: RwLock::default(),
            next_id: AtomicU64::new(1),
            sink: None,
            clock: system_clock(),
            pointing: PointingConfig::default(),
        }
    }

    /// Persists every event under `dir`, one JSON-lines file per session.
    pub fn with_events_dir(mut self, dir: impl Into<PathBuf>) -> Result<Self> {
        self.sink = Some(EventSink::new(dir)?);
        Ok(self)
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_pointing(mut self, config: PointingConfig) -> Self {
        self.pointing = config;
        self
    }

    pub fn pointing_config(&self) -> &PointingConfig {
        &self.pointing
    }

    pub fn now(&self) -> u64 {
        (self.clock)()
    }

    fn fresh_id(&self) -> String {
        loop {
            let n = self.next_id.fetch_add(1, Ordering::Relaxed);
            let id = format!("s{n:04}");
            let taken = self.sink.as_ref().is_some_and(|s| s.path_for(&id).exists());
            if !taken {
                return id;
            }
        }
    }

    pub fn create(&self, scene: Scene) -> Result<String> {
        let id = self.fresh_id();
        let session = Session::create(id.clone(), scene, self.now())?;
        self.persist(&session, 0)?;
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(id)
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .sessions
            .read()
            .expect("session map poisoned")
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::SessionNotFound(id.to_owned()))
    }

    /// Read-only access to a session.
    pub fn read<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T> {
        let s = self.get(id)?;
        let guard = s.lock().expect("session poisoned");
        Ok(f(&guard))
    }

    /// Runs an operation on a session and persists whatever events it added.
    pub fn update<T>(&self, id: &str, f: impl FnOnce(&mut Session, u64) -> Result<T>) -> Result<T> {
        let s = self.get(id)?;
        let mut guard = s.lock().expect("session poisoned");
        let before = guard.events().len();
        let out = f(&mut guard, self.now())?;
        self.persist(&guard, before)?;
        Ok(out)
    }

    fn persist(&self, session: &Session, from: usize) -> Result<()> {
        if let Some(sink) = &self.sink {
            for ev in &session.events()[from..] {
                sink.append(session.id(), ev)?;
            }
        }
        Ok(())
    }
}
