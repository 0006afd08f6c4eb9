//! Session layer over `shelfplan-core`: stateful planning sessions, an
//! append-only event log with replay, and an HTTP/JSON API.

pub mod error;
pub mod events;
pub mod http;
pub mod replay;
pub mod session;
pub mod store;

pub use error::{Result, ServiceError};
pub use events::{read_events, Event, EventKind, EventSink};
pub use http::{router, serve};
pub use replay::{replay, Mismatch, ReplayReport};
pub use session::{
    ActivePlan, Actor, PlanResponse, Session, SessionState, SessionSummary, StepOutcome,
};
pub use store::{system_clock, Clock, SessionStore};
