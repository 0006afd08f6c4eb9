use serde::{Deserialize, Serialize};
use serde_json::Value;
use shelfplan_core::scene::SceneDocument;
use shelfplan_core::{
    validate_scene, BoxId, Error, PointCloud, PointingConfig, Ranking, TaskPolicy,
};

use crate::error::{Result, ServiceError};
use crate::events::{Event, EventKind};
use crate::session::{Actor, Session};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub seq: u64,
    pub kind: EventKind,
    pub recorded: Value,
    pub replayed: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub session_id: String,
    pub events: usize,
    pub consistent: bool,
    pub mismatches: Vec<Mismatch>,
    /// Boxes left on the shelf after the last event.
    pub final_boxes: Vec<BoxId>,
}

#[derive(Deserialize)]
struct Created {
    session_id: String,
    scene: SceneDocument,
}

#[derive(Deserialize)]
struct PlanInput {
    target: String,
    policy: TaskPolicy,
}

#[derive(Deserialize)]
struct StepInput {
    actor: Actor,
}

#[derive(Deserialize)]
struct RemoveInput {
    #[serde(rename = "box")]
    box_id: String,
    actor: Actor,
}

#[derive(Deserialize)]
struct SupportInput {
    target: String,
    k: usize,
    ranking: Ranking,
}

#[derive(Deserialize)]
struct PointingInput {
    cloud: PointCloud,
    config: PointingConfig,
}

fn input<T: for<'de> Deserialize<'de>>(ev: &Event) -> Result<T> {
    serde_json::from_value(ev.payload.clone())
        .map_err(|e| Error::Schema(format!("event {} ({:?}): {e}", ev.seq, ev.kind)).into())
}

/// Rebuilds a session from its event log, re-running every operation with
/// the recorded inputs and timestamps, and compares each regenerated event
/// with the recorded one.
pub fn replay(events: &[Event]) -> Result<ReplayReport> {
    let first = events
        .first()
        .ok_or_else(|| ServiceError::EventLog("empty event log".into()))?;
    if first.kind != EventKind::SessionCreated {
        return Err(ServiceError::EventLog(format!(
            "log starts with {:?}, expected session_created",
            first.kind
        )));
    }
    for (i, ev) in events.iter().enumerate() {
        if ev.seq != i as u64 {
            return Err(ServiceError::EventLog(format!(
                "sequence gap: position {i} holds seq {}",
                ev.seq
            )));
        }
    }

    let created: Created = input(first)?;
    let scene = created.scene.into_scene();
    let report = validate_scene(&scene);
    if !report.is_valid() {
        return Err(Error::Validation(report.violations).into());
    }
    let mut session = Session::create(created.session_id, scene, first.timestamp_ms)?;
    let mut mismatches = Vec::new();
    check(&session, first, &mut mismatches);

    for ev in &events[1..] {
        let t = ev.timestamp_ms;
        let outcome = match ev.kind {
            EventKind::SessionCreated => Err(ServiceError::EventLog(format!(
                "second session_created at seq {}",
                ev.seq
            ))),
            EventKind::PlanRequested => {
                let i: PlanInput = input(ev)?;
                session.request_plan(&i.target, i.policy, t).map(|_| ())
            }
            EventKind::Step => {
                let i: StepInput = input(ev)?;
                session.step(i.actor, t).map(|_| ())
            }
            EventKind::BoxRemoved => {
                let i: RemoveInput = input(ev)?;
                session.remove_box(&i.box_id, i.actor, t).map(|_| ())
            }
            EventKind::SupportRequested => {
                let i: SupportInput = input(ev)?;
                session
                    .request_support(&i.target, i.k, i.ranking, t)
                    .map(|_| ())
            }
            EventKind::PointingResolved => {
                let i: PointingInput = input(ev)?;
                session.resolve_pointing(&i.cloud, &i.config, t).map(|_| ())
            }
        };
        match outcome {
            Ok(()) => check(&session, ev, &mut mismatches),
            Err(e) => mismatches.push(Mismatch {
                seq: ev.seq,
                kind: ev.kind,
                recorded: ev.payload.clone(),
                replayed: serde_json::json!({ "error": e.code(), "detail": e.to_string() }),
            }),
        }
    }

    Ok(ReplayReport {
        session_id: session.id().to_owned(),
        events: events.len(),
        consistent: mismatches.is_empty(),
        mismatches,
        final_boxes: session.scene().ids().cloned().collect(),
    })
}

fn check(session: &Session, recorded: &Event, out: &mut Vec<Mismatch>) {
    let replayed = session
        .events()
        .last()
        .expect("operation recorded an event");
    if replayed != recorded {
        out.push(Mismatch {
            seq: recorded.seq,
            kind: recorded.kind,
            recorded: recorded.payload.clone(),
            replayed: replayed.payload.clone(),
        });
    }
}
