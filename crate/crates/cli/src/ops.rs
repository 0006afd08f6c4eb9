use serde::Deserialize;
use serde_json::{json, Value};
use shelfplan_core::{Error, PointCloud, PointingConfig, Ranking, Scene, TaskPolicy};
use shelfplan_service::{Actor, Session};

use crate::Failure;

/// One scripted session operation, mirroring the HTTP endpoints.
#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Plan {
        target: String,
        #[serde(default)]
        policy: TaskPolicy,
    },
    Step {
        actor: Actor,
    },
    Remove {
        #[serde(rename = "box")]
        box_id: String,
        #[serde(default = "human")]
        actor: Actor,
    },
    Support {
        target: String,
        k: usize,
        #[serde(default)]
        ranking: Ranking,
    },
    Point {
        cloud: PointCloud,
        #[serde(default)]
        config: PointingConfig,
    },
    State,
}

fn human() -> Actor {
    Actor::Human
}

pub fn parse(text: &str) -> Result<Vec<Op>, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::from(Error::Schema(e.to_string())))
}

/// Runs `ops` against a fresh session. Timestamps are the operation index,
/// so the output and event log depend only on the inputs. A failing
/// operation is reported in place and the script carries on.
pub fn run(scene: Scene, ops: &[Op]) -> Result<(Session, Value), Failure> {
    let mut session = Session::create("local", scene, 0)?;
    let summary = json!(session.summary());
    let mut results = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let t = i as u64 + 1;
        let (name, out) = match op {
            Op::Plan { target, policy } => (
                "plan",
                session.request_plan(target, *policy, t).map(|p| json!(p)),
            ),
            Op::Step { actor } => ("step", session.step(*actor, t).map(|o| json!(o))),
            Op::Remove { box_id, actor } => (
                "remove",
                session.remove_box(box_id, *actor, t).map(|o| json!(o)),
            ),
            Op::Support { target, k, ranking } => (
                "support",
                session
                    .request_support(target, *k, *ranking, t)
                    .map(|r| json!(r)),
            ),
            Op::Point { cloud, config } => (
                "point",
                session.resolve_pointing(cloud, config, t).map(|r| json!(r)),
            ),
            Op::State => ("state", Ok(json!(session.state()))),
        };
        results.push(match out {
            Ok(v) => json!({ "op": name, "result": v }),
            Err(e) => json!({ "op": name, "error": e.code(), "detail": e.to_string() }),
        });
    }
    let report = json!({ "session": summary, "results": results, "state": session.state() });
    Ok((session, report))
}
