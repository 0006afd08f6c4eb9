use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use shelfplan_core::scene::SceneDocument;
use shelfplan_core::{
    build_dependency_dictionary, build_graph, divide_tasks, export_dot, full_clear_sequence,
    resolve_pointing, safe_sequence, settle, support_candidates, BoxId, BoxRelationsGraph,
    DependencyDictionary, Error, ExtractionPlan, PlanTarget, PointCloud, PointingConfig,
    PointingResult, Ranking, Scene, SupportCandidates, TaskPolicy, TaskSplit,
};

use crate::error::{Result, ServiceError};
use crate::events::{Event, EventKind};

/// Number of trailing events included in a state snapshot.
pub const RECENT_EVENTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Robot,
    Human,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub removed_box: BoxId,
    pub actor: Actor,
    /// Boxes that fell as a consequence. For a step on an invalidated plan
    /// this repeats the collapse that invalidated it.
    pub collapsed: Vec<BoxId>,
    pub plan_valid: bool,
    /// False when nothing was removed because the plan was already invalid.
    pub applied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivePlan {
    pub plan: ExtractionPlan,
    pub policy: TaskPolicy,
    pub split: TaskSplit,
    /// Index of the next box to remove.
    pub cursor: usize,
    pub valid: bool,
    pub invalidated_by: Vec<BoxId>,
}

impl ActivePlan {
    pub fn remaining(&self) -> &[BoxId] {
        &self.plan.sequence[self.cursor..]
    }
}

/// Plan-request response: the stored plan and its robot/human split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResponse<'a> {
    pub plan: &'a ExtractionPlan,
    pub policy: TaskPolicy,
    pub split: &'a TaskSplit,
}

/// What session creation reports back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub boxes: usize,
    pub nodes: usize,
    pub edges: usize,
}

/// Serializable snapshot of a session.
#[derive(Debug, Clone, Serialize)]
pub struct SessionState<'a> {
    pub session_id: &'a str,
    pub scene: SceneDocument,
    pub dictionary: &'a DependencyDictionary,
    pub brg: &'a BoxRelationsGraph,
    pub plan: Option<&'a ExtractionPlan>,
    pub policy: Option<TaskPolicy>,
    pub split: Option<&'a TaskSplit>,
    pub cursor: usize,
    pub plan_valid: Option<bool>,
    pub invalidated_by: &'a [BoxId],
    pub event_count: usize,
    /// The last few events, oldest first.
    pub events: &'a [Event],
}

/// One planning session: the current scene, its relation graph, the active
/// plan and the event history. Every successful operation appends exactly
/// one event; failed operations leave the session untouched.
#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    scene: Scene,
    dictionary: DependencyDictionary,
    graph: BoxRelationsGraph,
    plan: Option<ActivePlan>,
    events: Vec<Event>,
}

impl Session {
    pub fn create(id: impl Into<String>, scene: Scene, now_ms: u64) -> Result<Self> {
        let (dictionary, graph) = relations(&scene)?;
        let mut s = Session {
            id: id.into(),
            scene,
            dictionary,
            graph,
            plan: None,
            events: Vec::new(),
        };
        let payload = json!({
            "session_id": s.id,
            "scene": SceneDocument::from_scene(&s.scene),
            "dictionary": s.dictionary,
        });
        s.record(EventKind::SessionCreated, payload, now_ms);
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn dictionary(&self) -> &DependencyDictionary {
        &self.dictionary
    }

    pub fn graph(&self) -> &BoxRelationsGraph {
        &self.graph
    }

    pub fn plan(&self) -> Option<&ActivePlan> {
        self.plan.as_ref()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn state(&self) -> SessionState<'_> {
        let tail = self.events.len().saturating_sub(RECENT_EVENTS);
        let plan = self.plan.as_ref();
        SessionState {
            session_id: &self.id,
            scene: SceneDocument::from_scene(&self.scene),
            dictionary: &self.dictionary,
            brg: &self.graph,
            plan: plan.map(|p| &p.plan),
            policy: plan.map(|p| p.policy),
            split: plan.map(|p| &p.split),
            cursor: plan.map_or(0, |p| p.cursor),
            plan_valid: plan.map(|p| p.valid),
            invalidated_by: plan.map_or(&[][..], |p| &p.invalidated_by),
            event_count: self.events.len(),
            events: &self.events[tail..],
        }
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            session_id: self.id.clone(),
            boxes: self.scene.len(),
            nodes: self.graph.nodes.len(),
            edges: self.graph.edges.len(),
        }
    }

    pub fn dot(&self) -> String {
        export_dot(&self.graph)
    }

    pub fn request_plan(
        &mut self,
        target: &str,
        policy: TaskPolicy,
        now_ms: u64,
    ) -> Result<PlanResponse<'_>> {
        let plan = match PlanTarget::parse(target) {
            PlanTarget::All => full_clear_sequence(&self.scene, &self.graph)?,
            PlanTarget::Box(id) => {
                if !self.scene.contains(id.as_str()) {
                    return Err(Error::MissingBox(id.to_string()).into());
                }
                safe_sequence(&self.scene, &self.graph, id.as_str())?
            }
        };
        let split = divide_tasks(&plan, &self.dictionary, policy)?;
        let payload = json!({ "target": target, "policy": policy, "plan": plan, "split": split });
        self.plan = Some(ActivePlan {
            plan,
            policy,
            split,
            cursor: 0,
            valid: true,
            invalidated_by: Vec::new(),
        });
        self.record(EventKind::PlanRequested, payload, now_ms);
        let p = self.plan.as_ref().expect("plan just set");
        Ok(PlanResponse {
            plan: &p.plan,
            policy: p.policy,
            split: &p.split,
        })
    }

    /// Removes the next box of the active plan.
    pub fn step(&mut self, actor: Actor, now_ms: u64) -> Result<StepOutcome> {
        let plan = self.plan.as_ref().ok_or(ServiceError::NoPlan)?;
        let next = plan
            .remaining()
            .first()
            .ok_or(ServiceError::PlanExhausted)?
            .clone();

        let outcome = if !plan.valid {
            StepOutcome {
                removed_box: next,
                actor,
                collapsed: plan.invalidated_by.clone(),
                plan_valid: false,
                applied: false,
            }
        } else {
            let collapsed = self.apply_removal(&next)?;
            let plan = self.plan.as_mut().expect("plan checked above");
            plan.cursor += 1;
            if !collapsed.is_empty() {
                plan.valid = false;
                plan.invalidated_by = collapsed.clone();
            }
            StepOutcome {
                removed_box: next,
                actor,
                collapsed,
                plan_valid: plan.valid,
                applied: true,
            }
        };
        self.record(
            EventKind::Step,
            json!({ "actor": actor, "outcome": outcome }),
            now_ms,
        );
        Ok(outcome)
    }

    /// Removes an arbitrary box outside the plan. The active plan stays
    /// valid only if its remaining steps are still collapse-free on the new
    /// scene.
    pub fn remove_box(&mut self, id: &str, actor: Actor, now_ms: u64) -> Result<StepOutcome> {
        if !self.scene.contains(id) {
            return Err(Error::MissingBox(id.to_owned()).into());
        }
        let removed = BoxId::from(id);
        let collapsed = self.apply_removal(&removed)?;
        let plan_valid = match self.plan.as_mut() {
            None => true,
            Some(plan) => {
                if plan.valid
                    && !plan.remaining().is_empty()
                    && !replays_cleanly(&self.scene, plan.remaining())
                {
                    plan.valid = false;
                    plan.invalidated_by = collapsed.clone();
                }
                plan.valid
            }
        };
        let outcome = StepOutcome {
            removed_box: removed,
            actor,
            collapsed,
            plan_valid,
            applied: true,
        };
        self.record(
            EventKind::BoxRemoved,
            json!({ "box": id, "actor": actor, "outcome": outcome }),
            now_ms,
        );
        Ok(outcome)
    }

    pub fn request_support(
        &mut self,
        target: &str,
        k: usize,
        ranking: Ranking,
        now_ms: u64,
    ) -> Result<SupportCandidates> {
        if !self.scene.contains(target) {
            return Err(Error::MissingBox(target.to_owned()).into());
        }
        let result = support_candidates(&self.graph, target, k, ranking)?;
        let payload = json!({ "target": target, "k": k, "ranking": ranking, "result": result });
        self.record(EventKind::SupportRequested, payload, now_ms);
        Ok(result)
    }

    pub fn resolve_pointing(
        &mut self,
        cloud: &PointCloud,
        config: &PointingConfig,
        now_ms: u64,
    ) -> Result<PointingResult> {
        cloud.check()?;
        let result = resolve_pointing(cloud, &self.scene, config)?;
        let payload = json!({ "cloud": cloud, "config": config, "result": result });
        self.record(EventKind::PointingResolved, payload, now_ms);
        Ok(result)
    }

    /// Removes `id`, lets the rest settle and rebuilds the relation graph.
    /// Returns the boxes that fell.
    fn apply_removal(&mut self, id: &BoxId) -> Result<Vec<BoxId>> {
        let report = settle(&self.scene, &BTreeSet::from([id.clone()]));
        let gone: BTreeSet<&BoxId> = report.collapsed.iter().chain(std::iter::once(id)).collect();
        let scene = self.scene.without(gone.iter().copied());
        let (dictionary, graph) = relations(&scene)?;
        self.scene = scene;
        self.dictionary = dictionary;
        self.graph = graph;
        Ok(report.collapsed)
    }

    fn record(&mut self, kind: EventKind, payload: Value, now_ms: u64) {
        let seq = self.events.len() as u64;
        self.events.push(Event {
            seq,
            timestamp_ms: now_ms,
            kind,
            payload,
        });
    }
}

fn relations(scene: &Scene) -> Result<(DependencyDictionary, BoxRelationsGraph)> {
    let dictionary = build_dependency_dictionary(scene);
    let graph = build_graph(&dictionary)?;
    Ok((dictionary, graph))
}

/// True if removing `sequence` one box at a time from `scene` never makes
/// anything else fall.
fn replays_cleanly(scene: &Scene, sequence: &[BoxId]) -> bool {
    let mut removed = BTreeSet::new();
    for b in sequence {
        if !scene.contains(b.as_str()) {
            return false;
        }
        removed.insert(b.clone());
        if !settle(scene, &removed).collapsed.is_empty() {
            return false;
        }
    }
    true
}
