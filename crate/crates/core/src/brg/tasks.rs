use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{related_set, BoxRelationsGraph, DependencyDictionary, ExtractionPlan};
use crate::error::{Error, Result};
use crate::scene::BoxId;

/// How a plan is split between robot and human.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskPolicy {
    /// A box goes to the robot iff its dependency set is empty.
    #[default]
    Literal,
    /// A box goes to the robot iff, at its turn, nothing still on the shelf
    /// depends on it.
    Independence,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TaskSplit {
    pub robot_tasks: Vec<BoxId>,
    pub human_tasks: Vec<BoxId>,
}

pub fn divide_tasks(
    plan: &ExtractionPlan,
    d: &DependencyDictionary,
    policy: TaskPolicy,
) -> Result<TaskSplit> {
    let mut seen = BTreeSet::new();
    for b in &plan.sequence {
        if !d.contains(b.as_str()) {
            return Err(Error::PlanDictionaryMismatch(format!(
                "`{b}` has no dictionary entry"
            )));
        }
        if !seen.insert(b) {
            return Err(Error::PlanDictionaryMismatch(format!(
                "`{b}` appears twice in the plan"
            )));
        }
    }

    let mut split = TaskSplit::default();
    let mut removed: BTreeSet<&BoxId> = BTreeSet::new();
    for b in &plan.sequence {
        let robot = match policy {
            TaskPolicy::Literal => d.get(b.as_str()).is_none_or(BTreeSet::is_empty),
            TaskPolicy::Independence => !d
                .iter()
                .any(|(other, deps)| !removed.contains(other) && other != b && deps.contains(b)),
        };
        if robot {
            split.robot_tasks.push(b.clone());
        } else {
            split.human_tasks.push(b.clone());
        }
        removed.insert(b);
    }
    Ok(split)
}

/// How support candidates are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ranking {
    /// Number of a box's own dependencies inside the related set.
    #[default]
    Literal,
    /// Number of related boxes that depend on the box; the target itself is
    /// not a candidate.
    AtRisk,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: BoxId,
    pub support_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SupportCandidates {
    pub ranked: Vec<Candidate>,
}

/// The top `k` boxes of the target's related set by support count
/// (descending, ties by id).
pub fn support_candidates(
    g: &BoxRelationsGraph,
    target: &str,
    k: usize,
    ranking: Ranking,
) -> Result<SupportCandidates> {
    if k < 1 {
        return Err(Error::InvalidK(k));
    }
    let related = related_set(g, target)?;
    let mut ranked: Vec<Candidate> = related
        .iter()
        .filter(|b| ranking == Ranking::Literal || b.as_str() != target)
        .map(|b| {
            let support_count = match ranking {
                Ranking::Literal => g
                    .dependencies(b.as_str())
                    .filter(|d| related.contains(*d))
                    .count(),
                Ranking::AtRisk => g
                    .dependents(b.as_str())
                    .filter(|x| related.contains(*x))
                    .count(),
            };
            Candidate {
                id: b.clone(),
                support_count,
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.support_count
            .cmp(&a.support_count)
            .then_with(|| a.id.cmp(&b.id))
    });
    ranked.truncate(k);
    Ok(SupportCandidates { ranked })
}
