use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::BoxRelationsGraph;
use crate::error::{Error, Result};
use crate::physics::settle;
use crate::scene::{BoxId, Scene};

/// A single box, or the whole shelf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanTarget {
    Box(BoxId),
    All,
}

impl PlanTarget {
    pub fn parse(s: &str) -> Self {
        if s == "ALL" {
            PlanTarget::All
        } else {
            PlanTarget::Box(BoxId::from(s))
        }
    }
}

impl fmt::Display for PlanTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanTarget::Box(id) => write!(f, "{id}"),
            PlanTarget::All => f.write_str("ALL"),
        }
    }
}

impl Serialize for PlanTarget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlanTarget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(PlanTarget::parse(&String::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionPlan {
    pub target: PlanTarget,
    /// Removal order; dependents always come before the boxes they rest on.
    pub sequence: Vec<BoxId>,
}

/// `target` plus everything that transitively depends on it: the boxes that
/// have to come out first.
pub fn related_set(g: &BoxRelationsGraph, target: &str) -> Result<BTreeSet<BoxId>> {
    let start = g
        .nodes
        .get(target)
        .ok_or_else(|| Error::MissingBox(target.to_owned()))?;
    let mut dependents: BTreeMap<&BoxId, Vec<&BoxId>> = BTreeMap::new();
    for (d, b) in &g.edges {
        dependents.entry(d).or_default().push(b);
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        if seen.insert(n.clone()) {
            stack.extend(dependents.get(n).into_iter().flatten().copied());
        }
    }
    Ok(seen)
}

/// Kahn's algorithm over the subgraph induced by `subset`, on reversed
/// edges: a box becomes ready once none of its dependents in the subset is
/// left. Among ready boxes the smallest id that `admit` accepts goes next.
fn kahn<F>(g: &BoxRelationsGraph, subset: &BTreeSet<BoxId>, mut admit: F) -> Result<Vec<BoxId>>
where
    F: FnMut(&[BoxId], &BoxId) -> bool,
{
    let mut pending_dependents: BTreeMap<&BoxId, usize> = subset.iter().map(|n| (n, 0)).collect();
    let mut supporters: BTreeMap<&BoxId, Vec<&BoxId>> = BTreeMap::new();
    for (d, b) in &g.edges {
        if subset.contains(d) && subset.contains(b) {
            *pending_dependents.get_mut(d).expect("subset node") += 1;
            supporters.entry(b).or_default().push(d);
        }
    }

    let mut ready: BTreeSet<&BoxId> = pending_dependents
        .iter()
        .filter(|(_, &n)| n == 0)
        .map(|(&id, _)| id)
        .collect();
    let mut order: Vec<BoxId> = Vec::with_capacity(subset.len());
    while !ready.is_empty() {
        let Some(next) = ready.iter().copied().find(|c| admit(&order, c)) else {
            return Err(Error::NoSafeOrder(
                ready.iter().map(|id| id.to_string()).collect(),
            ));
        };
        ready.remove(next);
        order.push(next.clone());
        for &s in supporters.get(next).into_iter().flatten() {
            let n = pending_dependents.get_mut(s).expect("subset node");
            *n -= 1;
            if *n == 0 {
                ready.insert(s);
            }
        }
    }

    if order.len() != subset.len() {
        let stuck = pending_dependents
            .into_iter()
            .filter(|(_, n)| *n > 0)
            .map(|(id, _)| id.to_string())
            .collect();
        return Err(Error::CyclicDependencies(stuck));
    }
    Ok(order)
}

/// Pure graph order: Kahn's algorithm with id tie-breaks and nothing else.
pub(crate) fn topological_order(
    g: &BoxRelationsGraph,
    subset: &BTreeSet<BoxId>,
) -> Result<Vec<BoxId>> {
    kahn(g, subset, |_, _| true)
}

/// Graph order that additionally holds back a ready box while taking it out
/// of the partly cleared scene would still make something fall. Single-box
/// probes miss redundant support (a box resting on two pillars, either of
/// which can carry it alone), so the graph order by itself is not enough.
fn checked_order(
    scene: &Scene,
    g: &BoxRelationsGraph,
    subset: &BTreeSet<BoxId>,
) -> Result<Vec<BoxId>> {
    if let Some(missing) = subset.iter().find(|id| !scene.contains(id.as_str())) {
        return Err(Error::MissingBox(missing.to_string()));
    }
    kahn(g, subset, |done, candidate| {
        let removed: BTreeSet<BoxId> = done.iter().chain([candidate]).cloned().collect();
        settle(scene, &removed).collapsed.is_empty()
    })
}

/// Topological order of the target's related set from the graph alone.
/// This is the plain dependency order; [`safe_sequence`] refines it against
/// the scene.
pub fn dependency_order(g: &BoxRelationsGraph, target: &str) -> Result<ExtractionPlan> {
    let related = related_set(g, target)?;
    let sequence = topological_order(g, &related)?;
    Ok(ExtractionPlan {
        target: PlanTarget::Box(BoxId::from(target)),
        sequence,
    })
}

/// Removal order for `target`: its related set, dependents first, target
/// last, with every step checked to leave the rest of the scene standing.
pub fn safe_sequence(scene: &Scene, g: &BoxRelationsGraph, target: &str) -> Result<ExtractionPlan> {
    let related = related_set(g, target)?;
    let sequence = checked_order(scene, g, &related)?;
    debug_assert_eq!(sequence.last().map(BoxId::as_str), Some(target));
    Ok(ExtractionPlan {
        target: PlanTarget::Box(BoxId::from(target)),
        sequence,
    })
}

/// Removal order for every box on the shelf.
pub fn full_clear_sequence(scene: &Scene, g: &BoxRelationsGraph) -> Result<ExtractionPlan> {
    let sequence = checked_order(scene, g, &g.nodes)?;
    Ok(ExtractionPlan {
        target: PlanTarget::All,
        sequence,
    })
}
