//! The box relations graph and the planners built on it.
//!
//! `D[b]` holds every box whose removal makes `b` fall, directly or through
//! a cascade. The graph carries an edge `d -> b` for each `d` in `D[b]`.

mod dot;
mod plan;
mod tasks;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use dot::export_dot;
pub use plan::{
    dependency_order, full_clear_sequence, related_set, safe_sequence, ExtractionPlan, PlanTarget,
};
pub use tasks::{
    divide_tasks, support_candidates, Candidate, Ranking, SupportCandidates, TaskPolicy, TaskSplit,
};

use crate::error::Result;
use crate::physics::probe_removal;
use crate::scene::{BoxId, Scene};

/// Box id to the set of boxes whose removal destabilizes it.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct DependencyDictionary(pub BTreeMap<BoxId, BTreeSet<BoxId>>);

impl DependencyDictionary {
    pub fn get(&self, id: &str) -> Option<&BTreeSet<BoxId>> {
        self.0.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BoxId, &BTreeSet<BoxId>)> {
        self.0.iter()
    }
}

impl<const N: usize> From<[(&str, &[&str]); N]> for DependencyDictionary {
    fn from(entries: [(&str, &[&str]); N]) -> Self {
        Self(
            entries
                .into_iter()
                .map(|(b, ds)| (BoxId::from(b), ds.iter().map(|d| BoxId::from(*d)).collect()))
                .collect(),
        )
    }
}

/// Probes every box once and inverts the collapse sets.
pub fn build_dependency_dictionary(scene: &Scene) -> DependencyDictionary {
    let mut d: BTreeMap<BoxId, BTreeSet<BoxId>> = scene
        .ids()
        .map(|id| (id.clone(), BTreeSet::new()))
        .collect();
    for s in scene.ids() {
        let fallen = probe_removal(scene, s.as_str()).expect("probing a box of the scene itself");
        for b in fallen {
            d.entry(b).or_default().insert(s.clone());
        }
    }
    DependencyDictionary(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct BoxRelationsGraph {
    pub nodes: BTreeSet<BoxId>,
    /// `(d, b)`: `b` depends on `d`.
    pub edges: BTreeSet<(BoxId, BoxId)>,
}

impl BoxRelationsGraph {
    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains(id)
    }

    /// Boxes that depend on `id` (successors).
    pub fn dependents<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a BoxId> + 'a {
        self.edges
            .iter()
            .filter(move |(d, _)| d.as_str() == id)
            .map(|(_, b)| b)
    }

    /// Boxes that `id` depends on (predecessors).
    pub fn dependencies<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a BoxId> + 'a {
        self.edges
            .iter()
            .filter(move |(_, b)| b.as_str() == id)
            .map(|(d, _)| d)
    }

    /// The dictionary this graph mirrors.
    pub fn to_dictionary(&self) -> DependencyDictionary {
        let mut d: BTreeMap<BoxId, BTreeSet<BoxId>> = self
            .nodes
            .iter()
            .map(|n| (n.clone(), BTreeSet::new()))
            .collect();
        for (dep, b) in &self.edges {
            d.entry(b.clone()).or_default().insert(dep.clone());
        }
        DependencyDictionary(d)
    }
}

/// One node per box and an edge `d -> b` for every `d` in `D[b]`.
pub fn build_graph(d: &DependencyDictionary) -> Result<BoxRelationsGraph> {
    let mut g = BoxRelationsGraph::default();
    for (b, deps) in d.iter() {
        g.nodes.insert(b.clone());
        for dep in deps {
            g.nodes.insert(dep.clone());
            g.edges.insert((dep.clone(), b.clone()));
        }
    }
    let all: BTreeSet<BoxId> = g.nodes.clone();
    plan::topological_order(&g, &all)?;
    Ok(g)
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::error::Error;
    use crate::physics::fixtures::{pyramid, side_by_side, tower};

    #[test]
    fn pyramid_dictionary() {
        let d = build_dependency_dictionary(&pyramid());
        assert_eq!(
            d,
            DependencyDictionary::from([("A", &[][..]), ("B", &[]), ("C", &["A", "B"])])
        );
    }

    #[test]
    fn tower_dictionary_includes_cascade() {
        let d = build_dependency_dictionary(&tower());
        assert_eq!(
            d,
            DependencyDictionary::from([("A", &[][..]), ("B", &["A"]), ("C", &["A", "B"])])
        );
    }

    #[test]
    fn independent_boxes_have_empty_entries() {
        let d = build_dependency_dictionary(&side_by_side());
        assert_eq!(d, DependencyDictionary::from([("A", &[][..]), ("B", &[])]));
    }

    #[test]
    fn pyramid_graph_edges() {
        let g = build_graph(&build_dependency_dictionary(&pyramid())).unwrap();
        assert_eq!(g.edges, edges(&[("A", "C"), ("B", "C")]));
        assert_eq!(g.nodes, set(&["A", "B", "C"]));
    }

    #[test]
    fn empty_dictionary_gives_empty_graph() {
        let g = build_graph(&DependencyDictionary::default()).unwrap();
        assert!(g.nodes.is_empty() && g.edges.is_empty());
    }

    #[test]
    fn two_cycle_is_rejected() {
        let d = DependencyDictionary::from([("A", &["B"][..]), ("B", &["A"])]);
        match build_graph(&d) {
            Err(Error::CyclicDependencies(ids)) => {
                assert_eq!(ids, vec!["A".to_string(), "B".to_string()])
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn graph_round_trips_to_dictionary() {
        let d = build_dependency_dictionary(&tower());
        assert_eq!(build_graph(&d).unwrap().to_dictionary(), d);
    }

    #[test]
    fn graph_serializes_as_node_and_edge_lists() {
        let g = build_graph(&build_dependency_dictionary(&pyramid())).unwrap();
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"nodes":["A","B","C"],"edges":[["A","C"],["B","C"]]}"#
        );
    }
}
