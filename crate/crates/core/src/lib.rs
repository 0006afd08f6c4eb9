//! Collapse-safe extraction planning for boxes stacked on a shelf.
//!
//! The crate is organised bottom-up:
//!
//! * [`scene`] describes boxes on a shelf, validates them and reads/writes
//!   the JSON scene format. It also contains a seeded scene generator.
//! * [`physics`] is a quasi-static stability engine. A box stands iff the
//!   projection of its centre of mass lies in the convex hull of its contact
//!   patches; removals cascade until nothing else falls.
//! * [`brg`] probes every box with a hypothetical removal to build the box
//!   relations graph, and derives extraction sequences, robot/human task
//!   splits and support candidates from it.
//! * [`pointing`] turns a masked point cloud of an arm into a selected box.

pub mod brg;
pub mod error;
pub mod geometry;
pub mod physics;
pub mod pointing;
pub mod scene;

pub use brg::{
    build_dependency_dictionary, build_graph, dependency_order, divide_tasks, export_dot,
    full_clear_sequence, related_set, safe_sequence, support_candidates, BoxRelationsGraph,
    Candidate, DependencyDictionary, ExtractionPlan, PlanTarget, Ranking, SupportCandidates,
    TaskPolicy, TaskSplit,
};
pub use error::{Error, Result};
pub use geometry::{Rect, Vec3};
pub use physics::{
    compute_contacts, is_stable, probe_removal, settle, ContactPatch, StabilityReport, SupportMap,
    Supporter,
};
pub use pointing::{
    dbscan, estimate_target, largest_cluster, resolve_pointing, select_box, ClusterParams,
    DepthOrder, Label, PointCloud, PointingConfig, PointingResult, RigidTransform,
};
pub use scene::{
    default_palette, export_scene, generate_scene, parse_scene, validate_scene, BoxId, BoxSpec,
    Scene, SceneConfig, ShelfSpec, ValidationReport, Violation,
};
