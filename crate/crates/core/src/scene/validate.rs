use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{Scene, RESERVED_IDS};
use crate::physics::settle;

/// One broken scene invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    InvalidShelf { detail: String },
    InvalidConfig { field: String },
    InvalidId { id: String },
    DuplicateId { id: String },
    NonPositiveDims { id: String },
    NonFiniteCenter { id: String },
    NonPositiveMass { id: String },
    PenetratesShelf { id: String },
    OutsideShelf { id: String },
    InterPenetration { a: String, b: String },
    InitiallyUnstable { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidShelf { detail } => write!(f, "invalid shelf: {detail}"),
            Violation::InvalidConfig { field } => write!(f, "invalid config value for `{field}`"),
            Violation::InvalidId { id } => write!(f, "box id `{id}` is empty or reserved"),
            Violation::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
            Violation::NonPositiveDims { id } => {
                write!(f, "box `{id}` has non-positive or non-finite dims")
            }
            Violation::NonFiniteCenter { id } => write!(f, "box `{id}` has a non-finite center"),
            Violation::NonPositiveMass { id } => write!(f, "box `{id}` has non-positive mass"),
            Violation::PenetratesShelf { id } => write!(f, "box `{id}` penetrates shelf surface"),
            Violation::OutsideShelf { id } => write!(f, "box `{id}` lies outside the shelf volume"),
            Violation::InterPenetration { a, b } => {
                write!(f, "boxes `{a}` and `{b}` inter-penetrate")
            }
            Violation::InitiallyUnstable { id } => write!(f, "box `{id}` is initially unstable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

/// Lists every invariant the scene breaks; an empty report means valid.
///
/// The stability check only runs once the geometry itself is sound, since
/// contact detection is meaningless for boxes with broken extents.
pub fn validate_scene(scene: &Scene) -> ValidationReport {
    let mut out = Vec::new();
    let shelf = &scene.shelf;
    let cfg = &scene.config;

    if !(positive(shelf.width_x) && positive(shelf.depth_y) && positive(shelf.height_z)) {
        out.push(Violation::InvalidShelf {
            detail: "all extents must be positive".into(),
        });
    }
    let cfg_checks = [
        ("gravity", positive(cfg.gravity)),
        ("friction", non_negative(cfg.friction)),
        ("spinning_friction", non_negative(cfg.spinning_friction)),
        ("density", positive(cfg.density)),
        ("contact_tolerance", non_negative(cfg.contact_tolerance)),
        ("min_overlap_area", non_negative(cfg.min_overlap_area)),
        ("stability_margin", non_negative(cfg.stability_margin)),
    ];
    for (field, ok) in cfg_checks {
        if !ok {
            out.push(Violation::InvalidConfig {
                field: field.into(),
            });
        }
    }

    let tol = if non_negative(cfg.contact_tolerance) {
        cfg.contact_tolerance
    } else {
        0.0
    };
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut geometry_ok = true;

    for b in &scene.boxes {
        let id = b.id.as_str();
        if id.is_empty() || RESERVED_IDS.contains(&id) {
            out.push(Violation::InvalidId { id: id.into() });
        }
        let n = seen.entry(id).or_default();
        *n += 1;
        if *n == 2 {
            out.push(Violation::DuplicateId { id: id.into() });
        }
        let dims_ok = positive(b.dims.x) && positive(b.dims.y) && positive(b.dims.z);
        if !dims_ok {
            out.push(Violation::NonPositiveDims { id: id.into() });
        }
        if !b.center.is_finite() {
            out.push(Violation::NonFiniteCenter { id: id.into() });
        }
        if !positive(b.mass) {
            out.push(Violation::NonPositiveMass { id: id.into() });
        }
        if !dims_ok || !b.center.is_finite() {
            geometry_ok = false;
            continue;
        }
        if b.bottom() < -tol {
            out.push(Violation::PenetratesShelf { id: id.into() });
        }
        // The shelf is open at the front and back: a box may overhang in y
        // as long as its center stays over the shelf surface.
        let fp = b.footprint();
        let inside = fp.min_x >= -tol
            && fp.max_x <= shelf.width_x + tol
            && b.center.y >= 0.0
            && b.center.y <= shelf.depth_y
            && b.top() <= shelf.height_z + tol;
        if !inside {
            out.push(Violation::OutsideShelf { id: id.into() });
        }
    }

    if geometry_ok {
        for (i, a) in scene.boxes.iter().enumerate() {
            for b in &scene.boxes[i + 1..] {
                if penetration_depth(a, b) > tol {
                    out.push(Violation::InterPenetration {
                        a: a.id.to_string(),
                        b: b.id.to_string(),
                    });
                }
            }
        }
        for id in settle(scene, &Default::default()).collapsed {
            out.push(Violation::InitiallyUnstable { id: id.to_string() });
        }
    }

    ValidationReport { violations: out }
}

/// Smallest overlap of the two volumes over the three axes; positive only
/// when the boxes share interior volume.
fn penetration_depth(a: &super::BoxSpec, b: &super::BoxSpec) -> f64 {
    let axis = |ca: f64, da: f64, cb: f64, db: f64| {
        (ca + da / 2.0).min(cb + db / 2.0) - (ca - da / 2.0).max(cb - db / 2.0)
    };
    axis(a.center.x, a.dims.x, b.center.x, b.dims.x)
        .min(axis(a.center.y, a.dims.y, b.center.y, b.dims.y))
        .min(axis(a.center.z, a.dims.z, b.center.z, b.dims.z))
}
