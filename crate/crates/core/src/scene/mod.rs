//! Boxes on a shelf: types, the JSON scene format, validation and a seeded
//! generator.

mod document;
mod generate;
mod validate;

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{Rect, Vec3};

pub use document::{export_scene, parse_scene, SceneDocument};
pub use generate::{default_palette, generate_scene, generate_scene_on};
pub use validate::{validate_scene, ValidationReport, Violation};

/// Ids reserved for the shelf sentinel and the whole-shelf plan target.
pub const RESERVED_IDS: [&str; 2] = ["SHELF", "ALL"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxId(String);

impl BoxId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BoxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for BoxId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for BoxId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for BoxId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

/// Physical constants and the contact/stability tolerances.
///
/// `friction` and `spinning_friction` are carried for format parity only;
/// the stability criterion is frictionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub gravity: f64,
    pub friction: f64,
    pub spinning_friction: f64,
    pub density: f64,
    /// Faces closer than this (m) along z are in contact.
    pub contact_tolerance: f64,
    /// Contact rectangles must be larger than this (m²).
    pub min_overlap_area: f64,
    /// Required inward distance (m) of the COM from the support hull boundary.
    pub stability_margin: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            gravity: 9.81,
            friction: 0.75,
            spinning_friction: 0.01,
            density: 1.0,
            contact_tolerance: 0.001,
            min_overlap_area: 0.0001,
            stability_margin: 0.0,
        }
    }
}

/// Usable shelf volume. The origin is the front-left corner of the shelf
/// surface; x runs right, y into the shelf, z up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShelfSpec {
    pub width_x: f64,
    pub depth_y: f64,
    pub height_z: f64,
}

impl ShelfSpec {
    pub fn footprint(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width_x, self.depth_y)
    }

    pub fn volume(&self) -> f64 {
        self.width_x * self.depth_y * self.height_z
    }
}

impl Default for ShelfSpec {
    /// 100 cm × 30 cm × 160 cm.
    fn default() -> Self {
        Self {
            width_x: 1.0,
            depth_y: 0.3,
            height_z: 1.6,
        }
    }
}

/// An axis-aligned box resting in the shelf frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSpec {
    pub id: BoxId,
    /// Extents along x, y and z.
    pub dims: Vec3,
    pub center: Vec3,
    pub mass: f64,
    /// Whether `mass` was given explicitly rather than derived from density.
    pub mass_overridden: bool,
}

impl BoxSpec {
    /// A box with uniform density `config.density`.
    pub fn new(id: impl Into<BoxId>, dims: Vec3, center: Vec3, config: &SceneConfig) -> Self {
        Self {
            id: id.into(),
            dims,
            center,
            mass: config.density * dims.x * dims.y * dims.z,
            mass_overridden: false,
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self.mass_overridden = true;
        self
    }

    pub fn volume(&self) -> f64 {
        self.dims.x * self.dims.y * self.dims.z
    }

    pub fn bottom(&self) -> f64 {
        self.center.z - self.dims.z / 2.0
    }

    pub fn top(&self) -> f64 {
        self.center.z + self.dims.z / 2.0
    }

    pub fn footprint(&self) -> Rect {
        Rect::new(
            self.center.x - self.dims.x / 2.0,
            self.center.y - self.dims.y / 2.0,
            self.center.x + self.dims.x / 2.0,
            self.center.y + self.dims.y / 2.0,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub shelf: ShelfSpec,
    pub boxes: Vec<BoxSpec>,
    pub config: SceneConfig,
}

impl Scene {
    pub fn new(shelf: ShelfSpec, config: SceneConfig) -> Self {
        Self {
            shelf,
            boxes: Vec::new(),
            config,
        }
    }

    pub fn get(&self, id: &str) -> Option<&BoxSpec> {
        self.boxes.iter().find(|b| b.id.as_str() == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.boxes.iter().position(|b| b.id.as_str() == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index_of(id).is_some()
    }

    pub fn ids(&self) -> impl Iterator<Item = &BoxId> {
        self.boxes.iter().map(|b| &b.id)
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// A copy of the scene with the given boxes taken out.
    pub fn without<'a, I>(&self, ids: I) -> Scene
    where
        I: IntoIterator<Item = &'a BoxId>,
    {
        let drop: BTreeSet<&BoxId> = ids.into_iter().collect();
        Scene {
            shelf: self.shelf,
            boxes: self
                .boxes
                .iter()
                .filter(|b| !drop.contains(&b.id))
                .cloned()
                .collect(),
            config: self.config,
        }
    }
}
