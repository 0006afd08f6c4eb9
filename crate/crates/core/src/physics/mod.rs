//! Quasi-static stability.
//!
//! A box stands iff the x-y projection of its centre of mass lies inside the
//! convex hull of the corners of its contact patches. Removing boxes starts
//! a cascade: unstable boxes vanish round by round until a fixpoint.

mod contacts;
pub mod hull;

use std::collections::BTreeSet;

use serde::Serialize;

pub use contacts::{compute_contacts, ContactPatch, SupportMap, Supporter};

use crate::error::{Error, Result};
use crate::scene::{BoxId, Scene};
use contacts::{raw_contacts, RawContact};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct StabilityReport {
    /// Boxes that fell, in cascade order.
    pub collapsed: Vec<BoxId>,
    /// Boxes still standing, in scene order.
    pub survivors: Vec<BoxId>,
}

/// Whether `box_id` stands on the patches recorded for it in `support`.
pub fn is_stable(box_id: &str, support: &SupportMap, scene: &Scene) -> Result<bool> {
    let b = scene
        .get(box_id)
        .ok_or_else(|| Error::MissingBox(box_id.to_owned()))?;
    let corners: Vec<(f64, f64)> = support
        .patches_of(box_id)
        .flat_map(|p| p.rect.corners())
        .collect();
    Ok(hull::supports(
        &corners,
        (b.center.x, b.center.y),
        scene.config.stability_margin,
    ))
}

fn stands(scene: &Scene, contacts: &[RawContact], i: usize, active: &[bool]) -> bool {
    let corners: Vec<(f64, f64)> = contacts
        .iter()
        .filter(|c| c.supporter.is_none_or(|j| active[j]))
        .flat_map(|c| c.rect.corners())
        .collect();
    let com = &scene.boxes[i].center;
    hull::supports(&corners, (com.x, com.y), scene.config.stability_margin)
}

/// Removes `removed` and lets everything that loses support fall.
///
/// Each round collects every box that no longer stands, appends them sorted
/// by centre height then id, and takes them out of the support structure.
pub fn settle(scene: &Scene, removed: &BTreeSet<BoxId>) -> StabilityReport {
    let contacts = raw_contacts(scene);
    let mut active: Vec<bool> = scene
        .boxes
        .iter()
        .map(|b| !removed.contains(&b.id))
        .collect();
    let mut collapsed = Vec::new();

    loop {
        let mut falling: Vec<usize> = (0..scene.boxes.len())
            .filter(|&i| active[i] && !stands(scene, &contacts[i], i, &active))
            .collect();
        if falling.is_empty() {
            break;
        }
        falling.sort_by(|&a, &b| {
            let (a, b) = (&scene.boxes[a], &scene.boxes[b]);
            a.center
                .z
                .total_cmp(&b.center.z)
                .then_with(|| a.id.cmp(&b.id))
        });
        for i in falling {
            active[i] = false;
            collapsed.push(scene.boxes[i].id.clone());
        }
    }

    let survivors = scene
        .boxes
        .iter()
        .zip(&active)
        .filter(|(_, &a)| a)
        .map(|(b, _)| b.id.clone())
        .collect();
    StabilityReport {
        collapsed,
        survivors,
    }
}

/// The set of boxes that would fall if `box_id` alone were taken out.
pub fn probe_removal(scene: &Scene, box_id: &str) -> Result<BTreeSet<BoxId>> {
    let b = scene
        .get(box_id)
        .ok_or_else(|| Error::MissingBox(box_id.to_owned()))?;
    let removed = BTreeSet::from([b.id.clone()]);
    Ok(settle(scene, &removed).collapsed.into_iter().collect())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::geometry::Vec3;
    use crate::scene::{BoxSpec, Scene, SceneConfig, ShelfSpec};

    pub fn build(boxes: &[(&str, [f64; 3], [f64; 3])]) -> Scene {
        let cfg = SceneConfig::default();
        let mut s = Scene::new(ShelfSpec::default(), cfg);
        for (id, d, c) in boxes {
            s.boxes
                .push(BoxSpec::new(*id, Vec3::from(*d), Vec3::from(*c), &cfg));
        }
        s
    }

    /// Two cubes bridged by a 0.6 m plank.
    pub fn pyramid() -> Scene {
        build(&[
            ("A", [0.2, 0.2, 0.2], [0.1, 0.1, 0.1]),
            ("B", [0.2, 0.2, 0.2], [0.5, 0.1, 0.1]),
            ("C", [0.6, 0.2, 0.2], [0.3, 0.1, 0.3]),
        ])
    }

    /// Three aligned cubes, A at the bottom.
    pub fn tower() -> Scene {
        build(&[
            ("A", [0.2, 0.2, 0.2], [0.1, 0.1, 0.1]),
            ("B", [0.2, 0.2, 0.2], [0.1, 0.1, 0.3]),
            ("C", [0.2, 0.2, 0.2], [0.1, 0.1, 0.5]),
        ])
    }

    pub fn stacked_pair() -> Scene {
        build(&[
            ("A", [0.2, 0.2, 0.2], [0.1, 0.1, 0.1]),
            ("B", [0.2, 0.2, 0.2], [0.1, 0.1, 0.3]),
        ])
    }

    pub fn side_by_side() -> Scene {
        build(&[
            ("A", [0.2, 0.2, 0.2], [0.1, 0.1, 0.1]),
            ("B", [0.2, 0.2, 0.2], [0.35, 0.1, 0.1]),
        ])
    }
}
