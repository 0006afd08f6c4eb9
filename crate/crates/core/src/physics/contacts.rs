use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::geometry::Rect;
use crate::scene::{BoxId, Scene};

/// What a contact patch rests on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Supporter {
    Shelf,
    Box(BoxId),
}

impl fmt::Display for Supporter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Supporter::Shelf => f.write_str("SHELF"),
            Supporter::Box(id) => write!(f, "{id}"),
        }
    }
}

impl Serialize for Supporter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactPatch {
    pub supporter: Supporter,
    pub supported: BoxId,
    pub rect: Rect,
    pub z_level: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SupportMap {
    pub patches: Vec<ContactPatch>,
    /// Box id to indices into `patches`.
    pub by_supported: BTreeMap<BoxId, Vec<usize>>,
}

impl SupportMap {
    pub fn patches_of<'a>(&'a self, id: &str) -> impl Iterator<Item = &'a ContactPatch> + 'a {
        self.by_supported
            .get(id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.patches[i])
    }
}

/// Index form of a single patch: supporter box index (`None` = shelf) and
/// the contact rectangle.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawContact {
    pub supporter: Option<usize>,
    pub rect: Rect,
    pub z_level: f64,
}

/// All patches of every box, by box index. Patches between two boxes do not
/// change when other boxes disappear, so this is computed once per scene and
/// filtered during cascades.
pub(crate) fn raw_contacts(scene: &Scene) -> Vec<Vec<RawContact>> {
    let tol = scene.config.contact_tolerance;
    let min_area = scene.config.min_overlap_area;
    let shelf = scene.shelf.footprint();
    scene
        .boxes
        .iter()
        .map(|upper| {
            let footprint = upper.footprint();
            let bottom = upper.bottom();
            let mut out = Vec::new();
            if bottom.abs() <= tol {
                if let Some(rect) = footprint
                    .intersection(&shelf)
                    .filter(|r| r.area() > min_area)
                {
                    out.push(RawContact {
                        supporter: None,
                        rect,
                        z_level: 0.0,
                    });
                }
            }
            for (j, lower) in scene.boxes.iter().enumerate() {
                if std::ptr::eq(lower, upper) || (bottom - lower.top()).abs() > tol {
                    continue;
                }
                if let Some(rect) = footprint
                    .intersection(&lower.footprint())
                    .filter(|r| r.area() > min_area)
                {
                    out.push(RawContact {
                        supporter: Some(j),
                        rect,
                        z_level: lower.top(),
                    });
                }
            }
            out
        })
        .collect()
}

/// Every contact patch in the scene.
pub fn compute_contacts(scene: &Scene) -> SupportMap {
    let mut map = SupportMap::default();
    for (i, contacts) in raw_contacts(scene).into_iter().enumerate() {
        let id = &scene.boxes[i].id;
        let slot = map.by_supported.entry(id.clone()).or_default();
        for c in contacts {
            slot.push(map.patches.len());
            map.patches.push(ContactPatch {
                supporter: match c.supporter {
                    None => Supporter::Shelf,
                    Some(j) => Supporter::Box(scene.boxes[j].id.clone()),
                },
                supported: id.clone(),
                rect: c.rect,
                z_level: c.z_level,
            });
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::fixtures::{pyramid, side_by_side, stacked_pair};

    #[test]
    fn aligned_cubes_share_full_face() {
        let map = compute_contacts(&stacked_pair());
        let b: Vec<_> = map.patches_of("B").collect();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].supporter, Supporter::Box("A".into()));
        assert!((b[0].rect.area() - 0.04).abs() < 1e-12);
        let a: Vec<_> = map.patches_of("A").collect();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].supporter, Supporter::Shelf);
    }

    #[test]
    fn bridge_rests_on_both_pillars() {
        let map = compute_contacts(&pyramid());
        let c: Vec<_> = map.patches_of("C").collect();
        assert_eq!(c.len(), 2);
        let on_a = c
            .iter()
            .find(|p| p.supporter == Supporter::Box("A".into()))
            .unwrap();
        let on_b = c
            .iter()
            .find(|p| p.supporter == Supporter::Box("B".into()))
            .unwrap();
        assert!((on_a.rect.min_x - 0.0).abs() < 1e-12 && (on_a.rect.max_x - 0.2).abs() < 1e-12);
        assert!((on_b.rect.min_x - 0.4).abs() < 1e-12 && (on_b.rect.max_x - 0.6).abs() < 1e-12);
        assert!((on_a.rect.area() - 0.04).abs() < 1e-12);
        assert!((on_b.rect.area() - 0.04).abs() < 1e-12);
        assert!((on_a.z_level - 0.2).abs() < 1e-12);
    }

    #[test]
    fn side_by_side_cubes_have_no_box_contact() {
        let map = compute_contacts(&side_by_side());
        assert!(map.patches.iter().all(|p| p.supporter == Supporter::Shelf));
        assert_eq!(map.patches.len(), 2);
    }

    #[test]
    fn supporter_serializes_as_token() {
        assert_eq!(
            serde_json::to_string(&Supporter::Shelf).unwrap(),
            "\"SHELF\""
        );
        assert_eq!(
            serde_json::to_string(&Supporter::Box("A".into())).unwrap(),
            "\"A\""
        );
    }
}
