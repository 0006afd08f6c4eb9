use serde::{Deserialize, Serialize};

use super::{validate_scene, BoxSpec, Scene, SceneConfig, ShelfSpec};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// On-disk shape of a scene. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub shelf: ShelfSpec,
    #[serde(default)]
    pub config: SceneConfig,
    pub boxes: Vec<BoxDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDocument {
    pub id: String,
    pub dims: Vec3,
    pub center: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

impl SceneDocument {
    /// Builds the scene without validating it.
    pub fn into_scene(self) -> Scene {
        let config = self.config;
        let boxes = self
            .boxes
            .into_iter()
            .map(|b| {
                let spec = BoxSpec::new(b.id, b.dims, b.center, &config);
                match b.mass {
                    Some(m) => spec.with_mass(m),
                    None => spec,
                }
            })
            .collect();
        Scene {
            shelf: self.shelf,
            boxes,
            config,
        }
    }

    pub fn from_scene(scene: &Scene) -> Self {
        Self {
            shelf: scene.shelf,
            config: scene.config,
            boxes: scene
                .boxes
                .iter()
                .map(|b| BoxDocument {
                    id: b.id.to_string(),
                    dims: b.dims,
                    center: b.center,
                    mass: b.mass_overridden.then_some(b.mass),
                })
                .collect(),
        }
    }
}

/// Parses and validates a JSON scene document.
pub fn parse_scene(text: &str) -> Result<Scene> {
    let doc: SceneDocument =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let scene = doc.into_scene();
    let report = validate_scene(&scene);
    if report.is_valid() {
        Ok(scene)
    } else {
        Err(Error::Validation(report.violations))
    }
}

/// Serializes a scene as a pretty-printed JSON document.
pub fn export_scene(scene: &Scene) -> String {
    let mut s = serde_json::to_string_pretty(&SceneDocument::from_scene(scene))
        .expect("scene documents always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_CUBE: &str = r#"{
        "shelf": {"width_x": 1.0, "depth_y": 0.3, "height_z": 1.6},
        "boxes": [{"id": "b1", "dims": [0.2, 0.2, 0.2], "center": [0.1, 0.1, 0.1]}]
    }"#;

    #[test]
    fn parses_single_cube_with_derived_mass() {
        let scene = parse_scene(ONE_CUBE).unwrap();
        assert_eq!(scene.boxes.len(), 1);
        assert!((scene.boxes[0].mass - 0.008).abs() < 1e-15);
        assert_eq!(scene.config, SceneConfig::default());
    }

    #[test]
    fn accepts_largest_catalogue_box_on_standard_shelf() {
        let text = r#"{
            "shelf": {"width_x": 1.0, "depth_y": 0.3, "height_z": 1.6},
            "boxes": [{"id": "big", "dims": [0.23, 0.31, 0.25], "center": [0.5, 0.15, 0.125]}]
        }"#;
        let scene = parse_scene(text).unwrap();
        assert_eq!(scene.boxes[0].dims, Vec3::new(0.23, 0.31, 0.25));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = r#"{
            "shelf": {"width_x": 1.0, "depth_y": 0.3, "height_z": 1.6},
            "boxes": [
                {"id": "b1", "dims": [0.2, 0.2, 0.2], "center": [0.1, 0.1, 0.1]},
                {"id": "b1", "dims": [0.2, 0.2, 0.2], "center": [0.5, 0.1, 0.1]}
            ]
        }"#;
        match parse_scene(text) {
            Err(Error::Validation(v)) => {
                assert!(v
                    .iter()
                    .any(|v| matches!(v, super::super::Violation::DuplicateId { .. })));
                assert!(v.iter().any(|v| v.to_string().contains("duplicate id")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let text = r#"{"shelf": {"width_x": 1.0, "depth_y": 0.3, "height_z": 1.6}, "boxes": [], "colour": 3}"#;
        assert!(matches!(parse_scene(text), Err(Error::Schema(_))));
        let text = r#"{"shelf": {"width_x": 1.0, "depth_y": 0.3, "height_z": 1.6}, "config": {"gravitee": 1}, "boxes": []}"#;
        assert!(matches!(parse_scene(text), Err(Error::Schema(_))));
    }

    #[test]
    fn malformed_json_is_schema_error() {
        assert!(matches!(parse_scene("{\"shelf\": "), Err(Error::Schema(_))));
    }

    #[test]
    fn mass_override_survives_export() {
        let text = r#"{
            "shelf": {"width_x": 1.0, "depth_y": 0.3, "height_z": 1.6},
            "boxes": [{"id": "b1", "dims": [0.2, 0.2, 0.2], "center": [0.1, 0.1, 0.1], "mass": 2.5}]
        }"#;
        let scene = parse_scene(text).unwrap();
        let doc = export_scene(&scene);
        assert!(doc.contains("\"mass\": 2.5"));
        assert_eq!(parse_scene(&doc).unwrap(), scene);
    }

    #[test]
    fn empty_scene_round_trips() {
        let scene = Scene::new(ShelfSpec::default(), SceneConfig::default());
        let doc = export_scene(&scene);
        let back = parse_scene(&doc).unwrap();
        assert!(back.boxes.is_empty());
        assert_eq!(back, scene);
    }

    #[test]
    fn config_overrides_fill_from_defaults() {
        let text = r#"{"shelf": {"width_x": 1.0, "depth_y": 0.3, "height_z": 1.6}, "config": {"density": 2.0}, "boxes": []}"#;
        let scene = parse_scene(text).unwrap();
        assert_eq!(scene.config.density, 2.0);
        assert_eq!(scene.config.gravity, 9.81);
    }
}
