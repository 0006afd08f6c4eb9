//! Pointing-gesture resolution: masked arm points are clustered, the deepest
//! slice of the largest cluster gives the pointed-at location, and the
//! nearest box centroid wins.

mod dbscan;
mod target;

use serde::{Deserialize, Serialize};

pub use dbscan::{dbscan, Label};
pub use target::{estimate_target, largest_cluster, resolve_pointing, select_box};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scene::BoxId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterParams {
    /// Neighbourhood radius (m).
    pub eps: f64,
    /// Neighbours (including the point itself) needed for a core point.
    pub min_pts: usize,
    /// Smallest arm cluster accepted as a pointing gesture.
    pub min_cluster_size: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            eps: 0.03,
            min_pts: 8,
            min_cluster_size: 30,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.min_pts < 1 {
            return Err(Error::InvalidArgument("min_pts must be at least 1".into()));
        }
        if self.min_cluster_size < self.min_pts {
            return Err(Error::InvalidArgument(
                "min_cluster_size must be at least min_pts".into(),
            ));
        }
        Ok(())
    }
}

/// Which end of the depth axis counts as the "top" points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthOrder {
    /// Greatest depth: the fingertip reaching towards the shelf.
    #[default]
    Farthest,
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointingConfig {
    pub cluster: ClusterParams,
    /// Share of the cluster, by depth, whose median is the target.
    pub fraction: f64,
    pub depth_order: DepthOrder,
}

impl Default for PointingConfig {
    fn default() -> Self {
        Self {
            cluster: ClusterParams::default(),
            fraction: 0.02,
            depth_order: DepthOrder::Farthest,
        }
    }
}

/// Camera-to-shelf rigid transform: `p_shelf = R · p_camera + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidTransform {
    pub translation: Vec3,
    pub rotation_rowmajor: [f64; 9],
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        translation: Vec3::new(0.0, 0.0, 0.0),
        rotation_rowmajor: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    };

    pub fn apply(&self, p: Vec3) -> Vec3 {
        let r = &self.rotation_rowmajor;
        Vec3::new(
            r[0] * p.x + r[1] * p.y + r[2] * p.z,
            r[3] * p.x + r[4] * p.y + r[5] * p.z,
            r[6] * p.x + r[7] * p.y + r[8] * p.z,
        ) + self.translation
    }

    /// Inverse, assuming the rotation block is orthonormal.
    pub fn inverse(&self) -> RigidTransform {
        let r = &self.rotation_rowmajor;
        let rt = [r[0], r[3], r[6], r[1], r[4], r[7], r[2], r[5], r[8]];
        let rotated = RigidTransform {
            translation: Vec3::default(),
            rotation_rowmajor: rt,
        };
        RigidTransform {
            translation: rotated.apply(self.translation).scale(-1.0),
            rotation_rowmajor: rt,
        }
    }
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudPoint {
    pub p: Vec3,
    #[serde(default)]
    pub mask: bool,
}

/// Camera-frame points; `z` is depth, growing away from the camera.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointCloud {
    pub camera_pose: RigidTransform,
    pub points: Vec<CloudPoint>,
}

impl PointCloud {
    /// Parses a point-cloud document and checks its invariants.
    pub fn parse(text: &str) -> Result<Self> {
        let cloud: PointCloud =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        cloud.check()?;
        Ok(cloud)
    }

    pub fn check(&self) -> Result<()> {
        let pose = &self.camera_pose;
        if !pose.translation.is_finite() || pose.rotation_rowmajor.iter().any(|v| !v.is_finite()) {
            return Err(Error::Schema("camera_pose must be finite".into()));
        }
        for (i, pt) in self.points.iter().enumerate() {
            if !pt.p.is_finite() {
                return Err(Error::Schema(format!("point {i} is not finite")));
            }
            if pt.mask && pt.p.z <= 0.0 {
                return Err(Error::Schema(format!(
                    "masked point {i} has non-positive depth"
                )));
            }
        }
        Ok(())
    }

    pub fn masked(&self) -> Vec<Vec3> {
        self.points.iter().filter(|p| p.mask).map(|p| p.p).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointingResult {
    pub detected: bool,
    /// Estimated pointed-at location, in the shelf frame.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_point: Option<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_box: Option<BoxId>,
    /// Distance from `target_point` to the selected box's centroid (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
}

impl PointingResult {
    pub fn not_detected() -> Self {
        Self::default()
    }
}
