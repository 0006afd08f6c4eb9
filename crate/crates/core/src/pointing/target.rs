use super::{
    dbscan, DepthOrder, Label, PointCloud, PointingConfig, PointingResult, RigidTransform,
};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scene::{BoxId, Scene};

/// Points of the biggest cluster; ties go to the lower cluster index.
pub fn largest_cluster(points: &[Vec3], labels: &[Label]) -> Vec<Vec3> {
    let n_clusters = labels
        .iter()
        .filter_map(|l| l.cluster())
        .max()
        .map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; n_clusters];
    for c in labels.iter().filter_map(|l| l.cluster()) {
        sizes[c] += 1;
    }
    let Some(best) = (0..n_clusters).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
    else {
        return Vec::new();
    };
    points
        .iter()
        .zip(labels)
        .filter(|(_, l)| **l == Label::Cluster(best))
        .map(|(p, _)| *p)
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Per-coordinate median of the `max(1, ceil(fraction · n))` points at the
/// selected end of the depth axis.
pub fn estimate_target(cluster: &[Vec3], fraction: f64, order: DepthOrder) -> Result<Vec3> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    let n = cluster.len();
    // The small slack keeps e.g. 0.02 × 100 at 2 despite rounding.
    let m = ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n);

    let mut sorted = cluster.to_vec();
    match order {
        DepthOrder::Farthest => sorted.sort_by(|a, b| b.z.total_cmp(&a.z)),
        DepthOrder::Nearest => sorted.sort_by(|a, b| a.z.total_cmp(&b.z)),
    }
    let top = &sorted[..m];
    let mut xs: Vec<f64> = top.iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = top.iter().map(|p| p.y).collect();
    let mut zs: Vec<f64> = top.iter().map(|p| p.z).collect();
    Ok(Vec3::new(median(&mut xs), median(&mut ys), median(&mut zs)))
}

/// Nearest box centroid to a camera-frame point, after moving it into the
/// shelf frame. Ties go to the smaller id.
pub fn select_box(
    target: Vec3,
    scene: &Scene,
    camera_pose: &RigidTransform,
) -> Result<(BoxId, f64)> {
    let p = camera_pose.apply(target);
    scene
        .boxes
        .iter()
        .map(|b| (&b.id, b.center.distance(p)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)))
        .map(|(id, d)| (id.clone(), d))
        .ok_or(Error::EmptyScene)
}

/// Full gesture pipeline: masked points, clustering, size gate, depth-slice
/// median, nearest box.
pub fn resolve_pointing(
    cloud: &PointCloud,
    scene: &Scene,
    config: &PointingConfig,
) -> Result<PointingResult> {
    config.cluster.validate()?;
    let masked = cloud.masked();
    let labels = dbscan(&masked, &config.cluster);
    let arm = largest_cluster(&masked, &labels);
    if arm.is_empty() || arm.len() < config.cluster.min_cluster_size {
        return Ok(PointingResult::not_detected());
    }
    let target = estimate_target(&arm, config.fraction, config.depth_order)?;
    let (id, distance) = select_box(target, scene, &cloud.camera_pose)?;
    Ok(PointingResult {
        detected: true,
        target_point: Some(cloud.camera_pose.apply(target)),
        selected_box: Some(id),
        distance: Some(distance),
    })
}
