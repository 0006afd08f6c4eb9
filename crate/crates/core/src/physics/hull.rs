//! Convex hull of contact corners and the centre-of-mass containment test.

/// Slack for floating-point noise in the containment test (m).
pub const GEOMETRY_EPS: f64 = 1e-9;

type P = (f64, f64);

fn cross(o: P, a: P, b: P) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain. Returns the hull counter-clockwise without
/// collinear points.
pub fn convex_hull(points: &[P]) -> Vec<P> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<P> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &P>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Signed distance from `p` to the boundary of a counter-clockwise convex
/// polygon: positive inside, negative outside (exact for the inside case,
/// a lower bound on the magnitude outside).
pub fn inward_distance(hull: &[P], p: P) -> f64 {
    match hull.len() {
        0 => f64::NEG_INFINITY,
        1 => -((p.0 - hull[0].0).hypot(p.1 - hull[0].1)),
        2 => -segment_distance(hull[0], hull[1], p),
        n => (0..n)
            .map(|i| {
                let a = hull[i];
                let b = hull[(i + 1) % n];
                cross(a, b, p) / (b.0 - a.0).hypot(b.1 - a.1)
            })
            .fold(f64::INFINITY, f64::min),
    }
}

fn segment_distance(a: P, b: P, p: P) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// True iff `com` lies at least `margin` inside the hull of `corners`
/// (on the boundary counts when `margin` is zero).
pub fn supports(corners: &[P], com: P, margin: f64) -> bool {
    if corners.is_empty() {
        return false;
    }
    let hull = convex_hull(corners);
    inward_distance(&hull, com) >= margin - GEOMETRY_EPS
}
