//! Independent reference implementations used by the property and
//! acceptance tests. Nothing here calls into the physics, brg or pointing
//! code it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shelfplan_core::pointing::CloudPoint;
use shelfplan_core::{PointCloud, RigidTransform, Scene, Vec3};

// ---------------------------------------------------------------------------
// Stability oracle: brute-force contacts, triangle-based hull containment and
// the largest self-supporting subset found by enumerating all subsets.

pub struct Oracle {
    ids: Vec<String>,
    lo: Vec<[f64; 3]>,
    hi: Vec<[f64; 3]>,
    com: Vec<(f64, f64)>,
    shelf: (f64, f64),
    tol: f64,
    min_area: f64,
}

const EPS: f64 = 1e-9;

impl Oracle {
    pub fn new(scene: &Scene) -> Self {
        assert!(
            scene.boxes.len() <= 16,
            "oracle is exponential in the box count"
        );
        assert_eq!(
            scene.config.stability_margin, 0.0,
            "oracle models the zero-margin rule only"
        );
        let mut o = Oracle {
            ids: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
            com: Vec::new(),
            shelf: (scene.shelf.width_x, scene.shelf.depth_y),
            tol: scene.config.contact_tolerance,
            min_area: scene.config.min_overlap_area,
        };
        for b in &scene.boxes {
            let c = [b.center.x, b.center.y, b.center.z];
            let h = [b.dims.x / 2.0, b.dims.y / 2.0, b.dims.z / 2.0];
            o.ids.push(b.id.to_string());
            o.lo.push([c[0] - h[0], c[1] - h[1], c[2] - h[2]]);
            o.hi.push([c[0] + h[0], c[1] + h[1], c[2] + h[2]]);
            o.com.push((c[0], c[1]));
        }
        o
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn full(&self) -> u32 {
        (1u32 << self.len()) - 1
    }

    pub fn mask_of<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> u32 {
        ids.into_iter()
            .map(|id| 1u32 << self.ids.iter().position(|x| x == id).expect("known id"))
            .fold(0, |a, b| a | b)
    }

    pub fn ids_of(&self, mask: u32) -> BTreeSet<String> {
        (0..self.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.ids[i].clone())
            .collect()
    }

    fn corners(&self, i: usize, present: u32) -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        let mut add = |x0: f64, y0: f64, x1: f64, y1: f64| {
            if x1 > x0 && y1 > y0 && (x1 - x0) * (y1 - y0) > self.min_area {
                pts.extend([(x0, y0), (x1, y0), (x1, y1), (x0, y1)]);
            }
        };
        let (lo, hi) = (self.lo[i], self.hi[i]);
        if lo[2].abs() <= self.tol {
            add(
                lo[0].max(0.0),
                lo[1].max(0.0),
                hi[0].min(self.shelf.0),
                hi[1].min(self.shelf.1),
            );
        }
        for j in 0..self.len() {
            if j == i || present & (1 << j) == 0 || (lo[2] - self.hi[j][2]).abs() > self.tol {
                continue;
            }
            add(
                lo[0].max(self.lo[j][0]),
                lo[1].max(self.lo[j][1]),
                hi[0].min(self.hi[j][0]),
                hi[1].min(self.hi[j][1]),
            );
        }
        pts
    }

    /// A point lies in the convex hull of a planar set iff it lies in some
    /// triangle of that set.
    fn in_hull(pts: &[(f64, f64)], p: (f64, f64)) -> bool {
        let cross = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
            (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
        };
        let n = pts.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
                    let area = cross(pa, pb, pc);
                    if area.abs() < 1e-15 {
                        continue;
                    }
                    let s = area.signum();
                    let tol = EPS * 1e-3;
                    if s * cross(pa, pb, p) >= -tol
                        && s * cross(pb, pc, p) >= -tol
                        && s * cross(pc, pa, p) >= -tol
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn stands(&self, i: usize, present: u32) -> bool {
        let mut pts = self.corners(i, present);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts.dedup();
        Self::in_hull(&pts, self.com[i])
    }

    /// Largest subset of `start` in which every box stands on boxes of the
    /// subset or the shelf.
    pub fn survivors(&self, start: u32) -> u32 {
        let members: Vec<usize> = (0..self.len()).filter(|i| start & (1 << i) != 0).collect();
        let k = members.len();
        let mut subsets: Vec<u32> = (0..(1u32 << k))
            .map(|bits| {
                (0..k)
                    .filter(|j| bits & (1 << j) != 0)
                    .map(|j| 1u32 << members[j])
                    .fold(0, |a, b| a | b)
            })
            .collect();
        subsets.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
        for s in subsets {
            if (0..self.len())
                .filter(|i| s & (1 << i) != 0)
                .all(|i| self.stands(i, s))
            {
                return s;
            }
        }
        0
    }

    /// Boxes that fall once `removed` is gone.
    pub fn collapse(&self, removed: u32) -> u32 {
        let start = self.full() & !removed;
        start & !self.survivors(start)
    }

    pub fn dependency_dictionary(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut d: BTreeMap<String, BTreeSet<String>> = self
            .ids
            .iter()
            .map(|id| (id.clone(), BTreeSet::new()))
            .collect();
        for s in 0..self.len() {
            let fallen = self.collapse(1 << s);
            for b in 0..self.len() {
                if fallen & (1 << b) != 0 {
                    d.get_mut(&self.ids[b]).unwrap().insert(self.ids[s].clone());
                }
            }
        }
        d
    }

    /// Every ordering of `set` whose removal never lets anything fall.
    pub fn collapse_free_orders(&self, set: &BTreeSet<String>) -> BTreeSet<Vec<String>> {
        let items: Vec<&String> = set.iter().collect();
        let mut memo: BTreeMap<u32, bool> = BTreeMap::new();
        let mut quiet = |removed: u32| {
            *memo
                .entry(removed)
                .or_insert_with(|| self.collapse(removed) == 0)
        };
        let mut out = BTreeSet::new();
        let mut perm: Vec<usize> = (0..items.len()).collect();
        permute(&mut perm, 0, &mut |order| {
            let mut removed = 0u32;
            for &i in order {
                removed |= self.mask_of([items[i].as_str()]);
                if !quiet(removed) {
                    return;
                }
            }
            out.insert(order.iter().map(|&i| items[i].clone()).collect());
        });
        out
    }
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

// ---------------------------------------------------------------------------
// DBSCAN reference: all-pairs distances, union-find over core points.

pub fn reference_dbscan(points: &[Vec3], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let close = |a: &Vec3, b: &Vec3| {
        let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
        dx * dx + dy * dy + dz * dz <= eps * eps
    };
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| close(&points[i], &points[j])).count() >= min_pts)
        .collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if core[i] && core[j] && close(&points[i], &points[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    // clusters numbered by their lowest core index
    let mut number: BTreeMap<usize, usize> = BTreeMap::new();
    let mut root_of_core = vec![None; n];
    for i in 0..n {
        if core[i] {
            let r = find(&mut parent, i);
            let next = number.len();
            let c = *number.entry(r).or_insert(next);
            root_of_core[i] = Some(c);
        }
    }
    (0..n)
        .map(|i| {
            if core[i] {
                root_of_core[i]
            } else {
                (0..n)
                    .filter(|&j| core[j] && close(&points[i], &points[j]))
                    .filter_map(|j| root_of_core[j])
                    .min()
            }
        })
        .collect()
}

/// Relabels clusters by first appearance so partitions compare directly.
pub fn canonical(labels: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            l.map(|c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
        })
        .collect()
}

pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
    let blobs: Vec<Vec3> = (0..rng.gen_range(1..6))
        .map(|_| {
            Vec3::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.2..1.2),
            )
        })
        .collect();
    let spread = rng.gen_range(0.01..0.08);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.15) {
                Vec3::new(
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(-0.6..0.6),
                    rng.gen_range(0.1..1.3),
                )
            } else {
                let c = blobs[rng.gen_range(0..blobs.len())];
                c + Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
                .scale(spread)
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Synthetic pointing clouds.

/// Camera 1.04 m in front of the shelf looking along +y: camera x is shelf
/// x, camera y is shelf -z, camera z (depth) is shelf y.
pub fn front_camera(height: f64) -> RigidTransform {
    RigidTransform {
        translation: Vec3::new(0.5, -1.04, height),
        rotation_rowmajor: [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0],
    }
}

pub fn to_camera(pose: &RigidTransform, p: Vec3) -> Vec3 {
    let r = &pose.rotation_rowmajor;
    let d = p - pose.translation;
    Vec3::new(
        r[0] * d.x + r[3] * d.y + r[6] * d.z,
        r[1] * d.x + r[4] * d.y + r[7] * d.z,
        r[2] * d.x + r[5] * d.y + r[8] * d.z,
    )
}

pub fn to_shelf(pose: &RigidTransform, p: Vec3) -> Vec3 {
    let r = &pose.rotation_rowmajor;
    Vec3::new(
        r[0] * p.x + r[1] * p.y + r[2] * p.z + pose.translation.x,
        r[3] * p.x + r[4] * p.y + r[5] * p.z + pose.translation.y,
        r[6] * p.x + r[7] * p.y + r[8] * p.z + pose.translation.z,
    )
}

/// The deepest `ceil(2%)` of `arm` (camera frame), median per coordinate.
pub fn deepest_median(arm: &[Vec3]) -> Vec3 {
    let mut sorted = arm.to_vec();
    sorted.sort_by(|a, b| b.z.partial_cmp(&a.z).unwrap());
    let m = (arm.len() * 2).div_ceil(100).max(1);
    let med = |mut v: Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if v.len() % 2 == 1 {
            v[v.len() / 2]
        } else {
            (v[v.len() / 2 - 1] + v[v.len() / 2]) / 2.0
        }
    };
    let top = &sorted[..m];
    Vec3::new(
        med(top.iter().map(|p| p.x).collect()),
        med(top.iter().map(|p| p.y).collect()),
        med(top.iter().map(|p| p.z).collect()),
    )
}

pub struct ArmCloud {
    pub cloud: PointCloud,
    /// The box the deepest-slice median is nearest to, by a clear margin.
    pub expected: String,
    /// Distance gap to the runner-up centroid (m).
    pub margin: f64,
}

/// Builds a masked arm whose deepest 2% median lands near a chosen box
/// centroid, with a 5 cm or better lead over every other centroid. Unmasked
/// background and a few isolated masked specks are mixed in.
pub fn arm_cloud(rng: &mut ChaCha8Rng, scene: &Scene, pose: &RigidTransform) -> ArmCloud {
    loop {
        let target = &scene.boxes[rng.gen_range(0..scene.boxes.len())];
        let tip = target.center
            + Vec3::new(
                rng.gen_range(-0.03..0.03),
                rng.gen_range(-0.03..0.03),
                rng.gen_range(-0.03..0.03),
            );
        let tip_cam = to_camera(pose, tip);
        if tip_cam.z < 0.3 {
            continue;
        }
        let reach = rng.gen_range(0.35..0.6);
        let shoulder =
            tip_cam + Vec3::new(rng.gen_range(-0.2..0.2), rng.gen_range(0.05..0.3), -reach);
        let n = rng.gen_range(150..260);
        let mut arm: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                let jitter = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                shoulder + (tip_cam - shoulder).scale(t) + jitter.scale(0.004)
            })
            .collect();
        arm.retain(|p| p.z > 0.0);

        let est = to_shelf(pose, deepest_median(&arm));
        let mut dists: Vec<(f64, &str)> = scene
            .boxes
            .iter()
            .map(|b| (b.center.distance(est), b.id.as_str()))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let margin = dists.get(1).map_or(f64::INFINITY, |d| d.0 - dists[0].0);
        if margin < 0.05 {
            continue;
        }

        let mut points: Vec<CloudPoint> = arm
            .into_iter()
            .map(|p| CloudPoint { p, mask: true })
            .collect();
        for _ in 0..rng.gen_range(20..80) {
            let p = Vec3::new(
                rng.gen_range(-0.6..0.6),
                rng.gen_range(-0.6..0.6),
                rng.gen_range(0.2..2.0),
            );
            points.push(CloudPoint { p, mask: false });
        }
        for _ in 0..rng.gen_range(0..4) {
            // isolated masked specks, shallower than the arm
            let p = Vec3::new(
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(0.05..0.2),
            );
            points.push(CloudPoint { p, mask: true });
        }
        // shuffle so the arm is not contiguous in the input
        for i in (1..points.len()).rev() {
            points.swap(i, rng.gen_range(0..=i));
        }
        return ArmCloud {
            cloud: PointCloud {
                camera_pose: *pose,
                points,
            },
            expected: dists[0].1.to_owned(),
            margin,
        };
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
