use std::collections::{HashMap, VecDeque};

use super::ClusterParams;
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Noise,
    Cluster(usize),
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Cluster(c) => Some(c),
            Label::Noise => None,
        }
    }
}

/// Uniform grid with cell size `eps`; a radius query only has to look at
/// the 27 surrounding cells.
struct Grid<'a> {
    points: &'a [Vec3],
    eps: f64,
    cells: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl<'a> Grid<'a> {
    fn new(points: &'a [Vec3], eps: f64) -> Self {
        let mut cells: HashMap<_, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, eps)).or_default().push(i);
        }
        Self { points, eps, cells }
    }

    fn key(p: &Vec3, eps: f64) -> (i64, i64, i64) {
        (
            (p.x / eps).floor() as i64,
            (p.y / eps).floor() as i64,
            (p.z / eps).floor() as i64,
        )
    }

    fn neighbors(&self, i: usize) -> Vec<usize> {
        let p = self.points[i];
        let (cx, cy, cz) = Self::key(&p, self.eps);
        let eps2 = self.eps * self.eps;
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(cell) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) else {
                        continue;
                    };
                    out.extend(cell.iter().copied().filter(|&j| {
                        let d = self.points[j] - p;
                        d.dot(d) <= eps2
                    }));
                }
            }
        }
        out
    }
}

/// Density-based clustering. Cluster ids follow the input order of each
/// cluster's first core point; a border point joins the first cluster that
/// reaches it.
pub fn dbscan(points: &[Vec3], params: &ClusterParams) -> Vec<Label> {
    let grid = Grid::new(points, params.eps);
    let mut labels: Vec<Option<Label>> = vec![None; points.len()];
    let mut next = 0;

    for i in 0..points.len() {
        if labels[i].is_some() {
            continue;
        }
        let seeds = grid.neighbors(i);
        if seeds.len() < params.min_pts {
            labels[i] = Some(Label::Noise);
            continue;
        }
        let cluster = Label::Cluster(next);
        next += 1;
        labels[i] = Some(cluster);

        let mut queue: VecDeque<usize> = seeds.into();
        while let Some(j) = queue.pop_front() {
            match labels[j] {
                Some(Label::Cluster(_)) => {}
                Some(Label::Noise) => labels[j] = Some(cluster),
                None => {
                    labels[j] = Some(cluster);
                    let more = grid.neighbors(j);
                    if more.len() >= params.min_pts {
                        queue.extend(more);
                    }
                }
            }
        }
    }

    labels
        .into_iter()
        .map(|l| l.expect("every point is labelled"))
        .collect()
}
