//! DBSCAN recognition of extended targets from map points.
//!
//! Scan order is input order: clusters are numbered by the first core point
//! that seeds them, and a border point joins the first cluster whose
//! expansion reaches it.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    pub eps: f64,
    pub min_pts: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self { eps: 0.5, min_pts: 3 }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::validation(format!("cluster eps must be > 0, got {}", self.eps)));
        }
        if self.min_pts == 0 {
            return Err(Error::validation("cluster min_pts must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
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

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Labeling {
    pub labels: Vec<Label>,
    pub cluster_count: usize,
}

impl Labeling {
    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Noise).count()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cluster_count];
        for l in &self.labels {
            if let Label::Cluster(c) = l {
                sizes[*c] += 1;
            }
        }
        sizes
    }
}

/// Uniform grid with cell side `eps`; neighbours lie in the 3x3 block.
struct GridIndex<'a> {
    points: &'a [Vec2],
    eps: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    fn new(points: &'a [Vec2], eps: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(*p, eps)).or_default().push(i);
        }
        Self { points, eps, cells }
    }

    fn key(p: Vec2, eps: f64) -> (i64, i64) {
        ((p.x / eps).floor() as i64, (p.y / eps).floor() as i64)
    }

    /// Indices within eps of point `i` (inclusive, `i` itself included), ascending.
    fn neighbours(&self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        let p = self.points[i];
        let (cx, cy) = Self::key(p, self.eps);
        let eps2 = self.eps * self.eps;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.cells.get(&(cx + dx, cy + dy)) {
                    out.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&j| self.points[j].dist_sq(p) <= eps2),
                    );
                }
            }
        }
        out.sort_unstable();
    }
}

pub fn dbscan(points: &[Vec2], params: &ClusterParams) -> Labeling {
    let n = points.len();
    let index = GridIndex::new(points, params.eps);
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut cluster_count = 0;
    let mut nb = Vec::new();
    let mut nb2 = Vec::new();

    for i in 0..n {
        if labels[i].is_some() {
            continue;
        }
        index.neighbours(i, &mut nb);
        if nb.len() < params.min_pts {
            labels[i] = Some(Label::Noise);
            continue;
        }
        let c = cluster_count;
        cluster_count += 1;
        labels[i] = Some(Label::Cluster(c));
        let mut queue: Vec<usize> = nb.iter().copied().filter(|&j| j != i).collect();
        let mut head = 0;
        while head < queue.len() {
            let j = queue[head];
            head += 1;
            match labels[j] {
                Some(Label::Cluster(_)) => continue,
                Some(Label::Noise) => {
                    // previously rejected as a seed, so a border point
                    labels[j] = Some(Label::Cluster(c));
                    continue;
                }
                None => {}
            }
            labels[j] = Some(Label::Cluster(c));
            index.neighbours(j, &mut nb2);
            if nb2.len() >= params.min_pts {
                queue.extend(nb2.iter().copied().filter(|&k| labels[k].is_none() || labels[k] == Some(Label::Noise)));
            }
        }
    }

    Labeling {
        labels: labels.into_iter().map(|l| l.unwrap_or(Label::Noise)).collect(),
        cluster_count,
    }
}

/// Mean of each cluster's points, by cluster id; noise is ignored.
pub fn cluster_centroids(points: &[Vec2], labeling: &Labeling) -> Vec<Vec2> {
    let mut sums = vec![(Vec2::new(0.0, 0.0), 0usize); labeling.cluster_count];
    for (p, l) in points.iter().zip(&labeling.labels) {
        if let Label::Cluster(c) = l {
            sums[*c].0 = sums[*c].0 + *p;
            sums[*c].1 += 1;
        }
    }
    sums.into_iter()
        .map(|(s, k)| s * (1.0 / k as f64))
        .collect()
}

/// Number of targets that own the majority of at least one cluster.
///
/// Each clustered point is attributed to the nearest target (by `owner`);
/// a target counts as recovered when some cluster's plurality owner is it.
pub fn recovered_targets<F>(points: &[Vec2], labeling: &Labeling, owner: F) -> usize
where
    F: Fn(Vec2) -> Option<usize>,
{
    let mut votes: Vec<HashMap<usize, usize>> = vec![HashMap::new(); labeling.cluster_count];
    for (p, l) in points.iter().zip(&labeling.labels) {
        if let (Label::Cluster(c), Some(t)) = (l, owner(*p)) {
            *votes[*c].entry(t).or_default() += 1;
        }
    }
    let mut owners: Vec<usize> = votes
        .iter()
        .filter_map(|v| {
            v.iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(t, _)| *t)
        })
        .collect();
    owners.sort_unstable();
    owners.dedup();
    owners.len()
}
