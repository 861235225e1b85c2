//! World model: extended targets, the AGV loop, and ray casting.

mod document;
mod shape;
mod trajectory;

use serde::{Deserialize, Serialize};

pub use document::{load_scene, load_scene_file, DEFAULT_SCENE_TOML};
pub use shape::{Aabb, ShapeSpec, BOUNDARY_TOL};
pub use trajectory::{trajectory_pose, Trajectory};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Pose, Vec2};

/// Default number of reference points per target.
pub const DEFAULT_REFERENCE_COUNT: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedTarget {
    pub id: u32,
    pub shape: ShapeSpec,
    /// Point-target set used as ground truth by the mapping metric.
    pub reference_points: Vec<Vec2>,
}

impl ExtendedTarget {
    /// Target with `k` conventionally placed reference points.
    pub fn new(id: u32, shape: ShapeSpec, k: usize) -> Result<Self> {
        shape.validate()?;
        Ok(Self {
            id,
            shape,
            reference_points: shape.reference_points(k)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        if self.reference_points.is_empty() {
            return Err(Error::validation(format!(
                "target {} has no reference points",
                self.id
            )));
        }
        for p in &self.reference_points {
            let sd = self.shape.signed_distance(*p);
            if !(sd.abs() < BOUNDARY_TOL) {
                return Err(Error::validation(format!(
                    "target {} reference point ({}, {}) is off the boundary by {sd}",
                    self.id, p.x, p.y
                )));
            }
        }
        Ok(())
    }
}

/// `k` boundary points for a shape; see [`ShapeSpec::reference_points`].
pub fn reference_points(shape: &ShapeSpec, k: usize) -> Result<Vec<Vec2>> {
    shape.reference_points(k)
}

/// First boundary crossing of a ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub point: Vec2,
    pub range: f64,
    pub target_id: u32,
    /// Bearing of the ray relative to the pose heading when produced by
    /// [`ground_truth_scan`]; world bearing when produced by [`raycast`].
    pub bearing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub bounds: Aabb,
    pub targets: Vec<ExtendedTarget>,
    pub trajectory: Trajectory,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        let b = &self.bounds;
        if !(b.min.is_finite() && b.max.is_finite() && b.min.x < b.max.x && b.min.y < b.max.y) {
            return Err(Error::validation("bounds must satisfy min < max"));
        }
        let mut ids = std::collections::BTreeSet::new();
        for t in &self.targets {
            t.validate()?;
            if !ids.insert(t.id) {
                return Err(Error::validation(format!("duplicate target id {}", t.id)));
            }
            if !b.contains_box(&t.shape.bounding_box()) {
                return Err(Error::validation(format!(
                    "target {} extends outside the scene bounds",
                    t.id
                )));
            }
        }
        self.trajectory.validate()?;
        for w in &self.trajectory.waypoints {
            if !b.contains(*w) {
                return Err(Error::validation(format!(
                    "trajectory waypoint ({}, {}) is outside the bounds",
                    w.x, w.y
                )));
            }
            if let Some(t) = self.targets.iter().find(|t| t.shape.contains_strict(*w)) {
                return Err(Error::validation(format!(
                    "trajectory waypoint ({}, {}) lies inside target {}",
                    w.x, w.y, t.id
                )));
            }
        }
        for (a, c) in self.trajectory.segments() {
            if let Some(t) = self
                .targets
                .iter()
                .find(|t| t.shape.segment_hits_interior(a, c))
            {
                return Err(Error::validation(format!(
                    "trajectory segment ({}, {})-({}, {}) crosses target {}",
                    a.x, a.y, c.x, c.y, t.id
                )));
            }
        }
        Ok(())
    }

    /// The metric ground truth: one reference-point set per target.
    pub fn reference_sets(&self) -> Vec<Vec<Vec2>> {
        self.targets
            .iter()
            .map(|t| t.reference_points.clone())
            .collect()
    }

    pub fn target(&self, id: u32) -> Option<&ExtendedTarget> {
        self.targets.iter().find(|t| t.id == id)
    }

    /// Target whose boundary is closest to `p`, with the absolute distance.
    pub fn nearest_target(&self, p: Vec2) -> Option<(u32, f64)> {
        self.targets
            .iter()
            .map(|t| (t.id, t.shape.signed_distance(p).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Nearest target boundary hit by the ray from `origin` at world bearing
/// `bearing`, limited to the scene bounds.
pub fn raycast(scene: &Scene, origin: Vec2, bearing: f64) -> Result<Option<Hit>> {
    if let Some(t) = scene.targets.iter().find(|t| t.shape.contains_strict(origin)) {
        return Err(Error::Geometry(format!(
            "ray origin ({}, {}) is inside target {}",
            origin.x, origin.y, t.id
        )));
    }
    let dir = Vec2::from_polar(1.0, bearing);
    let max_t = match scene.bounds.ray_interval(origin, dir) {
        Some((_, exit)) if exit >= 0.0 => exit,
        _ => return Ok(None),
    };
    let mut best: Option<(f64, u32)> = None;
    for t in &scene.targets {
        if let Some(d) = t.shape.ray_entry(origin, dir) {
            if d <= max_t && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, t.id));
            }
        }
    }
    Ok(best.map(|(range, target_id)| Hit {
        point: origin + dir * range,
        range,
        target_id,
        bearing,
    }))
}

/// Ray-cast every bearing (relative to the pose heading), dropping misses.
pub fn ground_truth_scan(scene: &Scene, pose: &Pose, bearings: &[f64]) -> Result<Vec<Hit>> {
    if bearings.is_empty() {
        return Err(Error::argument("ground_truth_scan needs at least one bearing"));
    }
    let mut hits = Vec::with_capacity(bearings.len());
    for &b in bearings {
        if let Some(mut hit) = raycast(scene, pose.position, normalize_angle(pose.heading + b))? {
            hit.bearing = b;
            hits.push(hit);
        }
    }
    Ok(hits)
}
