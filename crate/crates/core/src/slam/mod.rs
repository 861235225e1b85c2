//! Location and mapping: dead reckoning, correlative scan matching against a
//! log-odds occupancy grid, and an accumulated point map.

mod grid;
mod matcher;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use grid::{update_grid, LogOddsParams, OccupancyGrid, OutOfGrid};
pub use matcher::{match_scan, MatchResult, SearchWindow};
pub use crate::scan::scan_to_points;

use crate::backend::SensorBackend;
use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec2};
use crate::scan::Scan;
use crate::scene::{trajectory_pose, Aabb, Scene};

/// Per-step odometry noise (body frame).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OdometryModel {
    /// Std of each translation component per step, m.
    pub translation_noise_std: f64,
    /// Std of the heading increment per step, radians.
    pub rotation_noise_std: f64,
}

impl OdometryModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.translation_noise_std >= 0.0 && self.rotation_noise_std >= 0.0) {
            return Err(Error::validation("odometry noise stds must be >= 0"));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.translation_noise_std == 0.0 && self.rotation_noise_std == 0.0
    }

    /// `delta` corrupted by independent Gaussian noise; always consumes
    /// three normal draws.
    pub fn perturb<R: Rng + ?Sized>(&self, delta: &Pose, rng: &mut R) -> Pose {
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        let zt: f64 = rng.sample(StandardNormal);
        Pose::new(
            delta.position
                + Vec2::new(
                    self.translation_noise_std * zx,
                    self.translation_noise_std * zy,
                ),
            delta.heading + self.rotation_noise_std * zt,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlamConfig {
    pub grid_resolution: f64,
    /// Grid extends this far beyond the scene bounds, m.
    pub grid_margin: f64,
    pub log_odds: LogOddsParams,
    pub window: SearchWindow,
    pub matching: bool,
    /// Keep every K-th scan as a keyframe.
    pub keyframe_interval: usize,
    pub out_of_grid: OutOfGrid,
    /// Map points farther than this outside the bounds are discarded, m.
    pub map_margin: f64,
    pub odometry: OdometryModel,
}

impl Default for SlamConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 0.1,
            grid_margin: 2.0,
            log_odds: LogOddsParams::default(),
            window: SearchWindow::default(),
            matching: true,
            keyframe_interval: 5,
            out_of_grid: OutOfGrid::Clip,
            map_margin: 1.0,
            odometry: OdometryModel::default(),
        }
    }
}

impl SlamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_resolution > 0.0) {
            return Err(Error::validation("slam grid_resolution must be > 0"));
        }
        if self.keyframe_interval == 0 {
            return Err(Error::validation("slam keyframe_interval must be >= 1"));
        }
        self.odometry.validate()
    }

    /// The search window shrinks to the prior along any axis whose odometry
    /// noise is zero: an exact prior needs no correction there.
    pub fn effective_window(&self) -> SearchWindow {
        let mut w = self.window;
        if self.odometry.translation_noise_std == 0.0 {
            w.half_xy = 0.0;
        }
        if self.odometry.rotation_noise_std == 0.0 {
            w.half_theta = 0.0;
        }
        w
    }
}

/// Accumulated world-frame map points, append-only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointMap {
    pub points: Vec<Vec2>,
    pub timestamps: Vec<f64>,
}

impl PointMap {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn extend(&mut self, points: impl IntoIterator<Item = Vec2>, t: f64, keep: &Aabb) {
        for p in points {
            if keep.contains(p) {
                self.points.push(p);
                self.timestamps.push(t);
            }
        }
    }
}

/// Independent random streams for one SLAM run.
#[derive(Debug, Clone)]
pub struct NoiseStreams<R> {
    pub odometry: R,
    pub sensor: R,
}

#[derive(Debug, Clone)]
pub struct SlamState {
    pub pose_estimate: Pose,
    pub pose_truth: Pose,
    pub grid: OccupancyGrid,
    pub map: PointMap,
    pub keyframes: Vec<Scan>,
    pub time: f64,
    pub step: usize,
    pub last_match: Option<MatchResult>,
}

impl SlamState {
    /// Start of the trajectory, known exactly, with an empty map.
    pub fn new(scene: &Scene, cfg: &SlamConfig) -> Self {
        let start = trajectory_pose(&scene.trajectory, 0.0);
        Self {
            pose_estimate: start,
            pose_truth: start,
            grid: OccupancyGrid::covering(
                &scene.bounds.expanded(cfg.grid_margin),
                cfg.grid_resolution,
                cfg.log_odds,
            ),
            map: PointMap::default(),
            keyframes: Vec::new(),
            time: 0.0,
            step: 0,
            last_match: None,
        }
    }

    pub fn position_error_sq(&self) -> f64 {
        self.pose_estimate.position.dist_sq(self.pose_truth.position)
    }
}

/// Advance one step: move, dead-reckon, sense, match, map.
pub fn slam_step<R: Rng>(
    state: &mut SlamState,
    scene: &Scene,
    backend: &SensorBackend,
    cfg: &SlamConfig,
    streams: &mut NoiseStreams<R>,
) -> Result<()> {
    let dt = scene.trajectory.step_interval;
    let time = (state.step + 1) as f64 * dt;
    let truth = trajectory_pose(&scene.trajectory, time);
    let delta = state.pose_truth.between(&truth);
    let measured = cfg.odometry.perturb(&delta, &mut streams.odometry);
    let mut estimate = state.pose_estimate.compose(&measured);

    let scan = backend.sense(scene, &truth, scene.trajectory.speed, &mut streams.sensor)?;

    state.last_match = None;
    if cfg.matching {
        let m = match_scan(&scan, &state.grid, &estimate, &cfg.effective_window());
        estimate = m.pose;
        state.last_match = Some(m);
    }

    let keep = scene.bounds.expanded(cfg.map_margin);
    state
        .map
        .extend(scan_to_points(&scan, &estimate), time, &keep);
    update_grid(&mut state.grid, &estimate, &scan, cfg.out_of_grid);

    state.pose_truth = truth;
    state.pose_estimate = estimate;
    state.time = time;
    state.step += 1;
    if state.step % cfg.keyframe_interval == 0 {
        state.keyframes.push(scan);
    }
    Ok(())
}

/// Poses and map size at one snapshot; the map itself is the prefix
/// `map.points[..map_len]` of the run's final map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub pose_truth: Pose,
    pub pose_estimate: Pose,
    pub map_len: usize,
}

#[derive(Debug, Clone)]
pub struct SlamRun {
    pub snapshots: Vec<Snapshot>,
    pub state: SlamState,
}

impl SlamRun {
    pub fn map_at(&self, snapshot: &Snapshot) -> &[Vec2] {
        &self.state.map.points[..snapshot.map_len]
    }
}

/// Number of steps covering `duration`.
pub fn step_count(duration: f64, step_interval: f64) -> usize {
    ((duration / step_interval).round() as usize).max(1)
}

/// Run `slam_step` for `duration` seconds, snapshotting every `cadence`
/// seconds and at the final step.
pub fn run_slam<R: Rng>(
    scene: &Scene,
    backend: &SensorBackend,
    cfg: &SlamConfig,
    duration: f64,
    cadence: f64,
    streams: &mut NoiseStreams<R>,
) -> Result<SlamRun> {
    if !(duration > 0.0) {
        return Err(Error::argument(format!("duration must be > 0, got {duration}")));
    }
    cfg.validate()?;
    let dt = scene.trajectory.step_interval;
    let steps = step_count(duration, dt);
    let every = step_count(cadence.max(dt), dt);
    let mut state = SlamState::new(scene, cfg);
    let mut snapshots = Vec::new();
    for k in 1..=steps {
        slam_step(&mut state, scene, backend, cfg, streams)?;
        if k % every == 0 || k == steps {
            snapshots.push(Snapshot {
                time: state.time,
                pose_truth: state.pose_truth,
                pose_estimate: state.pose_estimate,
                map_len: state.map.len(),
            });
        }
    }
    Ok(SlamRun { snapshots, state })
}
