use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec2};

/// Piecewise-linear AGV path traversed at constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Vec2>,
    /// m/s
    pub speed: f64,
    /// Seconds between SLAM steps.
    pub step_interval: f64,
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::validation("trajectory needs at least 2 waypoints"));
        }
        if self.waypoints.iter().any(|w| !w.is_finite()) {
            return Err(Error::validation("trajectory waypoints must be finite"));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::validation(format!(
                "trajectory speed must be > 0, got {}",
                self.speed
            )));
        }
        if !(self.step_interval > 0.0 && self.step_interval.is_finite()) {
            return Err(Error::validation(format!(
                "trajectory step_interval must be > 0, got {}",
                self.step_interval
            )));
        }
        if self.length() <= 0.0 {
            return Err(Error::validation("trajectory has zero length"));
        }
        Ok(())
    }

    /// First and last waypoints coincide.
    pub fn is_closed(&self) -> bool {
        match (self.waypoints.first(), self.waypoints.last()) {
            (Some(a), Some(b)) => self.waypoints.len() > 2 && a.dist(*b) < 1e-9,
            _ => false,
        }
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.waypoints.windows(2).map(|w| (w[0], w[1]))
    }

    /// Pose after travelling for `t` seconds.
    pub fn pose_at(&self, t: f64) -> Pose {
        trajectory_pose(self, t)
    }
}

/// Constant-speed interpolation along the waypoints; heading follows the
/// direction of travel. Closed loops wrap, open paths clamp at the end.
pub fn trajectory_pose(trajectory: &Trajectory, t: f64) -> Pose {
    let total = trajectory.length();
    let mut s = t.max(0.0) * trajectory.speed;
    if trajectory.is_closed() {
        s = s.rem_euclid(total);
    } else if s >= total {
        let (a, b) = trajectory
            .segments()
            .filter(|(a, b)| a.dist(*b) > 0.0)
            .last()
            .expect("validated trajectory has a non-degenerate segment");
        return Pose::new(b, (b - a).angle());
    }
    for (a, b) in trajectory.segments() {
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        if s < len {
            let dir = (b - a) * (1.0 / len);
            return Pose::new(a + dir * s, dir.angle());
        }
        s -= len;
    }
    // Only reachable through rounding at the very end of a closed loop.
    let (a, b) = trajectory
        .segments()
        .find(|(a, b)| a.dist(*b) > 0.0)
        .expect("validated trajectory has a non-degenerate segment");
    Pose::new(a, (b - a).angle())
}
