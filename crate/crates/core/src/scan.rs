//! Polar detections shared by both sensing backends.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Vec2};

/// One sensed reflection, in the sensor (body) frame.
///
/// Intervals are `[lo, hi]` with `lo <= hi`; the OFDM backend reports
/// bin-width intervals, the parametric backend zero-width ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub range_interval: (f64, f64),
    /// Bearing relative to the platform heading, radians.
    pub bearing_interval: (f64, f64),
    /// Sensor-frame position at the interval midpoints.
    pub point: Vec2,
}

impl Detection {
    pub fn from_intervals(range: (f64, f64), bearing: (f64, f64)) -> Self {
        let r = 0.5 * (range.0 + range.1);
        let b = 0.5 * (bearing.0 + bearing.1);
        Self {
            range_interval: range,
            bearing_interval: bearing,
            point: Vec2::from_polar(r, b),
        }
    }

    pub fn range(&self) -> f64 {
        0.5 * (self.range_interval.0 + self.range_interval.1)
    }

    pub fn bearing(&self) -> f64 {
        0.5 * (self.bearing_interval.0 + self.bearing_interval.1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub detections: Vec<Detection>,
}

impl Scan {
    pub fn new(detections: Vec<Detection>) -> Self {
        Self { detections }
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.detections.iter().map(|d| d.point)
    }
}

/// Sensor-frame detections mapped into the world by `pose`.
pub fn scan_to_points(scan: &Scan, pose: &Pose) -> Vec<Vec2> {
    scan.points().map(|p| pose.transform_point(p)).collect()
}

/// Bearings swept by the sensor, relative to the platform heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorFan {
    /// Full field of view, radians, centred on `boresight`.
    pub fov: f64,
    /// Angular spacing of the ray fan, radians.
    pub step: f64,
    pub boresight: f64,
    /// Offset the whole fan by a uniform draw in `[-step/2, step/2)` each
    /// scan, so successive scans sample surfaces at different points.
    #[serde(default)]
    pub jitter: bool,
}

impl SensorFan {
    pub fn bearings(&self) -> Vec<f64> {
        let half = self.fov / 2.0;
        let n = (self.fov / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.boresight - half + i as f64 * self.step)
            .collect()
    }

    /// Bearings for one scan; jittered fans consume one uniform draw and
    /// drop rays pushed outside the field of view.
    pub fn sample_bearings<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        if !self.jitter {
            return self.bearings();
        }
        let offset = (rng.gen::<f64>() - 0.5) * self.step;
        self.bearings()
            .into_iter()
            .map(|b| b + offset)
            .filter(|b| self.contains(*b))
            .collect()
    }

    pub fn contains(&self, bearing: f64) -> bool {
        let off = crate::geometry::normalize_angle(bearing - self.boresight);
        off.abs() <= self.fov / 2.0 + 1e-12
    }
}

impl Default for SensorFan {
    fn default() -> Self {
        Self {
            fov: 120f64.to_radians(),
            step: 1f64.to_radians(),
            boresight: 0.0,
            jitter: true,
        }
    }
}
