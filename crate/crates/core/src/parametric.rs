//! Error-injection sensing: ground-truth hits perturbed by Gaussian range
//! and bearing noise.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pose;
use crate::scan::{Detection, Scan, SensorFan};
use crate::scene::{ground_truth_scan, Scene};

/// Standard deviations of the injected errors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Range error std, m.
    pub delta_r: f64,
    /// Bearing error std, radians.
    pub delta_theta: f64,
}

impl ErrorModel {
    pub fn new(delta_r: f64, delta_theta: f64) -> Result<Self> {
        let model = Self {
            delta_r,
            delta_theta,
        };
        model.validate()?;
        Ok(model)
    }

    /// Range std in meters, bearing std in degrees.
    pub fn from_degrees(delta_r_m: f64, delta_theta_deg: f64) -> Result<Self> {
        Self::new(delta_r_m, delta_theta_deg.to_radians())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_r >= 0.0 && self.delta_r.is_finite()) {
            return Err(Error::validation(format!("delta_r must be >= 0, got {}", self.delta_r)));
        }
        if !(self.delta_theta >= 0.0 && self.delta_theta.is_finite()) {
            return Err(Error::validation(format!(
                "delta_theta must be >= 0, got {}",
                self.delta_theta
            )));
        }
        Ok(())
    }
}

/// One detection per ground-truth hit with zero-width intervals centred on
/// the perturbed range and bearing. Two normal draws are consumed per hit
/// regardless of the model, so equal seeds pair up across conditions.
pub fn sense_parametric<R: Rng + ?Sized>(
    scene: &Scene,
    pose: &Pose,
    bearings: &[f64],
    model: &ErrorModel,
    rng: &mut R,
) -> Result<Scan> {
    let hits = ground_truth_scan(scene, pose, bearings)?;
    let detections = hits
        .iter()
        .map(|h| {
            let zr: f64 = rng.sample(StandardNormal);
            let zb: f64 = rng.sample(StandardNormal);
            let r = h.range + model.delta_r * zr;
            let b = h.bearing + model.delta_theta * zb;
            Detection::from_intervals((r, r), (b, b))
        })
        .collect();
    Ok(Scan::new(detections))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricSensor {
    pub model: ErrorModel,
    pub fan: SensorFan,
}

impl ParametricSensor {
    pub fn sense<R: Rng + ?Sized>(&self, scene: &Scene, pose: &Pose, rng: &mut R) -> Result<Scan> {
        let bearings = self.fan.sample_bearings(rng);
        sense_parametric(scene, pose, &bearings, &self.model, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_std_is_rejected() {
        assert!(ErrorModel::new(-0.1, 0.0).is_err());
        assert!(ErrorModel::from_degrees(0.1, -1.0).is_err());
        let m = ErrorModel::from_degrees(0.1, 5.0).unwrap();
        assert!((m.delta_theta - 5f64.to_radians()).abs() < 1e-15);
    }
}
