//! Sensing backend selection.

use rand::Rng;

use crate::error::Result;
use crate::geometry::Pose;
use crate::ofdm::OfdmSensor;
use crate::parametric::ParametricSensor;
use crate::scan::Scan;
use crate::scene::Scene;

#[derive(Debug, Clone)]
pub enum SensorBackend {
    Ofdm(Box<OfdmSensor>),
    Parametric(ParametricSensor),
}

impl SensorBackend {
    /// Sense from `pose` while moving at `forward_speed` along the heading.
    pub fn sense<R: Rng + ?Sized>(
        &self,
        scene: &Scene,
        pose: &Pose,
        forward_speed: f64,
        rng: &mut R,
    ) -> Result<Scan> {
        match self {
            SensorBackend::Ofdm(s) => s.sense(scene, pose, forward_speed, rng),
            SensorBackend::Parametric(s) => s.sense(scene, pose, rng),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SensorBackend::Ofdm(_) => "ofdm",
            SensorBackend::Parametric(_) => "parametric",
        }
    }
}
