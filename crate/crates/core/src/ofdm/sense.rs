use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rustfft::num_complex::Complex64;

use super::channel::{equalize, synthesize_echo, EchoPath, Noise};
use super::spectrum::{bin_to_angle, bin_to_range, detect_peaks, BinKind, PeakPolicy, ProfileSpectrum, Transforms};
use super::waveform::{generate_frame, WaveformConfig};
use crate::error::Result;
use crate::geometry::Pose;
use crate::scan::{Detection, Scan, SensorFan};
use crate::scene::{ground_truth_scan, Scene};

/// OFDM sensing chain bound to one waveform and ray fan.
#[derive(Debug, Clone)]
pub struct OfdmSensor {
    pub waveform: WaveformConfig,
    pub fan: SensorFan,
    pub range_peaks: PeakPolicy,
    pub angle_peaks: PeakPolicy,
    /// OFDM symbols synthesized per scan; range processing uses symbol 0.
    pub symbols_per_scan: usize,
    transforms: Transforms,
}

impl OfdmSensor {
    pub fn new(waveform: WaveformConfig, fan: SensorFan) -> Self {
        Self {
            transforms: Transforms::for_config(&waveform),
            waveform,
            fan,
            range_peaks: PeakPolicy {
                max_peaks: Some(256),
                ..PeakPolicy::default()
            },
            angle_peaks: PeakPolicy {
                max_peaks: Some(4),
                circular: true,
                ..PeakPolicy::default()
            },
            symbols_per_scan: 1,
        }
    }

    /// Array angle from the axis for a bearing relative to the heading;
    /// broadside points along the boresight.
    pub fn theta_for_bearing(&self, bearing: f64) -> f64 {
        FRAC_PI_2 - (bearing - self.fan.boresight)
    }

    fn bearing_for_theta(&self, theta: f64) -> f64 {
        self.fan.boresight + FRAC_PI_2 - theta
    }

    /// Echo paths for every ray hit within the unambiguous range.
    ///
    /// `forward_speed` is the platform speed along its heading; static
    /// targets then close at `speed · cos(bearing)`.
    pub fn echo_paths(&self, scene: &Scene, pose: &Pose, forward_speed: f64) -> Result<Vec<EchoPath>> {
        self.echo_paths_for(scene, pose, forward_speed, &self.fan.bearings())
    }

    /// As [`Self::echo_paths`] for an explicit ray set.
    pub fn echo_paths_for(
        &self,
        scene: &Scene,
        pose: &Pose,
        forward_speed: f64,
        bearings: &[f64],
    ) -> Result<Vec<EchoPath>> {
        let r_max = self.waveform.max_unambiguous_range();
        let hits = ground_truth_scan(scene, pose, bearings)?;
        Ok(hits
            .into_iter()
            .filter(|h| h.range < r_max)
            .map(|h| EchoPath {
                range: h.range,
                velocity: -forward_speed * h.bearing.cos(),
                amplitude: Complex64::new(1.0, 0.0),
                theta: self.theta_for_bearing(h.bearing),
            })
            .collect())
    }

    /// Sense the scene from `pose`, returning sensor-frame detections.
    pub fn sense<R: Rng + ?Sized>(
        &self,
        scene: &Scene,
        pose: &Pose,
        forward_speed: f64,
        rng: &mut R,
    ) -> Result<Scan> {
        let bearings = self.fan.sample_bearings(rng);
        let paths = self.echo_paths_for(scene, pose, forward_speed, &bearings)?;
        self.sense_paths(&paths, Noise::from_config(&self.waveform), rng)
    }

    /// Run the estimation chain on an explicit path set.
    pub fn sense_paths<R: Rng + ?Sized>(
        &self,
        paths: &[EchoPath],
        noise: Noise,
        rng: &mut R,
    ) -> Result<Scan> {
        if paths.is_empty() {
            return Ok(Scan::default());
        }
        let mut frame_cfg = self.waveform;
        frame_cfg.symbols = self.symbols_per_scan.max(1);
        let frame = generate_frame(&frame_cfg, rng);
        let received = synthesize_echo(&self.waveform, &frame, paths, noise, rng)?;

        let responses = received
            .iter()
            .map(|y| {
                let sg = equalize(y, &frame)?;
                self.transforms.range_response(sg.row(0))
            })
            .collect::<Result<Vec<_>>>()?;

        // Non-coherent integration across the array for range detection.
        let k = responses.len() as f64;
        let integrated = ProfileSpectrum {
            magnitudes: (0..self.waveform.subcarriers)
                .map(|i| (responses.iter().map(|r| r[i].norm_sqr()).sum::<f64>() / k).sqrt())
                .collect(),
            kind: BinKind::Range,
        };

        let mut detections = Vec::new();
        for range_bin in detect_peaks(&integrated, &self.range_peaks) {
            let snapshot: Vec<Complex64> = responses.iter().map(|r| r[range_bin]).collect();
            let spectrum = ProfileSpectrum {
                magnitudes: self
                    .transforms
                    .angle_response(&snapshot)?
                    .iter()
                    .map(|z| z.norm())
                    .collect(),
                kind: BinKind::Angle,
            };
            let range_interval = bin_to_range(range_bin, &self.waveform);
            for angle_bin in detect_peaks(&spectrum, &self.angle_peaks) {
                let Ok((theta_lo, theta_hi)) = bin_to_angle(angle_bin, &self.waveform) else {
                    continue;
                };
                let bearing_interval = (
                    self.bearing_for_theta(theta_hi),
                    self.bearing_for_theta(theta_lo),
                );
                let det = Detection::from_intervals(range_interval, bearing_interval);
                if self.fan.contains(det.bearing()) {
                    detections.push(det);
                }
            }
        }
        Ok(Scan::new(detections))
    }
}
