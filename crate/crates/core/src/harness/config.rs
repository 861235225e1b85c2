//! TOML experiment configuration.
//!
//! Every section and key is optional; omitted values take the defaults
//! below. `[[conditions]]` entries are used by sweeps and override the
//! sensor/waveform/metric settings of the base configuration.
//!
//! ```toml
//! [scene]
//! path = "scene.toml"          # relative to the config file; built-in layout if absent
//!
//! [sensor]
//! backend = "parametric"       # or "ofdm"; `sensor` is accepted as an alias
//! delta_r_m = 0.0              # range error std
//! delta_theta_deg = 1.0
//! fov_deg = 120.0
//! step_deg = 1.0
//!
//! [waveform]
//! profile = "desk"             # or "full"; keys below override it
//! snr_db = 10.0
//! Nt = 32
//! Nr = 32
//!
//! [slam]
//! translation_noise_std = 0.0  # m per step
//! rotation_noise_std_deg = 0.0 # per step
//!
//! [cluster]
//! eps = 0.5
//! min_pts = 3
//!
//! [metric]
//! c = 5.0
//! p = 1.0
//! alpha = 2.0
//! estimate_cap = 2000
//!
//! [run]
//! trials = 20
//! duration = 60.0
//! seed = 1
//! snapshot_cadence = 5.0
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::backend::SensorBackend;
use crate::clustering::ClusterParams;
use crate::error::{Error, Result};
use crate::metrics::MetricParams;
use crate::ofdm::{OfdmSensor, WaveformConfig};
use crate::parametric::{ErrorModel, ParametricSensor};
use crate::scan::SensorFan;
use crate::scene::{load_scene, load_scene_file, Scene, DEFAULT_SCENE_TOML};
use crate::slam::{LogOddsParams, OdometryModel, OutOfGrid, SearchWindow, SlamConfig};

/// Environment variable that overrides `run.seed`.
pub const SEED_ENV: &str = "ISAC_SLAM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Parametric,
    Ofdm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformProfile {
    #[default]
    Desk,
    Full,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSection {
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSection {
    #[serde(alias = "sensor")]
    pub backend: BackendKind,
    #[serde(alias = "delta_r")]
    pub delta_r_m: f64,
    pub delta_theta_deg: f64,
    pub fov_deg: f64,
    pub step_deg: f64,
    pub jitter: bool,
}

impl Default for SensorSection {
    fn default() -> Self {
        Self {
            backend: BackendKind::Parametric,
            delta_r_m: 0.0,
            delta_theta_deg: 1.0,
            fov_deg: 120.0,
            step_deg: 1.0,
            jitter: true,
        }
    }
}

/// Waveform keys follow the numerology table: `fc`, `delta_f`, `M`, `N`,
/// `Tp`, `Tc`, `T`, `B`, `Nt`, `Nr`, `snr_db`, `d_over_lambda`. Each one
/// overrides the chosen profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformSection {
    pub profile: WaveformProfile,
    pub fc: Option<f64>,
    pub delta_f: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "Tp")]
    pub tp: Option<f64>,
    #[serde(rename = "Tc")]
    pub tc: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    /// Checked against `N · delta_f` to within 1%.
    #[serde(rename = "B")]
    pub b: Option<f64>,
    #[serde(rename = "Nt")]
    pub nt: Option<usize>,
    #[serde(rename = "Nr")]
    pub nr: Option<usize>,
    pub snr_db: Option<f64>,
    pub d_over_lambda: Option<f64>,
}

impl WaveformSection {
    pub fn build(&self) -> Result<WaveformConfig> {
        let mut w = match self.profile {
            WaveformProfile::Desk => WaveformConfig::desk_scale(),
            WaveformProfile::Full => WaveformConfig::full_scale(),
        };
        let d_over_lambda = self.d_over_lambda.unwrap_or(w.element_spacing / w.wavelength());
        let guard_ratio = w.guard_time / w.symbol_time;
        if let Some(fc) = self.fc {
            w.carrier_hz = fc;
        }
        w.element_spacing = d_over_lambda * w.wavelength();
        if let Some(df) = self.delta_f {
            w.subcarrier_spacing_hz = df;
        }
        if let Some(m) = self.m {
            w.symbols = m;
        }
        if let Some(n) = self.n {
            w.subcarriers = n;
        }
        w.symbol_time = self.tp.unwrap_or(1.0 / w.subcarrier_spacing_hz);
        w.guard_time = match (self.tc, self.t) {
            (Some(tc), _) => tc,
            (None, Some(t)) => t - w.symbol_time,
            (None, None) => guard_ratio * w.symbol_time,
        };
        w.total_symbol_time = self.t.unwrap_or(w.symbol_time + w.guard_time);
        if let Some(nt) = self.nt {
            w.tx_antennas = nt;
        }
        if let Some(nr) = self.nr {
            w.rx_antennas = nr;
        }
        if let Some(snr) = self.snr_db {
            w.snr_db = snr;
        }
        if let Some(b) = self.b {
            let nominal = w.bandwidth();
            if (b - nominal).abs() > 0.01 * nominal {
                return Err(Error::validation(format!(
                    "waveform B = {b} Hz differs from N * delta_f = {nominal} Hz by more than 1%"
                )));
            }
        }
        w.validate()?;
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlamSection {
    pub grid_resolution: f64,
    pub grid_margin: f64,
    pub map_margin: f64,
    pub matching: bool,
    pub keyframe_interval: usize,
    pub out_of_grid: OutOfGrid,
    pub l_free: f64,
    pub l_occ: f64,
    pub window_half_xy: f64,
    pub window_step_xy: f64,
    pub window_half_theta_deg: f64,
    pub window_step_theta_deg: f64,
    pub match_blur_cells: usize,
    pub match_prior_weight: f64,
    pub translation_noise_std: f64,
    pub rotation_noise_std_deg: f64,
}

impl Default for SlamSection {
    fn default() -> Self {
        let s = SlamConfig::default();
        Self {
            grid_resolution: s.grid_resolution,
            grid_margin: s.grid_margin,
            map_margin: s.map_margin,
            matching: s.matching,
            keyframe_interval: s.keyframe_interval,
            out_of_grid: s.out_of_grid,
            l_free: s.log_odds.l_free,
            l_occ: s.log_odds.l_occ,
            window_half_xy: s.window.half_xy,
            window_step_xy: s.window.step_xy,
            window_half_theta_deg: s.window.half_theta.to_degrees(),
            window_step_theta_deg: s.window.step_theta.to_degrees(),
            match_blur_cells: s.window.blur_cells,
            match_prior_weight: s.window.prior_weight,
            translation_noise_std: 0.0,
            rotation_noise_std_deg: 0.0,
        }
    }
}

impl SlamSection {
    pub fn build(&self) -> Result<SlamConfig> {
        let cfg = SlamConfig {
            grid_resolution: self.grid_resolution,
            grid_margin: self.grid_margin,
            log_odds: LogOddsParams {
                l_free: self.l_free,
                l_occ: self.l_occ,
                ..LogOddsParams::default()
            },
            window: SearchWindow {
                half_xy: self.window_half_xy,
                step_xy: self.window_step_xy,
                half_theta: self.window_half_theta_deg.to_radians(),
                step_theta: self.window_step_theta_deg.to_radians(),
                blur_cells: self.match_blur_cells,
                prior_weight: self.match_prior_weight,
            },
            matching: self.matching,
            keyframe_interval: self.keyframe_interval,
            out_of_grid: self.out_of_grid,
            map_margin: self.map_margin,
            odometry: OdometryModel {
                translation_noise_std: self.translation_noise_std,
                rotation_noise_std: self.rotation_noise_std_deg.to_radians(),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricSection {
    pub c: f64,
    pub p: f64,
    pub alpha: f64,
    /// Map snapshots larger than this are stride-downsampled before scoring.
    pub estimate_cap: usize,
}

impl Default for MetricSection {
    fn default() -> Self {
        let m = MetricParams::default();
        Self { c: m.c, p: m.p, alpha: m.alpha, estimate_cap: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub trials: usize,
    /// Simulated seconds.
    pub duration: f64,
    pub seed: u64,
    /// Seconds between metric snapshots.
    pub snapshot_cadence: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { trials: 20, duration: 60.0, seed: 1, snapshot_cadence: 5.0 }
    }
}

/// Per-condition overrides for a sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Condition {
    pub name: String,
    #[serde(alias = "sensor")]
    pub backend: Option<BackendKind>,
    #[serde(alias = "delta_r")]
    pub delta_r_m: Option<f64>,
    pub delta_theta_deg: Option<f64>,
    pub snr_db: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scene: SceneSection,
    pub sensor: SensorSection,
    pub waveform: WaveformSection,
    pub slam: SlamSection,
    pub cluster: ClusterParams,
    pub metric: MetricSection,
    pub run: RunSection,
    pub conditions: Vec<Condition>,
    /// Directory against which `scene.path` is resolved.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(document: &str) -> Result<Self> {
        let de = toml::Deserializer::new(document);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            field: e.path().to_string(),
            message: e.inner().message().to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Apply the seed environment override, if set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.run.seed = v.trim().parse().map_err(|_| Error::Parse {
                field: SEED_ENV.into(),
                message: format!("not an unsigned integer: {v:?}"),
            })?;
        }
        Ok(())
    }

    pub fn with_condition(&self, cond: &Condition) -> Self {
        let mut cfg = self.clone();
        if let Some(b) = cond.backend {
            cfg.sensor.backend = b;
        }
        if let Some(r) = cond.delta_r_m {
            cfg.sensor.delta_r_m = r;
        }
        if let Some(t) = cond.delta_theta_deg {
            cfg.sensor.delta_theta_deg = t;
        }
        if let Some(s) = cond.snr_db {
            cfg.waveform.snr_db = Some(s);
        }
        if let Some(c) = cond.c {
            cfg.metric.c = c;
        }
        cfg.conditions.clear();
        cfg
    }

    pub fn load_scene(&self) -> Result<Scene> {
        match &self.scene.path {
            None => load_scene(DEFAULT_SCENE_TOML),
            Some(p) => {
                let full = match &self.base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.clone(),
                };
                load_scene_file(&full)
            }
        }
    }

    /// Validate and resolve into a runnable experiment.
    pub fn build(&self) -> Result<Experiment> {
        if self.run.trials == 0 {
            return Err(Error::validation("run.trials must be >= 1"));
        }
        if !(self.run.duration > 0.0) {
            return Err(Error::validation("run.duration must be > 0"));
        }
        if !(self.run.snapshot_cadence > 0.0) {
            return Err(Error::validation("run.snapshot_cadence must be > 0"));
        }
        if self.metric.estimate_cap == 0 {
            return Err(Error::validation("metric.estimate_cap must be >= 1"));
        }
        if !(self.sensor.fov_deg > 0.0 && self.sensor.step_deg > 0.0) {
            return Err(Error::validation("sensor fov_deg and step_deg must be > 0"));
        }
        let fan = SensorFan {
            fov: self.sensor.fov_deg.to_radians(),
            step: self.sensor.step_deg.to_radians(),
            boresight: 0.0,
            jitter: self.sensor.jitter,
        };
        let backend = match self.sensor.backend {
            BackendKind::Parametric => SensorBackend::Parametric(ParametricSensor {
                model: ErrorModel::from_degrees(self.sensor.delta_r_m, self.sensor.delta_theta_deg)?,
                fan,
            }),
            BackendKind::Ofdm => {
                SensorBackend::Ofdm(Box::new(OfdmSensor::new(self.waveform.build()?, fan)))
            }
        };
        let metric = MetricParams::new(self.metric.c, self.metric.p, self.metric.alpha)?;
        self.cluster.validate()?;
        Ok(Experiment {
            scene: self.load_scene()?,
            backend,
            slam: self.slam.build()?,
            cluster: self.cluster,
            metric,
            estimate_cap: self.metric.estimate_cap,
            run: self.run.clone(),
        })
    }
}

/// A validated configuration with its scene loaded and sensor constructed.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub scene: Scene,
    pub backend: SensorBackend,
    pub slam: SlamConfig,
    pub cluster: ClusterParams,
    pub metric: MetricParams,
    pub estimate_cap: usize,
    pub run: RunSection,
}
