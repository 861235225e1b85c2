//! Monte Carlo experiment driver.

mod config;
mod export;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{
    BackendKind, Condition, Experiment, ExperimentConfig, MetricSection, RunSection,
    SceneSection, SensorSection, SlamSection, WaveformProfile, WaveformSection, SEED_ENV,
};
pub use export::{emit_csv, format_sig9, write_point_map, write_snapshots};

use crate::clustering::{dbscan, recovered_targets, Labeling};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::metrics::{et_gospa, GroundTruthSet};
use crate::par::{map_indexed, Execution};
use crate::slam::{run_slam, NoiseStreams, PointMap, Snapshot};

/// Clustered points farther than this from every target boundary are not
/// attributed to any target when counting recoveries, m.
pub const ATTRIBUTION_RADIUS: f64 = 1.0;

const STREAM_ODOMETRY: u64 = 0;
const STREAM_SENSOR: u64 = 1;
const STREAMS_PER_TRIAL: u64 = 2;

/// Independent stream `stream` of trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 * STREAMS_PER_TRIAL + stream);
    rng
}

/// Every `len / cap`-th index (fractional stride) when `len > cap`.
pub fn stride_indices(len: usize, cap: usize) -> Vec<usize> {
    if len <= cap {
        return (0..len).collect();
    }
    (0..cap).map(|i| i * len / cap).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub index: usize,
    pub snapshots: Vec<Snapshot>,
    pub et_gospa: Vec<f64>,
    pub mse: Vec<f64>,
    /// Map points scored at each snapshot after downsampling.
    pub scored_points: Vec<usize>,
    pub map: PointMap,
    pub labeling: Labeling,
    pub recovered_targets: usize,
}

impl TrialRecord {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn cluster_count(&self) -> usize {
        self.labeling.cluster_count
    }

    pub fn final_et_gospa(&self) -> f64 {
        self.et_gospa.last().copied().unwrap_or(f64::NAN)
    }

    pub fn downsampled(&self) -> bool {
        self.snapshots
            .iter()
            .zip(&self.scored_points)
            .any(|(s, n)| *n < s.map_len)
    }
}

pub fn run_trial(exp: &Experiment, trial_index: usize) -> Result<TrialRecord> {
    let seed = exp.run.seed;
    let mut streams = NoiseStreams {
        odometry: trial_rng(seed, trial_index, STREAM_ODOMETRY),
        sensor: trial_rng(seed, trial_index, STREAM_SENSOR),
    };
    let run = run_slam(
        &exp.scene,
        &exp.backend,
        &exp.slam,
        exp.run.duration,
        exp.run.snapshot_cadence,
        &mut streams,
    )?;
    let truth = GroundTruthSet::new(exp.scene.reference_sets())?;
    let mut et = Vec::with_capacity(run.snapshots.len());
    let mut mse = Vec::with_capacity(run.snapshots.len());
    let mut scored = Vec::with_capacity(run.snapshots.len());
    for snap in &run.snapshots {
        let points = run.map_at(snap);
        let sample: Vec<Vec2> = stride_indices(points.len(), exp.estimate_cap)
            .into_iter()
            .map(|i| points[i])
            .collect();
        et.push(et_gospa(&truth, &sample, &exp.metric)?.value);
        mse.push(snap.pose_truth.position.dist_sq(snap.pose_estimate.position));
        scored.push(sample.len());
    }
    let map = run.state.map;
    let labeling = dbscan(&map.points, &exp.cluster);
    let index_of = |id: u32| exp.scene.targets.iter().position(|t| t.id == id);
    let recovered = recovered_targets(&map.points, &labeling, |p| {
        exp.scene
            .nearest_target(p)
            .filter(|(_, d)| *d <= ATTRIBUTION_RADIUS)
            .and_then(|(id, _)| index_of(id))
    });
    Ok(TrialRecord {
        index: trial_index,
        snapshots: run.snapshots,
        et_gospa: et,
        mse,
        scored_points: scored,
        map,
        labeling,
        recovered_targets: recovered,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub times: Vec<f64>,
    pub et_gospa_mean: Vec<f64>,
    pub mse_mean: Vec<f64>,
    pub cluster_counts: Vec<usize>,
    pub recovered_targets: Vec<usize>,
    pub estimate_cap: usize,
    /// Trials in which at least one snapshot was downsampled.
    pub downsampled_trials: usize,
    pub trials: Vec<TrialRecord>,
}

impl Report {
    pub fn empty(name: impl Into<String>, estimate_cap: usize) -> Self {
        Self {
            name: name.into(),
            times: Vec::new(),
            et_gospa_mean: Vec::new(),
            mse_mean: Vec::new(),
            cluster_counts: Vec::new(),
            recovered_targets: Vec::new(),
            estimate_cap,
            downsampled_trials: 0,
            trials: Vec::new(),
        }
    }

    /// Per-trial final ET-GOPSA values in trial order.
    pub fn final_et_gospa(&self) -> Vec<f64> {
        self.trials.iter().map(TrialRecord::final_et_gospa).collect()
    }

    /// Mean of per-trial curves, folded in trial order.
    pub fn from_trials(name: impl Into<String>, estimate_cap: usize, trials: Vec<TrialRecord>) -> Self {
        let mut report = Self::empty(name, estimate_cap);
        let Some(first) = trials.first() else {
            return report;
        };
        let len = first.snapshots.len();
        report.times = first.times();
        let mut et = vec![0.0; len];
        let mut mse = vec![0.0; len];
        for t in &trials {
            for k in 0..len {
                et[k] += t.et_gospa[k];
                mse[k] += t.mse[k];
            }
        }
        let n = trials.len() as f64;
        report.et_gospa_mean = et.into_iter().map(|v| v / n).collect();
        report.mse_mean = mse.into_iter().map(|v| v / n).collect();
        report.cluster_counts = trials.iter().map(TrialRecord::cluster_count).collect();
        report.recovered_targets = trials.iter().map(|t| t.recovered_targets).collect();
        report.downsampled_trials = trials.iter().filter(|t| t.downsampled()).count();
        report.trials = trials;
        report
    }
}

pub fn run_monte_carlo(exp: &Experiment, name: &str, exec: Execution) -> Result<Report> {
    let results = map_indexed(exp.run.trials, exec, |i| run_trial(exp, i));
    let mut trials = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        trials.push(r.map_err(|e| Error::Trial { index, source: Box::new(e) })?);
    }
    Ok(Report::from_trials(name, exp.estimate_cap, trials))
}

/// One report per condition, all under the base seed so trials pair up.
pub fn sweep_conditions(
    base: &ExperimentConfig,
    conditions: &[Condition],
    exec: Execution,
) -> Result<Vec<Report>> {
    if conditions.is_empty() {
        return Err(Error::argument("sweep needs at least one condition"));
    }
    conditions
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let exp = base.with_condition(c).build()?;
            let name = if c.name.is_empty() { format!("condition_{i}") } else { c.name.clone() };
            run_monte_carlo(&exp, &name, exec)
        })
        .collect()
}
