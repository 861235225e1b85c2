use std::fs;

use isac_slam::harness::{
    emit_csv, run_monte_carlo, run_trial, stride_indices, sweep_conditions, trial_rng, Condition, ExperimentConfig,
    Report, SEED_ENV,
};
use isac_slam::metrics::{et_gospa, GroundTruthSet};
use isac_slam::par::{with_threads, Execution};
use isac_slam::slam::{run_slam, NoiseStreams};
use isac_slam::Vec2;

const NOISY: &str = r#"
[sensor]
delta_r_m = 0.1
delta_theta_deg = 1.0

[slam]
translation_noise_std = 0.02
rotation_noise_std_deg = 0.1

[metric]
estimate_cap = 300

[run]
trials = 4
duration = 10.0
seed = 11
snapshot_cadence = 2.0
"#;

fn noisy() -> ExperimentConfig {
    ExperimentConfig::from_toml(NOISY).unwrap()
}

#[test]
fn same_seed_and_index_give_identical_records() {
    let exp = noisy().build().unwrap();
    assert_eq!(run_trial(&exp, 2).unwrap(), run_trial(&exp, 2).unwrap());
    let a = run_trial(&exp, 0).unwrap();
    let b = run_trial(&exp, 1).unwrap();
    assert_ne!(a.mse, b.mse);
    assert_ne!(a.map, b.map);
}

#[test]
fn noiseless_run_has_zero_error_and_shrinking_pair_costs() {
    let cfg = ExperimentConfig::from_toml(
        "[sensor]\ndelta_theta_deg = 0.0\njitter = false\n[metric]\nestimate_cap = 100000\n[run]\ntrials = 1\nduration = 30.0",
    )
    .unwrap();
    let exp = cfg.build().unwrap();
    let record = run_trial(&exp, 0).unwrap();
    assert!(record.mse.iter().all(|&m| m == 0.0));

    // Nested estimate sets: the matched part of the metric cannot grow.
    // The cardinality term grows with the map, so the value itself does.
    let run = run_slam(
        &exp.scene,
        &exp.backend,
        &exp.slam,
        exp.run.duration,
        exp.run.snapshot_cadence,
        &mut NoiseStreams { odometry: trial_rng(1, 0, 0), sensor: trial_rng(1, 0, 1) },
    )
    .unwrap();
    let truth = GroundTruthSet::new(exp.scene.reference_sets()).unwrap();
    let total_refs: usize = exp.scene.reference_sets().iter().map(Vec::len).sum();
    let mut last = f64::INFINITY;
    for (snap, value) in run.snapshots.iter().zip(&record.et_gospa) {
        let r = et_gospa(&truth, run.map_at(snap), &exp.metric).unwrap();
        assert_eq!(r.value, *value);
        assert!(r.sum_pair_costs <= last);
        last = r.sum_pair_costs;
        let extra = snap.map_len.saturating_sub(total_refs) as f64;
        assert!((r.cardinality_term - extra * exp.metric.c / exp.metric.alpha).abs() < 1e-9);
    }
}

#[test]
fn single_trial_report_is_the_trial() {
    let mut cfg = noisy();
    cfg.run.trials = 1;
    let exp = cfg.build().unwrap();
    let record = run_trial(&exp, 0).unwrap();
    let report = run_monte_carlo(&exp, "one", Execution::Sequential).unwrap();
    assert_eq!(report.et_gospa_mean, record.et_gospa);
    assert_eq!(report.mse_mean, record.mse);
    assert_eq!(report.times, record.times());
    assert_eq!(report.cluster_counts, vec![record.cluster_count()]);
}

#[test]
fn report_is_independent_of_worker_count() {
    let exp = noisy().build().unwrap();
    let seq = run_monte_carlo(&exp, "x", Execution::Sequential).unwrap();
    for threads in [1, 2, 3] {
        let par = with_threads(Some(threads), || run_monte_carlo(&exp, "x", Execution::Parallel).unwrap());
        assert_eq!(par, seq, "{threads} threads");
    }
    assert_eq!(run_monte_carlo(&exp, "x", Execution::Sequential).unwrap(), seq);
}

#[test]
fn aggregation_matches_offline_recomputation() {
    let exp = noisy().build().unwrap();
    let report = run_monte_carlo(&exp, "audit", Execution::Parallel).unwrap();
    assert_eq!(report.et_gospa_mean.len(), report.times.len());
    assert_eq!(report.mse_mean.len(), report.times.len());
    let truth = GroundTruthSet::new(exp.scene.reference_sets()).unwrap();
    let n = report.trials.len() as f64;
    for k in 0..report.times.len() {
        let mut et = 0.0;
        let mut mse = 0.0;
        for t in &report.trials {
            let snap = &t.snapshots[k];
            let prefix = &t.map.points[..snap.map_len];
            let sample: Vec<Vec2> = stride_indices(prefix.len(), exp.estimate_cap).into_iter().map(|i| prefix[i]).collect();
            let v = et_gospa(&truth, &sample, &exp.metric).unwrap().value;
            assert_eq!(v, t.et_gospa[k]);
            et += v;
            mse += snap.pose_truth.position.dist_sq(snap.pose_estimate.position);
        }
        assert!((et / n - report.et_gospa_mean[k]).abs() <= 1e-12 * et.abs().max(1.0));
        assert!((mse / n - report.mse_mean[k]).abs() <= 1e-15 + 1e-12 * mse);
    }
    let downsampled = report.trials.iter().filter(|t| t.snapshots.iter().any(|s| s.map_len > exp.estimate_cap)).count();
    assert_eq!(report.downsampled_trials, downsampled);
}

#[test]
fn constant_curves_average_to_the_constant() {
    let exp = noisy().build().unwrap();
    let mut trials: Vec<_> = (0..3).map(|i| run_trial(&exp, i).unwrap()).collect();
    for t in &mut trials {
        t.et_gospa.iter_mut().for_each(|v| *v = 0.7);
        t.mse.iter_mut().for_each(|v| *v = 0.1);
    }
    let r = Report::from_trials("c", 300, trials);
    assert!(r.et_gospa_mean.iter().all(|&v| (v - 0.7).abs() < 1e-15));
    assert!(r.mse_mean.iter().all(|&v| (v - 0.1).abs() < 1e-15));
}

#[test]
fn sweep_yields_one_report_per_condition() {
    let mut cfg = noisy();
    cfg.run.trials = 2;
    cfg.run.duration = 4.0;
    let grid = [(0.0, 1.0), (0.1, 1.0), (0.0, 5.0), (0.1, 5.0)];
    let mut conds: Vec<Condition> = grid
        .iter()
        .map(|&(r, t)| Condition { name: format!("r{r}_t{t}"), delta_r_m: Some(r), delta_theta_deg: Some(t), ..Condition::default() })
        .collect();
    let reports = sweep_conditions(&cfg, &conds, Execution::Parallel).unwrap();
    assert_eq!(reports.len(), 4);
    assert_eq!(reports[3].name, "r0.1_t5");

    conds.push(Condition {
        name: "ofdm".into(),
        backend: Some(isac_slam::harness::BackendKind::Ofdm),
        snr_db: Some(10.0),
        ..Condition::default()
    });
    let reports = sweep_conditions(&cfg, &conds[4..], Execution::Parallel).unwrap();
    assert_eq!(reports.len(), 1);
    let first = sweep_conditions(&cfg, &conds[..1], Execution::Parallel).unwrap();
    assert_eq!(reports[0].times, first[0].times);

    assert!(sweep_conditions(&cfg, &[], Execution::Parallel).is_err());
}

#[test]
fn csv_examples() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    emit_csv(&Report::empty("e", 10), &empty).unwrap();
    assert_eq!(fs::read_to_string(empty.join("metric_curve.csv")).unwrap(), "# metric_curve v1\nt,et_gospa_mean\n");
    assert_eq!(fs::read_to_string(empty.join("agv_mse.csv")).unwrap(), "# agv_mse v1\nt,mse_mean\n");

    let mut two = Report::empty("two", 10);
    two.times = vec![0.0, 5.0];
    two.et_gospa_mean = vec![1.0 / 3.0, 2.5];
    two.mse_mean = vec![0.0, 1e-10];
    let out = dir.path().join("two");
    emit_csv(&two, &out).unwrap();
    assert_eq!(
        fs::read_to_string(out.join("metric_curve.csv")).unwrap(),
        "# metric_curve v1\nt,et_gospa_mean\n0,0.333333333\n5,2.5\n"
    );
    assert_eq!(fs::read_to_string(out.join("agv_mse.csv")).unwrap().lines().count(), 4);

    let report = run_monte_carlo(&noisy().build().unwrap(), "r", Execution::Parallel).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let files = emit_csv(&report, &a).unwrap();
    emit_csv(&report, &b).unwrap();
    assert_eq!(files.len(), 2 + 3 * report.trials.len());
    for f in &files {
        let name = f.file_name().unwrap();
        assert_eq!(fs::read(f).unwrap(), fs::read(b.join(name)).unwrap());
    }
    let clusters = fs::read_to_string(a.join("clusters_0.csv")).unwrap();
    assert!(clusters.starts_with("# clusters v1\nx,y,label\n"));
    assert_eq!(clusters.lines().count(), 2 + report.trials[0].map.len());
}

#[test]
fn seed_comes_from_the_environment_when_set() {
    let mut cfg = noisy();
    std::env::set_var(SEED_ENV, "77");
    cfg.apply_env().unwrap();
    assert_eq!(cfg.run.seed, 77);
    std::env::set_var(SEED_ENV, "not a number");
    assert!(cfg.apply_env().is_err());
    std::env::remove_var(SEED_ENV);
    let mut cfg = noisy();
    cfg.apply_env().unwrap();
    assert_eq!(cfg.run.seed, 11);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = noisy();
    cfg.run.trials = 0;
    assert!(cfg.build().is_err());
    let mut cfg = noisy();
    cfg.run.duration = 0.0;
    assert!(cfg.build().is_err());
    let err = ExperimentConfig::from_toml("[run]\ntrials = \"many\"").unwrap_err();
    assert!(err.to_string().contains("run.trials"), "{err}");
    assert!(ExperimentConfig::from_toml("[run]\nbogus = 1").is_err());
}
