//! `isac-slam` command-line driver.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use isac_slam::clustering::{cluster_centroids, dbscan, ClusterParams, Label};
use isac_slam::harness::{
    emit_csv, format_sig9, run_monte_carlo, sweep_conditions, ExperimentConfig, Report,
};
use isac_slam::metrics::{et_gospa, gospa_baseline, GroundTruthSet, MetricParams};
use isac_slam::par::{with_threads, Execution};
use isac_slam::scene::{load_scene, load_scene_file, DEFAULT_SCENE_TOML};
use isac_slam::Vec2;

#[derive(Debug, Parser)]
#[command(name = "isac-slam", version, about = "OFDM-sensing SLAM simulator and ET-GOPSA metric")]
struct Cli {
    /// Experiment configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `run.seed` (and the ISAC_SLAM_SEED variable).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `run.trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads; 1 runs trials sequentially.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment of the configuration.
    Simulate,
    /// Run every `[[conditions]]` entry under a shared seed.
    Sweep,
    /// Evaluate a mapping metric on CSV inputs.
    #[command(subcommand)]
    Metric(MetricCommand),
    /// DBSCAN over `x,y` rows.
    Cluster(ClusterArgs),
    /// Scene document utilities.
    #[command(subcommand)]
    Scene(SceneCommand),
}

#[derive(Debug, Subcommand)]
enum MetricCommand {
    /// ET-GOPSA of estimates against extended targets.
    EtGospa(MetricArgs),
    /// Point GOSPA, each truth row treated as its own target.
    Gospa(MetricArgs),
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Rows `target_id,x,y`.
    #[arg(long)]
    truth: PathBuf,
    /// Rows `x,y`.
    #[arg(long)]
    est: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Also append the result as a CSV row to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Rows `x,y`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 3)]
    min_pts: usize,
    /// Labeled output `x,y,label`; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SceneCommand {
    /// Parse and validate a scene document (the built-in one if omitted).
    Validate { path: Option<PathBuf> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate => simulate(&cli),
        Command::Sweep => sweep(&cli),
        Command::Metric(m) => metric(m),
        Command::Cluster(a) => cluster(a),
        Command::Scene(SceneCommand::Validate { path }) => validate_scene(path.as_deref()),
    }
}

fn experiment_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply_env()?;
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.run.trials = t;
    }
    Ok(cfg)
}

fn execute<T: Send>(cli: &Cli, f: impl FnOnce(Execution) -> T + Send) -> T {
    match cli.parallel {
        Some(1) => f(Execution::Sequential),
        n => with_threads(n, || f(Execution::Parallel)),
    }
}

fn summarize(report: &Report) {
    let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
    let n = report.recovered_targets.len().max(1) as f64;
    let recovered = report.recovered_targets.iter().sum::<usize>() as f64 / n;
    println!(
        "{}: trials={} snapshots={} final_et_gospa_mean={} final_mse_mean={} recovered_mean={} downsampled_trials={}",
        report.name,
        report.trials.len(),
        report.times.len(),
        format_sig9(last(&report.et_gospa_mean)),
        format_sig9(last(&report.mse_mean)),
        format_sig9(recovered),
        report.downsampled_trials,
    );
}

fn simulate(cli: &Cli) -> Result<()> {
    let cfg = experiment_config(cli)?;
    let exp = cfg.build()?;
    let report = execute(cli, |exec| run_monte_carlo(&exp, "simulate", exec))?;
    emit_csv(&report, &cli.out)?;
    summarize(&report);
    Ok(())
}

fn sweep(cli: &Cli) -> Result<()> {
    let cfg = experiment_config(cli)?;
    if cfg.conditions.is_empty() {
        bail!("configuration has no [[conditions]] to sweep");
    }
    let reports = execute(cli, |exec| sweep_conditions(&cfg, &cfg.conditions, exec))?;
    for r in &reports {
        emit_csv(r, &cli.out.join(&r.name))?;
        summarize(r);
    }
    Ok(())
}

fn read_rows(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        if rec.len() < columns {
            bail!("{}: row {} has {} columns, expected {columns}", path.display(), i + 1, rec.len());
        }
        let row = rec
            .iter()
            .take(columns)
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        rows.push(row);
    }
    Ok(rows)
}

fn read_points(path: &Path) -> Result<Vec<Vec2>> {
    Ok(read_rows(path, 2)?.into_iter().map(|r| Vec2::new(r[0], r[1])).collect())
}

fn read_targets(path: &Path) -> Result<GroundTruthSet> {
    let mut by_id: BTreeMap<i64, Vec<Vec2>> = BTreeMap::new();
    for r in read_rows(path, 3)? {
        by_id.entry(r[0] as i64).or_default().push(Vec2::new(r[1], r[2]));
    }
    Ok(GroundTruthSet::new(by_id.into_values().collect())?)
}

fn metric(cmd: &MetricCommand) -> Result<()> {
    match cmd {
        MetricCommand::EtGospa(a) => {
            let params = MetricParams::new(a.c, a.p, a.alpha)?;
            let truth = read_targets(&a.truth)?;
            let est = read_points(&a.est)?;
            let r = et_gospa(&truth, &est, &params)?;
            println!("value = {}", format_sig9(r.value));
            println!("sum_pair_costs = {}", format_sig9(r.sum_pair_costs));
            println!("missed_surcharge = {}", format_sig9(r.missed_surcharge));
            println!("cardinality_term = {}", format_sig9(r.cardinality_term));
            println!("missed_count = {}", r.missed_count);
            println!("extra_count = {}", r.extra_count);
            println!("clamped = {}", r.clamped);
            if let Some(path) = &a.csv {
                let row = format!(
                    "{},{},{},{},{},{},{}\n",
                    format_sig9(r.value),
                    format_sig9(r.sum_pair_costs),
                    format_sig9(r.missed_surcharge),
                    format_sig9(r.cardinality_term),
                    r.missed_count,
                    r.extra_count,
                    r.clamped
                );
                append_row(
                    path,
                    "value,sum_pair_costs,missed_surcharge,cardinality_term,missed_count,extra_count,clamped",
                    &row,
                )?;
            }
        }
        MetricCommand::Gospa(a) => {
            let params = MetricParams::new(a.c, a.p, a.alpha)?;
            let truth: Vec<Vec2> = read_targets(&a.truth)?.targets.into_iter().flatten().collect();
            let est = read_points(&a.est)?;
            let v = gospa_baseline(&truth, &est, &params)?;
            println!("value = {}", format_sig9(v));
            if let Some(path) = &a.csv {
                append_row(path, "value", &format!("{}\n", format_sig9(v)))?;
            }
        }
    }
    Ok(())
}

fn append_row(path: &Path, header: &str, row: &str) -> Result<()> {
    use std::io::Write;
    let fresh = !path.exists();
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(f, "{header}")?;
    }
    f.write_all(row.as_bytes())?;
    Ok(())
}

fn cluster(a: &ClusterArgs) -> Result<()> {
    let params = ClusterParams { eps: a.eps, min_pts: a.min_pts };
    params.validate()?;
    let points = read_points(&a.input)?;
    let labeling = dbscan(&points, &params);
    let mut text = String::from("x,y,label\n");
    for (p, l) in points.iter().zip(&labeling.labels) {
        let label = match l {
            Label::Noise => -1,
            Label::Cluster(c) => *c as i64,
        };
        text.push_str(&format!("{},{},{label}\n", format_sig9(p.x), format_sig9(p.y)));
    }
    match &a.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            let centroids = cluster_centroids(&points, &labeling);
            println!(
                "clusters = {} noise = {}",
                centroids.len(),
                labeling.noise_count()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn validate_scene(path: Option<&Path>) -> Result<()> {
    let scene = match path {
        Some(p) => load_scene_file(p)?,
        None => load_scene(DEFAULT_SCENE_TOML)?,
    };
    println!(
        "ok: {} targets, trajectory length {} m",
        scene.targets.len(),
        format_sig9(scene.trajectory.length())
    );
    Ok(())
}
