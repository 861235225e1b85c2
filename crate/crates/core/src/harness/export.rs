//! CSV output. Every file starts with a `# <schema> v1` comment line
//! followed by a header row; floats carry 9 significant digits.
//!
//! | file                   | columns                                      |
//! |------------------------|----------------------------------------------|
//! | `metric_curve.csv`     | `t,et_gospa_mean`                            |
//! | `agv_mse.csv`          | `t,mse_mean`                                 |
//! | `map_points_<k>.csv`   | `t,x,y`                                      |
//! | `clusters_<k>.csv`     | `x,y,label` (noise is `-1`)                  |
//! | `snapshots_<k>.csv`    | `t,truth_x,truth_y,est_x,est_y,n_map_points` |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Report, TrialRecord};
use crate::clustering::Label;
use crate::error::{Error, Result};
use crate::slam::{PointMap, Snapshot};

const SCHEMA_VERSION: u32 = 1;

/// Shortest decimal form of `v` rounded to 9 significant digits.
pub fn format_sig9(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    // avoid "-0"
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

struct CsvText(String);

impl CsvText {
    fn new(schema: &str, header: &str) -> Self {
        Self(format!("# {schema} v{SCHEMA_VERSION}\n{header}\n"))
    }

    fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.0, "{}", fields.join(","));
    }

    fn write(self, path: &Path) -> Result<PathBuf> {
        fs::write(path, self.0).map_err(|e| Error::io(path, e))?;
        Ok(path.to_path_buf())
    }
}

fn curve(schema: &str, column: &str, times: &[f64], values: &[f64], path: &Path) -> Result<PathBuf> {
    let mut csv = CsvText::new(schema, &format!("t,{column}"));
    for (t, v) in times.iter().zip(values) {
        csv.row(&[format_sig9(*t), format_sig9(*v)]);
    }
    csv.write(path)
}

pub fn write_point_map(map: &PointMap, path: &Path) -> Result<PathBuf> {
    let mut csv = CsvText::new("map_points", "t,x,y");
    for (p, t) in map.points.iter().zip(&map.timestamps) {
        csv.row(&[format_sig9(*t), format_sig9(p.x), format_sig9(p.y)]);
    }
    csv.write(path)
}

pub fn write_snapshots(snapshots: &[Snapshot], path: &Path) -> Result<PathBuf> {
    let mut csv = CsvText::new("snapshots", "t,truth_x,truth_y,est_x,est_y,n_map_points");
    for s in snapshots {
        csv.row(&[
            format_sig9(s.time),
            format_sig9(s.pose_truth.position.x),
            format_sig9(s.pose_truth.position.y),
            format_sig9(s.pose_estimate.position.x),
            format_sig9(s.pose_estimate.position.y),
            s.map_len.to_string(),
        ]);
    }
    csv.write(path)
}

fn write_clusters(trial: &TrialRecord, path: &Path) -> Result<PathBuf> {
    let mut csv = CsvText::new("clusters", "x,y,label");
    for (p, l) in trial.map.points.iter().zip(&trial.labeling.labels) {
        let label = match l {
            Label::Noise => "-1".to_string(),
            Label::Cluster(c) => c.to_string(),
        };
        csv.row(&[format_sig9(p.x), format_sig9(p.y), label]);
    }
    csv.write(path)
}

/// Write all report files into `dir` (created if missing); returns the paths.
pub fn emit_csv(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![
        curve(
            "metric_curve",
            "et_gospa_mean",
            &report.times,
            &report.et_gospa_mean,
            &dir.join("metric_curve.csv"),
        )?,
        curve("agv_mse", "mse_mean", &report.times, &report.mse_mean, &dir.join("agv_mse.csv"))?,
    ];
    for t in &report.trials {
        let k = t.index;
        written.push(write_point_map(&t.map, &dir.join(format!("map_points_{k}.csv")))?);
        written.push(write_clusters(t, &dir.join(format!("clusters_{k}.csv")))?);
        written.push(write_snapshots(&t.snapshots, &dir.join(format!("snapshots_{k}.csv")))?);
    }
    Ok(written)
}
