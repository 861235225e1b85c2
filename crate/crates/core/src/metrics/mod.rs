//! Mapping-error metrics: ET-GOPSA for extended targets, a point GOSPA
//! baseline, and AGV location MSE.
//!
//! Ground cost is the clamped squared distance `min(c, |x - y|^2)`. For
//! target `i` and estimate `y` the pair cost is
//!
//! ```text
//! E(i, y) = c + min_k d(x_ik, y)^p - min_{j != i, k} d(x_jk, y)^p
//! ```
//!
//! with the second minimum taken as `c^p` when there is no other target.

mod assignment;

use serde::{Deserialize, Serialize};

pub use assignment::{solve_assignment, Assignment, CostMatrix};

use crate::error::{Error, Result};
use crate::geometry::{Pose, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub c: f64,
    pub p: f64,
    pub alpha: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self { c: 5.0, p: 1.0, alpha: 2.0 }
    }
}

impl MetricParams {
    pub fn new(c: f64, p: f64, alpha: f64) -> Result<Self> {
        let m = Self { c, p, alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::argument(format!("metric c must be > 0, got {}", self.c)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::argument(format!("metric p must be in [1, inf), got {}", self.p)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::argument(format!(
                "metric alpha must be in (0, 2], got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    fn c_p(&self) -> f64 {
        self.c.powf(self.p)
    }
}

/// Ground-truth extended targets, each a non-empty set of reference points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundTruthSet {
    pub targets: Vec<Vec<Vec2>>,
}

impl GroundTruthSet {
    pub fn new(targets: Vec<Vec<Vec2>>) -> Result<Self> {
        let s = Self { targets };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::argument("ground truth needs at least one target"));
        }
        if let Some(i) = self.targets.iter().position(Vec::is_empty) {
            return Err(Error::argument(format!("ground-truth target {i} has no points")));
        }
        if self.targets.iter().flatten().any(|p| !p.is_finite()) {
            return Err(Error::argument("ground-truth points must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.targets.iter().map(Vec::len).sum()
    }
}

pub fn clamped_sqdist(x: Vec2, y: Vec2, c: f64) -> f64 {
    x.dist_sq(y).min(c)
}

fn nearest_pow(points: &[Vec2], y: Vec2, params: &MetricParams) -> f64 {
    points
        .iter()
        .map(|x| clamped_sqdist(*x, y, params.c).powf(params.p))
        .fold(f64::INFINITY, f64::min)
}

pub fn pair_cost(i: usize, truth: &GroundTruthSet, y: Vec2, params: &MetricParams) -> f64 {
    let own = nearest_pow(&truth.targets[i], y, params);
    let other = truth
        .targets
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, t)| nearest_pow(t, y, params))
        .fold(params.c_p(), f64::min);
    params.c + own - other
}

/// `|X| x |Y|` matrix of pair costs.
pub fn cost_matrix(truth: &GroundTruthSet, estimates: &[Vec2], params: &MetricParams) -> CostMatrix {
    let n = truth.len();
    let cp = params.c_p();
    let mut data = vec![0.0; n * estimates.len()];
    let mut near = vec![0.0; n];
    for (j, y) in estimates.iter().enumerate() {
        for (i, t) in truth.targets.iter().enumerate() {
            near[i] = nearest_pow(t, *y, params);
        }
        // smallest and second smallest give every "other targets" minimum
        let (mut best, mut second, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
        for (i, &d) in near.iter().enumerate() {
            if d < best {
                second = best;
                best = d;
                arg = i;
            } else if d < second {
                second = d;
            }
        }
        for i in 0..n {
            let other = if i == arg { second } else { best }.min(cp);
            data[i * estimates.len() + j] = params.c + near[i] - other;
        }
    }
    CostMatrix::new(n, estimates.len(), data).expect("shape by construction")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtGospaResult {
    pub value: f64,
    /// Estimate index matched to each target, `None` when missed.
    pub assignment: Vec<Option<usize>>,
    pub sum_pair_costs: f64,
    /// `(c + c^p)` per missed target.
    pub missed_surcharge: f64,
    pub cardinality_term: f64,
    pub missed_count: usize,
    pub extra_count: usize,
    pub clamped: bool,
}

pub fn et_gospa(
    truth: &GroundTruthSet,
    estimates: &[Vec2],
    params: &MetricParams,
) -> Result<EtGospaResult> {
    params.validate()?;
    truth.validate()?;
    if estimates.iter().any(|y| !y.is_finite()) {
        return Err(Error::argument("estimates must be finite"));
    }
    let n = truth.len();
    let m = estimates.len();
    let costs = cost_matrix(truth, estimates, params);
    let mut assignment = vec![None; n];
    let sum_pair_costs = if m >= n {
        let a = solve_assignment(&costs)?;
        for (i, j) in a.columns.iter().enumerate() {
            assignment[i] = Some(*j);
        }
        a.total
    } else {
        let a = solve_assignment(&costs.transpose())?;
        for (j, i) in a.columns.iter().enumerate() {
            assignment[*i] = Some(j);
        }
        a.total
    };
    let missed_count = n.saturating_sub(m);
    let extra_count = m.saturating_sub(n);
    let cp = params.c_p();
    let missed_surcharge = missed_count as f64 * (params.c + cp);
    let surplus = m.saturating_sub(truth.point_count());
    let cardinality_term = cp / params.alpha * surplus as f64;
    let bracket = sum_pair_costs + missed_surcharge + cardinality_term;
    let clamped = bracket < 0.0;
    Ok(EtGospaResult {
        value: bracket.max(0.0).powf(1.0 / params.p),
        assignment,
        sum_pair_costs,
        missed_surcharge,
        cardinality_term,
        missed_count,
        extra_count,
        clamped,
    })
}

/// Point GOSPA with the same clamped ground cost.
pub fn gospa_baseline(truth: &[Vec2], estimates: &[Vec2], params: &MetricParams) -> Result<f64> {
    params.validate()?;
    let (small, large) = if truth.len() <= estimates.len() {
        (truth, estimates)
    } else {
        (estimates, truth)
    };
    let costs = CostMatrix::from_fn(small.len(), large.len(), |i, j| {
        clamped_sqdist(small[i], large[j], params.c).powf(params.p)
    });
    let matched = solve_assignment(&costs)?.total;
    let unmatched = (large.len() - small.len()) as f64;
    Ok((matched + params.c_p() / params.alpha * unmatched).powf(1.0 / params.p))
}

/// Squared position error per step.
pub fn location_mse(truth: &[Pose], estimate: &[Pose]) -> Result<Vec<f64>> {
    if truth.len() != estimate.len() {
        return Err(Error::argument(format!(
            "pose series lengths differ: {} vs {}",
            truth.len(),
            estimate.len()
        )));
    }
    Ok(truth
        .iter()
        .zip(estimate)
        .map(|(t, e)| t.position.dist_sq(e.position))
        .collect())
}
