use serde::{Deserialize, Serialize};

use super::grid::OccupancyGrid;
use crate::geometry::{Pose, Vec2};
use crate::scan::Scan;

/// Discrete correction window searched around the prior pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    /// Half-width of the x and y search, m.
    pub half_xy: f64,
    pub step_xy: f64,
    /// Half-width of the heading search, radians.
    pub half_theta: f64,
    pub step_theta: f64,
    /// Radius, in cells, over which occupied cells are spread before
    /// scoring (Gaussian falloff, one-cell sigma); 0 scores the raw grid.
    #[serde(default = "default_blur")]
    pub blur_cells: usize,
    /// Odometry prior: each candidate loses `prior_weight · n · (i² + j² + k²)`
    /// for `n` scan points and a correction of `(i, j, k)` window steps.
    #[serde(default = "default_prior_weight")]
    pub prior_weight: f64,
}

fn default_prior_weight() -> f64 {
    0.1
}

fn default_blur() -> usize {
    2
}

impl Default for SearchWindow {
    fn default() -> Self {
        Self {
            half_xy: 0.5,
            step_xy: 0.1,
            half_theta: 2f64.to_radians(),
            step_theta: 0.5f64.to_radians(),
            blur_cells: default_blur(),
            prior_weight: default_prior_weight(),
        }
    }
}

impl SearchWindow {
    fn steps(half: f64, step: f64) -> i64 {
        if half <= 0.0 || step <= 0.0 {
            0
        } else {
            (half / step + 1e-9).floor() as i64
        }
    }

    pub fn xy_steps(&self) -> i64 {
        Self::steps(self.half_xy, self.step_xy)
    }

    pub fn theta_steps(&self) -> i64 {
        Self::steps(self.half_theta, self.step_theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    pub pose: Pose,
    pub score: f64,
    /// World-frame correction `(dx, dy, dθ)` applied to the prior.
    pub correction: (f64, f64, f64),
    /// Set when matching was skipped (empty scan or map).
    pub skipped: bool,
}

/// Positive log-odds spread to neighbouring cells:
/// `f(i, j) = max over |di|, |dj| <= r of L+(i + di, j + dj) · w(di) · w(dj)`
/// with `w(d) = exp(-d²/2)`. The kernel is separable, so two 1-D passes suffice.
struct ScoreField {
    origin: Vec2,
    resolution: f64,
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScoreField {
    fn new(grid: &OccupancyGrid, radius: usize) -> Self {
        let (w, h) = (grid.width(), grid.height());
        let mut values: Vec<f64> = grid.cells().iter().map(|l| l.max(0.0)).collect();
        if radius > 0 {
            let r = radius as i64;
            let kernel: Vec<f64> = (-r..=r).map(|d| (-0.5 * (d * d) as f64).exp()).collect();
            let pass = |src: &[f64], along_x: bool| {
                let mut out = vec![0.0; src.len()];
                for iy in 0..h as i64 {
                    for ix in 0..w as i64 {
                        let mut best = 0.0f64;
                        for (k, wk) in kernel.iter().enumerate() {
                            let d = k as i64 - r;
                            let (jx, jy) = if along_x { (ix + d, iy) } else { (ix, iy + d) };
                            if jx >= 0 && jy >= 0 && (jx as usize) < w && (jy as usize) < h {
                                best = best.max(src[jy as usize * w + jx as usize] * wk);
                            }
                        }
                        out[iy as usize * w + ix as usize] = best;
                    }
                }
                out
            };
            values = pass(&pass(&values, true), false);
        }
        Self {
            origin: grid.origin(),
            resolution: grid.resolution(),
            width: w,
            height: h,
            values,
        }
    }

    fn at(&self, p: Vec2) -> f64 {
        let ix = ((p.x - self.origin.x) / self.resolution).floor();
        let iy = ((p.y - self.origin.y) / self.resolution).floor();
        if ix < 0.0 || iy < 0.0 || ix >= self.width as f64 || iy >= self.height as f64 {
            return 0.0;
        }
        self.values[iy as usize * self.width + ix as usize]
    }
}

fn score_points(field: &ScoreField, points: &[Vec2], offset: Vec2) -> f64 {
    points.iter().map(|&p| field.at(p + offset)).sum()
}

/// Exhaustive correlative matching over the `(dx, dy, dθ)` window.
///
/// Each candidate pose scores the sum, over scan points, of the positive
/// log-odds field (spread by `blur_cells`) at the transformed point, less
/// the odometry-prior penalty.
/// Scores within 1e-9 of the best are ties; ties go to the smallest
/// correction (`dx² + dy²`, then `|dθ|`), then to lexicographic
/// `(dx, dy, dθ)`.
pub fn match_scan(scan: &Scan, grid: &OccupancyGrid, prior: &Pose, window: &SearchWindow) -> MatchResult {
    let skipped = MatchResult {
        pose: *prior,
        score: 0.0,
        correction: (0.0, 0.0, 0.0),
        skipped: true,
    };
    if scan.is_empty() || grid.occupied_count() == 0 {
        return skipped;
    }
    let nxy = window.xy_steps();
    let nth = window.theta_steps();
    let field = ScoreField::new(grid, window.blur_cells);
    let n_points = scan.len() as f64;

    // (score, key) where key orders ties.
    let mut best: Option<(f64, (i64, i64, i64, i64, i64), (i64, i64, i64))> = None;
    let mut rotated = Vec::with_capacity(scan.len());
    for k in -nth..=nth {
        let heading = prior.heading + k as f64 * window.step_theta;
        rotated.clear();
        rotated.extend(scan.points().map(|p| p.rotate(heading) + prior.position));
        for i in -nxy..=nxy {
            for j in -nxy..=nxy {
                let offset = Vec2::new(i as f64 * window.step_xy, j as f64 * window.step_xy);
                let penalty = window.prior_weight * n_points * (i * i + j * j + k * k) as f64;
                let score = score_points(&field, &rotated, offset) - penalty;
                let key = (i * i + j * j, k.abs(), i, j, k);
                let better = match best {
                    None => true,
                    Some((s, bk, _)) => score > s + 1e-9 || ((score - s).abs() <= 1e-9 && key < bk),
                };
                if better {
                    best = Some((score, key, (i, j, k)));
                }
            }
        }
    }
    let (score, _, (i, j, k)) = best.expect("window has at least one candidate");
    let correction = (
        i as f64 * window.step_xy,
        j as f64 * window.step_xy,
        k as f64 * window.step_theta,
    );
    MatchResult {
        pose: Pose::new(
            prior.position + Vec2::new(correction.0, correction.1),
            prior.heading + correction.2,
        ),
        score,
        correction,
        skipped: false,
    }
}
