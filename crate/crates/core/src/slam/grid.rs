use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Vec2};
use crate::scan::Scan;
use crate::scene::Aabb;

/// Inverse sensor model increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogOddsParams {
    pub l_free: f64,
    pub l_occ: f64,
    /// Cells stay within `[-clamp, clamp]`.
    pub clamp: f64,
}

impl Default for LogOddsParams {
    fn default() -> Self {
        Self {
            l_free: 0.4,
            l_occ: 0.85,
            clamp: 10.0,
        }
    }
}

/// What to do with ray endpoints that fall outside the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutOfGrid {
    /// Update only the in-grid part of the ray.
    #[default]
    Clip,
    /// Grow the grid to include the endpoint.
    Expand,
}

/// Log-odds occupancy grid; cell `(ix, iy)` covers
/// `origin + [ix, ix+1) × [iy, iy+1)` times the resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    origin: Vec2,
    resolution: f64,
    width: usize,
    height: usize,
    cells: Vec<f64>,
    params: LogOddsParams,
}

impl OccupancyGrid {
    pub fn new(origin: Vec2, resolution: f64, width: usize, height: usize, params: LogOddsParams) -> Self {
        assert!(resolution > 0.0, "grid resolution must be positive");
        Self {
            origin,
            resolution,
            width,
            height,
            cells: vec![0.0; width * height],
            params,
        }
    }

    /// Grid covering `area` at `resolution`.
    pub fn covering(area: &Aabb, resolution: f64, params: LogOddsParams) -> Self {
        let width = (area.width() / resolution).ceil().max(1.0) as usize;
        let height = (area.height() / resolution).ceil().max(1.0) as usize;
        Self::new(area.min, resolution, width, height, params)
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn params(&self) -> &LogOddsParams {
        &self.params
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Integer cell coordinates of `p`, possibly outside the grid.
    pub fn cell_coords(&self, p: Vec2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    fn index(&self, ix: i64, iy: i64) -> Option<usize> {
        (ix >= 0 && iy >= 0 && (ix as usize) < self.width && (iy as usize) < self.height)
            .then(|| iy as usize * self.width + ix as usize)
    }

    pub fn log_odds(&self, ix: i64, iy: i64) -> Option<f64> {
        self.index(ix, iy).map(|i| self.cells[i])
    }

    pub fn log_odds_at(&self, p: Vec2) -> Option<f64> {
        let (ix, iy) = self.cell_coords(p);
        self.log_odds(ix, iy)
    }

    pub fn cell_center(&self, ix: i64, iy: i64) -> Vec2 {
        self.origin
            + Vec2::new(
                (ix as f64 + 0.5) * self.resolution,
                (iy as f64 + 0.5) * self.resolution,
            )
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&l| l > 0.0).count()
    }

    fn add(&mut self, ix: i64, iy: i64, delta: f64) {
        if let Some(i) = self.index(ix, iy) {
            let c = self.params.clamp;
            self.cells[i] = (self.cells[i] + delta).clamp(-c, c);
        }
    }

    /// Grow so that cell `(ix, iy)` exists, keeping existing cells in place.
    fn expand_to(&mut self, ix: i64, iy: i64) {
        let pad = 8;
        let left = if ix < 0 { -ix + pad } else { 0 };
        let bottom = if iy < 0 { -iy + pad } else { 0 };
        let right = (ix + 1 - self.width as i64).max(0) + if ix >= self.width as i64 { pad } else { 0 };
        let top = (iy + 1 - self.height as i64).max(0) + if iy >= self.height as i64 { pad } else { 0 };
        if left == 0 && bottom == 0 && right == 0 && top == 0 {
            return;
        }
        let new_w = self.width + (left + right) as usize;
        let new_h = self.height + (bottom + top) as usize;
        let mut cells = vec![0.0; new_w * new_h];
        for y in 0..self.height {
            let src = &self.cells[y * self.width..(y + 1) * self.width];
            let start = (y + bottom as usize) * new_w + left as usize;
            cells[start..start + self.width].copy_from_slice(src);
        }
        self.origin = self.origin - Vec2::new(left as f64, bottom as f64) * self.resolution;
        self.width = new_w;
        self.height = new_h;
        self.cells = cells;
    }

    /// Cells crossed by the segment `from -> to`, in order, ending with the
    /// cell containing `to` (Amanatides–Woo traversal).
    pub fn traverse(&self, from: Vec2, to: Vec2) -> Vec<(i64, i64)> {
        let (mut ix, mut iy) = self.cell_coords(from);
        let (ex, ey) = self.cell_coords(to);
        let d = to - from;
        let step_x: i64 = if d.x > 0.0 { 1 } else { -1 };
        let step_y: i64 = if d.y > 0.0 { 1 } else { -1 };
        let res = self.resolution;
        let boundary = |i: i64, step: i64, o: f64| o + (i + i64::from(step > 0)) as f64 * res;
        let mut t_max_x = if d.x != 0.0 {
            (boundary(ix, step_x, self.origin.x) - from.x) / d.x
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if d.y != 0.0 {
            (boundary(iy, step_y, self.origin.y) - from.y) / d.y
        } else {
            f64::INFINITY
        };
        let t_delta_x = if d.x != 0.0 { res / d.x.abs() } else { f64::INFINITY };
        let t_delta_y = if d.y != 0.0 { res / d.y.abs() } else { f64::INFINITY };

        let mut cells = vec![(ix, iy)];
        let limit = ((ex - ix).abs() + (ey - iy).abs()) as usize + 2;
        while (ix, iy) != (ex, ey) && cells.len() <= limit {
            if t_max_x < t_max_y {
                ix += step_x;
                t_max_x += t_delta_x;
            } else {
                iy += step_y;
                t_max_y += t_delta_y;
            }
            cells.push((ix, iy));
        }
        // Rounding can stop the walk one cell short of or beside the endpoint.
        if cells.last() != Some(&(ex, ey)) {
            cells.push((ex, ey));
        }
        cells
    }
}

/// Apply the inverse sensor model for every detection of `scan` seen from
/// `pose`: cells along the ray lose `l_free`, the endpoint cell gains `l_occ`.
pub fn update_grid(grid: &mut OccupancyGrid, pose: &Pose, scan: &Scan, out_of_grid: OutOfGrid) {
    let LogOddsParams { l_free, l_occ, .. } = grid.params;
    for det in &scan.detections {
        let end = pose.transform_point(det.point);
        if out_of_grid == OutOfGrid::Expand {
            let (sx, sy) = grid.cell_coords(pose.position);
            grid.expand_to(sx, sy);
            let (ex, ey) = grid.cell_coords(end);
            grid.expand_to(ex, ey);
        }
        let cells = grid.traverse(pose.position, end);
        let (last, free) = cells.split_last().expect("traversal yields the endpoint cell");
        for &(ix, iy) in free {
            grid.add(ix, iy, -l_free);
        }
        grid.add(last.0, last.1, l_occ);
    }
}
