//! Rectangular linear assignment (Kuhn-Munkres with potentials).

use crate::error::{Error, Result};

/// Row-major cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::argument(format!(
                "cost matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::argument("ragged cost matrix"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

/// Optimal injection rows -> columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Column assigned to each row.
    pub columns: Vec<usize>,
    /// Sum of assigned costs, accumulated in row order.
    pub total: f64,
}

struct Solved {
    columns: Vec<usize>,
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Shortest augmenting path Hungarian over the listed rows and columns.
/// Potentials are returned for the listed entries, in list order.
fn hungarian(costs: &CostMatrix, rows: &[usize], cols: &[usize]) -> Solved {
    let n = rows.len();
    let m = cols.len();
    debug_assert!(n <= m);
    // 1-based internals; p[j] = row matched to column j (0 = none)
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = costs.get(rows[i0 - 1], cols[j - 1]) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            columns[p[j] - 1] = j - 1;
        }
    }
    Solved { columns, u: u[1..].to_vec(), v: v[1..].to_vec() }
}

fn sum_in_row_order(costs: &CostMatrix, rows: &[usize], cols_of_rows: &[usize]) -> f64 {
    rows.iter().zip(cols_of_rows).map(|(&i, &j)| costs.get(i, j)).sum()
}

/// Minimum-cost injection of rows into columns (`rows <= cols`).
///
/// Among optimal injections the lexicographically smallest column vector is
/// returned; costs within a relative 1e-9 of the optimum count as ties.
pub fn solve_assignment(costs: &CostMatrix) -> Result<Assignment> {
    let (n, m) = (costs.rows, costs.cols);
    if n > m {
        return Err(Error::argument(format!(
            "assignment needs rows <= columns, got {n}x{m}"
        )));
    }
    if let Some(bad) = costs.data.iter().find(|c| !c.is_finite()) {
        return Err(Error::argument(format!("non-finite assignment cost {bad}")));
    }
    if n == 0 {
        return Ok(Assignment { columns: Vec::new(), total: 0.0 });
    }
    let all_rows: Vec<usize> = (0..n).collect();
    let all_cols: Vec<usize> = (0..m).collect();
    let base = hungarian(costs, &all_rows, &all_cols);
    let best = sum_in_row_order(costs, &all_rows, &base.columns);
    let scale = costs.data.iter().fold(1.0f64, |a, c| a.max(c.abs())) * n as f64;
    let tol = 1e-9 * scale;

    // Fix rows one at a time to the smallest column that still admits an
    // optimal completion; only tight edges of the optimal dual qualify.
    let mut fixed: Vec<usize> = Vec::with_capacity(n);
    let mut prefix = 0.0;
    let mut taken = vec![false; m];
    for r in 0..n {
        let rest_rows: Vec<usize> = (r + 1..n).collect();
        let mut chosen = None;
        for j in 0..m {
            if taken[j] {
                continue;
            }
            let reduced = costs.get(r, j) - base.u[r] - base.v[j];
            if reduced > tol {
                continue;
            }
            if j == base.columns[r] && fixed.iter().zip(&base.columns).all(|(a, b)| a == b) {
                // the base solution itself completes this prefix
                let tail: f64 = (r..n).map(|i| costs.get(i, base.columns[i])).sum();
                if prefix + tail <= best + tol {
                    chosen = Some(j);
                    break;
                }
            }
            let rest_cols: Vec<usize> = (0..m).filter(|&c| !taken[c] && c != j).collect();
            let tail = if rest_rows.is_empty() {
                0.0
            } else {
                let s = hungarian(costs, &rest_rows, &rest_cols);
                let cols: Vec<usize> = s.columns.iter().map(|&k| rest_cols[k]).collect();
                sum_in_row_order(costs, &rest_rows, &cols)
            };
            if prefix + costs.get(r, j) + tail <= best + tol {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.unwrap_or(base.columns[r]);
        taken[j] = true;
        prefix += costs.get(r, j);
        fixed.push(j);
    }
    let total = sum_in_row_order(costs, &all_rows, &fixed);
    Ok(Assignment { columns: fixed, total })
}
