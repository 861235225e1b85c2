//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use isac_slam::clustering::{ClusterParams, Label};
use isac_slam::metrics::MetricParams;
use isac_slam::Vec2;

/// Calls `f` with every injection of `0..n` into `0..m` (`n <= m`).
pub fn for_each_injection(n: usize, m: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(k: usize, n: usize, m: usize, used: &mut [bool], cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == n {
            f(cur);
            return;
        }
        for j in 0..m {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(k + 1, n, m, used, cur, f);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut used = vec![false; m];
    rec(0, n, m, &mut used, &mut Vec::with_capacity(n), f);
}

/// Minimum total over all injections, summed in row order, with the
/// lexicographically smallest minimizer.
pub fn brute_assignment(costs: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = costs.len();
    let m = costs.first().map_or(0, Vec::len);
    let mut best = (f64::INFINITY, Vec::new());
    for_each_injection(n, m, &mut |inj| {
        let total: f64 = inj.iter().enumerate().map(|(i, &j)| costs[i][j]).sum();
        if total < best.0 {
            best = (total, inj.to_vec());
        }
    });
    if n == 0 {
        best.0 = 0.0;
    }
    best
}

fn sq(x: Vec2, y: Vec2) -> f64 {
    (x.x - y.x).powi(2) + (x.y - y.y).powi(2)
}

/// Pair cost written straight from its definition.
pub fn oracle_pair_cost(i: usize, truth: &[Vec<Vec2>], y: Vec2, c: f64, p: f64) -> f64 {
    let d = |x: Vec2| sq(x, y).min(c).powf(p);
    let own = truth[i].iter().map(|&x| d(x)).fold(f64::INFINITY, f64::min);
    let others: Vec<f64> = truth
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i)
        .flat_map(|(_, t)| t.iter().map(|&x| d(x)))
        .collect();
    let sub = if others.is_empty() {
        c.powf(p)
    } else {
        others.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    c + own - sub
}

/// Exhaustive-injection ET-GOPSA value.
pub fn oracle_et_gospa(truth: &[Vec<Vec2>], est: &[Vec2], params: &MetricParams) -> f64 {
    let (c, p, alpha) = (params.c, params.p, params.alpha);
    let n = truth.len();
    let m = est.len();
    let cost = |i: usize, j: usize| oracle_pair_cost(i, truth, est[j], c, p);
    let mut best = f64::INFINITY;
    if m >= n {
        for_each_injection(n, m, &mut |inj| {
            let s: f64 = inj.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
            best = best.min(s);
        });
    } else {
        for_each_injection(m, n, &mut |inj| {
            let s: f64 = inj.iter().enumerate().map(|(j, &i)| cost(i, j)).sum();
            best = best.min(s);
        });
        best += (n - m) as f64 * (c + c.powf(p));
    }
    let points: usize = truth.iter().map(Vec::len).sum();
    let surplus = m.saturating_sub(points) as f64;
    (best + c.powf(p) / alpha * surplus).max(0.0).powf(1.0 / p)
}

/// Exhaustive point GOSPA.
pub fn oracle_gospa(x: &[Vec2], y: &[Vec2], params: &MetricParams) -> f64 {
    let (c, p, alpha) = (params.c, params.p, params.alpha);
    let (small, large) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let mut best = f64::INFINITY;
    for_each_injection(small.len(), large.len(), &mut |inj| {
        let s: f64 = inj
            .iter()
            .enumerate()
            .map(|(i, &j)| sq(small[i], large[j]).min(c).powf(p))
            .sum();
        best = best.min(s);
    });
    let unmatched = (large.len() - small.len()) as f64;
    (best + c.powf(p) / alpha * unmatched).powf(1.0 / p)
}

/// O(n²) DBSCAN: core points, connected components of the core graph
/// numbered by their smallest core index, border points joined to the
/// smallest-numbered neighbouring cluster.
pub fn brute_dbscan(points: &[Vec2], params: &ClusterParams) -> Vec<Label> {
    let n = points.len();
    let eps2 = params.eps * params.eps;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| sq(points[i], points[j]) <= eps2).collect())
        .collect();
    let core: Vec<bool> = adj.iter().map(|a| a.len() >= params.min_pts).collect();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if !core[s] || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if core[j] && comp[j] == usize::MAX {
                    comp[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    (0..n)
        .map(|i| {
            if core[i] {
                Label::Cluster(comp[i])
            } else {
                adj[i]
                    .iter()
                    .filter(|&&j| core[j])
                    .map(|&j| comp[j])
                    .min()
                    .map_or(Label::Noise, Label::Cluster)
            }
        })
        .collect()
}

/// Core flags by direct counting.
pub fn brute_core(points: &[Vec2], params: &ClusterParams) -> Vec<bool> {
    let eps2 = params.eps * params.eps;
    points
        .iter()
        .map(|&p| points.iter().filter(|&&q| sq(p, q) <= eps2).count() >= params.min_pts)
        .collect()
}

/// One-sided paired t statistic for `mean(b - a) > 0`.
pub fn paired_t(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    mean / (var / n).sqrt()
}

/// Mean of the first and of the last quarter of a curve.
pub fn quarter_means(v: &[f64]) -> (f64, f64) {
    let q = (v.len() / 4).max(1);
    let head = v[..q].iter().sum::<f64>() / q as f64;
    let tail = v[v.len() - q..].iter().sum::<f64>() / q as f64;
    (head, tail)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
