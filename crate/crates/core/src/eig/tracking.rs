//! Continuous eigenvalue branches over a one-parameter matrix family.
//!
//! Every grid point is solved independently (in parallel when enabled).
//! Consecutive points are then matched by minimum-cost assignment on the
//! distance between each eigenvalue and a linear extrapolation of the
//! branch. Steps whose cost is far above the local median are bisected
//! before matching.

use super::eigenvalues;
use crate::exec::{self, Execution};
use crate::linalg::{assignment, CMat};
use crate::{Error, Result};
use num_complex::Complex64 as C64;

const MAX_REFINE_DEPTH: usize = 8;
const MEDIAN_FACTOR: f64 = 10.0;
const MEDIAN_HALF_WINDOW: usize = 8;

/// A matrix-valued function of one real parameter.
pub trait MatrixFamily: Sync {
    fn dim(&self) -> usize;
    fn at(&self, s: f64) -> CMat;
}

/// Adapter turning a closure into a [`MatrixFamily`].
pub struct FnFamily<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64) -> CMat + Sync> MatrixFamily for FnFamily<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn at(&self, s: f64) -> CMat {
        (self.f)(s)
    }
}

/// Tracked eigenvalue branches; `branches[j][k]` is branch `j` at
/// `sigma_grid[k]`.
#[derive(Debug, Clone)]
pub struct SpectrumCurve {
    pub sigma_grid: Vec<f64>,
    pub branches: Vec<Vec<C64>>,
    /// Sum over steps of the matched distances to the predicted values.
    pub matching_cost: f64,
    /// Number of points inserted by bisection.
    pub refined_points: usize,
    /// Parameter values where a step stayed expensive after full refinement.
    pub crossings: Vec<f64>,
    pub max_backward_error: f64,
}

impl SpectrumCurve {
    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn len(&self) -> usize {
        self.sigma_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_grid.is_empty()
    }

    pub fn values_at(&self, k: usize) -> Vec<C64> {
        self.branches.iter().map(|b| b[k]).collect()
    }

    /// CSV with columns `sigma, re_lambda_1, im_lambda_1, ...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma");
        for j in 1..=self.n_branches() {
            out.push_str(&format!(",re_lambda_{j},im_lambda_{j}"));
        }
        out.push('\n');
        for (k, s) in self.sigma_grid.iter().enumerate() {
            out.push_str(&format!("{s}"));
            for b in &self.branches {
                out.push_str(&format!(",{},{}", b[k].re, b[k].im));
            }
            out.push('\n');
        }
        out
    }
}

fn solve(fam: &impl MatrixFamily, s: f64) -> Result<(Vec<C64>, f64)> {
    eigenvalues(&fam.at(s)).map(|r| (r.eigenvalues, r.backward_error)).map_err(|e| e.at_sigma(s))
}

fn set_cost(a: &[C64], b: &[C64]) -> f64 {
    let n = a.len();
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = (a[i] - b[j]).norm();
        }
    }
    let p = assignment(&cost, n);
    (0..n).map(|i| cost[i * n + p[i]]).sum()
}

struct Refined {
    points: Vec<(f64, Vec<C64>, f64)>,
    unresolved: Vec<f64>,
}

fn refine(
    fam: &impl MatrixFamily,
    (s0, e0): (f64, &[C64]),
    (s1, e1): (f64, &[C64]),
    thr: f64,
    depth: usize,
    out: &mut Refined,
) -> Result<()> {
    if set_cost(e0, e1) <= thr {
        return Ok(());
    }
    if depth == MAX_REFINE_DEPTH {
        out.unresolved.push(0.5 * (s0 + s1));
        return Ok(());
    }
    let mid = 0.5 * (s0 + s1);
    let (em, be) = solve(fam, mid)?;
    refine(fam, (s0, e0), (mid, &em), 0.5 * thr, depth + 1, out)?;
    out.points.push((mid, em.clone(), be));
    refine(fam, (mid, &em), (s1, e1), 0.5 * thr, depth + 1, out)?;
    Ok(())
}

/// Tracks all eigenvalue branches of `fam` over a sorted grid.
pub fn track_branches(fam: &impl MatrixFamily, grid: &[f64]) -> Result<SpectrumCurve> {
    track_branches_with(fam, grid, Execution::default())
}

pub fn track_branches_with(fam: &impl MatrixFamily, grid: &[f64], exec: Execution) -> Result<SpectrumCurve> {
    if grid.len() < 2 {
        return Err(Error::Input("tracking grid needs at least two points".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Input("tracking grid must be strictly increasing".into()));
    }
    let solved = exec::try_map(exec, grid, |&s| solve(fam, s))?;

    // Refinement of expensive steps, judged against the local median.
    let costs: Vec<f64> = solved.windows(2).map(|w| set_cost(&w[0].0, &w[1].0)).collect();
    let mut points: Vec<(f64, Vec<C64>, f64)> = Vec::with_capacity(grid.len());
    let mut crossings = Vec::new();
    let mut refined_points = 0;
    for k in 0..grid.len() {
        points.push((grid[k], solved[k].0.clone(), solved[k].1));
        if k + 1 == grid.len() {
            break;
        }
        let lo = k.saturating_sub(MEDIAN_HALF_WINDOW);
        let hi = (k + MEDIAN_HALF_WINDOW + 1).min(costs.len());
        let mut local: Vec<f64> = costs[lo..hi].to_vec();
        local.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = local[local.len() / 2];
        let scale = solved[k].0.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let thr = (MEDIAN_FACTOR * median).max(1e-13 * scale);
        if costs[k] > thr {
            let mut r = Refined { points: Vec::new(), unresolved: Vec::new() };
            refine(fam, (grid[k], &solved[k].0), (grid[k + 1], &solved[k + 1].0), thr, 0, &mut r)?;
            refined_points += r.points.len();
            points.extend(r.points);
            crossings.extend(r.unresolved);
        }
    }

    // Sequential matching with a linear predictor.
    let n = fam.dim();
    let mut first = points[0].1.clone();
    first.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap()));
    let mut branches: Vec<Vec<C64>> = first.iter().map(|&z| vec![z]).collect();
    let mut matching_cost = 0.0;
    let mut max_backward_error = points[0].2;
    for k in 1..points.len() {
        let (s, ref eig, be) = points[k];
        max_backward_error = max_backward_error.max(be);
        let pred: Vec<C64> = branches
            .iter()
            .map(|b| {
                let last = b[k - 1];
                if k >= 2 {
                    let h0 = points[k - 1].0 - points[k - 2].0;
                    let h1 = s - points[k - 1].0;
                    last + (last - b[k - 2]) * (h1 / h0)
                } else {
                    last
                }
            })
            .collect();
        let mut cost = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                cost[j * n + i] = (eig[i] - pred[j]).norm();
            }
        }
        let p = assignment(&cost, n);
        for j in 0..n {
            matching_cost += cost[j * n + p[j]];
            branches[j].push(eig[p[j]]);
        }
    }

    Ok(SpectrumCurve {
        sigma_grid: points.iter().map(|p| p.0).collect(),
        branches,
        matching_cost,
        refined_points,
        crossings,
        max_backward_error,
    })
}

/// Tracks the two half-grids `[-w, -w/n]` and `[w/n, w]` separately (the
/// origin is excluded), orders the branches of each half by modulus at the
/// innermost point, and joins them into one curve. Branch 0 is therefore
/// the one closest to the origin.
pub fn track_two_sided(fam: &impl MatrixFamily, window: f64, n: usize, exec: Execution) -> Result<SpectrumCurve> {
    if !(window > 0.0) || n < 2 {
        return Err(Error::Input("two-sided tracking needs window > 0 and n >= 2".into()));
    }
    let pos: Vec<f64> = (1..=n).map(|k| window * k as f64 / n as f64).collect();
    let neg: Vec<f64> = pos.iter().rev().map(|s| -s).collect();
    let cp = track_branches_with(fam, &pos, exec)?;
    let cn = track_branches_with(fam, &neg, exec)?;
    let order = |c: &SpectrumCurve, k: usize| {
        let mut idx: Vec<usize> = (0..c.n_branches()).collect();
        idx.sort_by(|&a, &b| c.branches[a][k].norm().partial_cmp(&c.branches[b][k].norm()).unwrap());
        idx
    };
    let op = order(&cp, 0);
    let on = order(&cn, cn.len() - 1);
    let mut sigma_grid = cn.sigma_grid.clone();
    sigma_grid.extend(&cp.sigma_grid);
    let branches = (0..fam.dim())
        .map(|j| {
            let mut b = cn.branches[on[j]].clone();
            b.extend(&cp.branches[op[j]]);
            b
        })
        .collect();
    let mut crossings = cn.crossings.clone();
    crossings.extend(&cp.crossings);
    Ok(SpectrumCurve {
        sigma_grid,
        branches,
        matching_cost: cn.matching_cost + cp.matching_cost,
        refined_points: cn.refined_points + cp.refined_points,
        crossings,
        max_backward_error: cn.max_backward_error.max(cp.max_backward_error),
    })
}
