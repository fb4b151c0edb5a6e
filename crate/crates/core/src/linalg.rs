//! Small dense helpers shared by the solver modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// Frobenius norm of a complex matrix.
pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Minimum-cost perfect matching on a square cost matrix (row-major,
/// `n x n`). Returns `assign[row] = col`. Hungarian method with potentials,
/// O(n^3).
pub fn assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    // 1-based arrays, column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
            for j in 0..=n {
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
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Optimal matching of two equal-size point sets in the complex plane.
/// Returns the permutation (`a[i]` pairs with `b[perm[i]]`) and the
/// largest matched distance.
pub fn match_sets(a: &[C64], b: &[C64]) -> (Vec<usize>, f64) {
    assert_eq!(a.len(), b.len(), "sets must have equal size");
    let n = a.len();
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = (a[i] - b[j]).norm();
        }
    }
    let perm = assignment(&cost, n);
    let worst = (0..n).map(|i| (a[i] - b[perm[i]]).norm()).fold(0.0, f64::max);
    (perm, worst)
}

/// Numerical rank from the singular values, relative tolerance `rtol`.
pub fn rank(m: &RMat, rtol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * smax).count()
}

/// Unit vector spanning (numerically) the null space of a square real
/// matrix: the right singular vector of the smallest singular value.
pub fn null_vector(m: &RMat) -> DVector<f64> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (imin, _) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    DVector::from_iterator(n, vt.row(imin).iter().cloned())
}

/// Whether a real square matrix is numerically singular.
pub fn is_singular(m: &RMat) -> bool {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    smax == 0.0 || smin <= 1e-13 * smax
}

/// `n` logarithmically spaced points covering `[lo, hi]` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo, "log_space needs 0 < lo <= hi");
    if n <= 1 || lo == hi {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Least-squares fit `y ~ c0 + c1 x` with complex data on a real design.
/// Returns `(c0, c1, rms residual)`.
pub fn fit_line(x: &[f64], y: &[C64]) -> (C64, C64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sy: C64 = y.iter().sum();
    let sxy: C64 = x.iter().zip(y).map(|(a, b)| b * *a).sum();
    let det = n * sxx - sx * sx;
    let c1 = (sxy * n - sy * sx) / det;
    let c0 = (sy - c1 * sx) / n;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - c0 - c1 * *a).norm_sqr()).sum();
    (c0, c1, (rss / n).sqrt())
}

/// Least-squares fit `y ~ sum_k c_k x^k`, `k = 0..=deg`, complex data on a
/// real design. The abscissae are scaled by their largest magnitude before
/// solving. Returns the coefficients and the rms residual.
pub fn fit_poly(x: &[f64], y: &[C64], deg: usize) -> (Vec<C64>, f64) {
    assert_eq!(x.len(), y.len());
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let a = RMat::from_fn(x.len(), deg + 1, |i, k| (x[i] / scale).powi(k as i32));
    let svd = a.clone().svd(true, true);
    let solve = |rhs: DVector<f64>| svd.solve(&rhs, 1e-14).expect("svd with both factors");
    let re = solve(DVector::from_iterator(y.len(), y.iter().map(|z| z.re)));
    let im = solve(DVector::from_iterator(y.len(), y.iter().map(|z| z.im)));
    let coeffs: Vec<C64> = (0..=deg).map(|k| C64::new(re[k], im[k]) / scale.powi(k as i32)).collect();
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, yi)| {
            let p: C64 = coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * xi + c);
            (yi - p).norm_sqr()
        })
        .sum();
    (coeffs, (rss / x.len() as f64).sqrt())
}
