//! Balancing, Householder reduction to Hessenberg form and the single-shift
//! complex QR iteration to Schur form.

use crate::linalg::CMat;
use num_complex::Complex64 as C64;

/// Subdiagonal entries below this fraction of the adjacent diagonal mass
/// are set to zero.
pub(crate) const DEFLATION_TOL: f64 = 1e-14;

fn l1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity `A <- D^-1 A D` with power-of-two entries, so the
/// scaling itself is exact. Returns `D`.
pub(crate) fn balance(a: &mut CMat) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut d = vec![1.0; n];
    for _sweep in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[(j, i)]);
                    r += l1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    d
}

/// Reduces `a` to upper Hessenberg form in place and returns the unitary
/// `Q` with `A_in = Q H Q^*`.
pub(crate) fn hessenberg(a: &mut CMat) -> CMat {
    let n = a.nrows();
    let mut q = CMat::identity(n, n);
    if n < 3 {
        return q;
    }
    for k in 0..n - 2 {
        let len = n - k - 1;
        let xnorm = (0..len).map(|i| a[(k + 1 + i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vn2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vn2;
        // A <- P A
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..len {
                s += v[i].conj() * a[(k + 1 + i, j)];
            }
            s *= beta;
            for i in 0..len {
                a[(k + 1 + i, j)] -= v[i] * s;
            }
        }
        // A <- A P and Q <- Q P
        for m in [&mut *a, &mut q] {
            for i in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..len {
                    s += m[(i, k + 1 + j)] * v[j];
                }
                s *= beta;
                for j in 0..len {
                    m[(i, k + 1 + j)] -= s * v[j].conj();
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    q
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn rotate_rows(h: &mut CMat, k: usize, c: f64, s: C64) {
    for j in 0..h.ncols() {
        let x = h[(k, j)];
        let y = h[(k + 1, j)];
        h[(k, j)] = x * c + s * y;
        h[(k + 1, j)] = -s.conj() * x + y * c;
    }
}

fn rotate_cols(h: &mut CMat, k: usize, c: f64, s: C64) {
    for i in 0..h.nrows() {
        let x = h[(i, k)];
        let y = h[(i, k + 1)];
        h[(i, k)] = x * c + y * s.conj();
        h[(i, k + 1)] = -x * s + y * c;
    }
}

/// Failure record: iterations spent and eigenvalues already deflated.
pub(crate) struct Stalled {
    pub iterations: usize,
    pub found: Vec<C64>,
}

/// Drives the Hessenberg matrix `h` to upper triangular Schur form,
/// accumulating the rotations into `z`.
pub(crate) fn schur(h: &mut CMat, z: &mut CMat, max_iter: usize) -> Result<(), Stalled> {
    let n = h.nrows();
    if n <= 1 {
        return Ok(());
    }
    let scale = h.iter().map(|v| l1(*v)).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut its = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = l1(h[(l, l - 1)]);
            let mut s = l1(h[(l, l)]) + l1(h[(l - 1, l - 1)]);
            if s == 0.0 {
                s = scale;
            }
            if sub <= DEFLATION_TOL * s || sub < f64::MIN_POSITIVE {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= max_iter {
            return Err(Stalled { iterations: total, found: (hi + 1..n).map(|i| h[(i, i)]).collect() });
        }
        total += 1;
        its += 1;

        let mu = if its % 10 == 0 {
            // exceptional shift to break cycles
            let row = if its % 20 == 0 { hi } else { l + 1 };
            h[(row, row)] + 0.75 * h[(row, row - 1)].re.abs()
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        let (c, s) = givens(h[(l, l)] - mu, h[(l + 1, l)]);
        rotate_rows(h, l, c, s);
        rotate_cols(h, l, c, s);
        rotate_cols(z, l, c, s);
        for k in l + 1..hi {
            let (c, s) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
            rotate_rows(h, k, c, s);
            rotate_cols(h, k, c, s);
            rotate_cols(z, k, c, s);
            h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
        }
    }
    Ok(())
}

/// Eigenvectors of an upper triangular matrix by back substitution, one
/// column per diagonal entry. Near-equal diagonal entries are separated by a
/// tiny floor so defective inputs still return a usable vector.
pub(crate) fn triangular_eigenvectors(t: &CMat) -> CMat {
    let n = t.nrows();
    let tn = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let smin = (f64::EPSILON * tn).max(f64::MIN_POSITIVE);
    let mut x = CMat::zeros(n, n);
    for k in 0..n {
        x[(k, k)] = C64::new(1.0, 0.0);
        let lam = t[(k, k)];
        for j in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for l in j + 1..=k {
                s += t[(j, l)] * x[(l, k)];
            }
            let mut den = t[(j, j)] - lam;
            if den.norm() < smin {
                den = C64::new(smin, 0.0);
            }
            x[(j, k)] = -s / den;
        }
        let nrm = (0..=k).map(|i| x[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 && nrm.is_finite() {
            for i in 0..=k {
                x[(i, k)] /= nrm;
            }
        }
    }
    x
}
