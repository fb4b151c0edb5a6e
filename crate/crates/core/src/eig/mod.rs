//! Dense complex eigensolver for small matrices and eigenvalue-branch
//! tracking over frequency grids.
//!
//! The production route is balancing, Householder reduction to Hessenberg
//! form and shifted QR with deflation. The characteristic polynomial
//! ([`charpoly`]) and the Aberth root finder ([`roots`]) form an independent
//! route used for cross-checks.

pub mod charpoly;
mod qr;
pub mod roots;
pub mod tracking;

pub use tracking::{track_branches, track_branches_with, track_two_sided, FnFamily, MatrixFamily, SpectrumCurve};

use crate::linalg::{fro, to_complex, CMat, RMat};
use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// Eigenvalues, optionally eigenvectors, and the achieved backward error
/// `max_k |A v_k - lambda_k v_k| / (|A|_F |v_k|)`.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Option<CMat>,
    pub backward_error: f64,
}

/// Eigenvalues of a square complex matrix.
pub fn eigenvalues(m: &CMat) -> Result<EigenResult> {
    eigen(m, false)
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues_real(m: &RMat) -> Result<EigenResult> {
    eigen(&to_complex(m), false)
}

/// Eigenvalues and (if `want_vectors`) unit eigenvectors as columns.
pub fn eigen(m: &CMat, want_vectors: bool) -> Result<EigenResult> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Input(format!(
            "eigensolver needs a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }

    let mut h = m.clone();
    let d = qr::balance(&mut h);
    let mut z = qr::hessenberg(&mut h);
    if let Err(stall) = qr::schur(&mut h, &mut z, 100 * n) {
        return Err(Error::Convergence {
            iterations: stall.iterations,
            n,
            found: stall.found.len(),
            partial: stall.found.iter().map(|v| (v.re, v.im)).collect(),
        });
    }
    let eigenvalues: Vec<C64> = (0..n).map(|i| h[(i, i)]).collect();

    // Eigenvectors of the original matrix: D Z x.
    let x = qr::triangular_eigenvectors(&h);
    let mut v = &z * x;
    for i in 0..n {
        for k in 0..n {
            v[(i, k)] *= d[i];
        }
    }
    for k in 0..n {
        let nrm = v.column(k).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            for i in 0..n {
                v[(i, k)] /= nrm;
            }
        }
    }

    let anorm = fro(m);
    let mut backward_error: f64 = 0.0;
    if anorm > 0.0 {
        let av = m * &v;
        for k in 0..n {
            let mut r = 0.0;
            for i in 0..n {
                r += (av[(i, k)] - eigenvalues[k] * v[(i, k)]).norm_sqr();
            }
            backward_error = backward_error.max(r.sqrt() / anorm);
        }
    }

    Ok(EigenResult { eigenvalues, eigenvectors: want_vectors.then_some(v), backward_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::match_sets;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 1.0), c(-3.0, 0.0)]));
        let r = eigenvalues(&m).unwrap();
        let (_, worst) = match_sets(&r.eigenvalues, &[c(1.0, 0.0), c(2.0, 1.0), c(-3.0, 0.0)]);
        assert!(worst < 1e-14);
    }

    #[test]
    fn jordan_block_does_not_fail() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let r = eigen(&m, true).unwrap();
        assert!(r.eigenvalues.iter().all(|z| z.norm() < 1e-14));
        assert!(r.backward_error < 1e-10);
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let r = eigenvalues(&m).unwrap();
        assert!(r.eigenvalues.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn one_by_one_and_zero() {
        let r = eigenvalues(&CMat::from_element(1, 1, c(2.0, -1.0))).unwrap();
        assert_eq!(r.eigenvalues, vec![c(2.0, -1.0)]);
        let r = eigenvalues(&CMat::zeros(3, 3)).unwrap();
        assert!(r.eigenvalues.iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(eigenvalues(&CMat::zeros(2, 3)), Err(Error::Input(_))));
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(eigenvalues(&m), Err(Error::Input(_))));
    }

    #[test]
    fn companion_matrix_roots() {
        // roots 1, 2, 3, 4: lambda^4 - 10 lambda^3 + 35 lambda^2 - 50 lambda + 24
        let coeffs = [24.0, -50.0, 35.0, -10.0];
        let mut m = CMat::zeros(4, 4);
        for i in 1..4 {
            m[(i, i - 1)] = c(1.0, 0.0);
        }
        for i in 0..4 {
            m[(i, 3)] = c(-coeffs[i], 0.0);
        }
        let r = eigen(&m, true).unwrap();
        let (_, worst) = match_sets(&r.eigenvalues, &[1.0, 2.0, 3.0, 4.0].map(|x| c(x, 0.0)));
        assert!(worst < 1e-10, "worst {worst}");
        assert!(r.backward_error < 1e-12);
    }

    #[test]
    fn badly_scaled_matrix_keeps_small_eigenvalue() {
        // eigenvalues -2, 1e-12 and 1e4 i after balancing are resolved to
        // relative accuracy
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                c(-2.0, 0.0),
                c(0.0, 0.0),
                c(1e-3, 0.0),
                c(0.0, 0.0),
                c(1e-12, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 1e4),
            ],
        );
        let r = eigenvalues(&m).unwrap();
        let small = r.eigenvalues.iter().min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
        assert!((small.re - 1e-12).abs() < 1e-24);
    }
}
