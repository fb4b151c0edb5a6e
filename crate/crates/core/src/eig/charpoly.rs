//! Characteristic polynomial by the Faddeev-LeVerrier recursion.
//!
//! Numerically this is only reliable for small, moderately scaled matrices,
//! which is exactly where it serves as an independent check on the QR route.

use crate::linalg::CMat;
use num_complex::Complex64 as C64;

/// Coefficients of `det(lambda I - A)`, lowest degree first; the last entry
/// is 1.
pub fn characteristic_polynomial(a: &CMat) -> Vec<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let eye = CMat::identity(n, n);
    let mut mk = CMat::zeros(n, n);
    for k in 1..=n {
        mk = a * &mk + &eye * coeffs[n - k + 1];
        let am = a * &mk;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

/// Horner evaluation of a polynomial with coefficients lowest degree first.
pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}
