//! Simultaneous polynomial root finding (Aberth-Ehrlich iteration).

use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// All roots of `sum_k coeffs[k] z^k`. Trailing (highest-degree) zeros are
/// stripped; a zero polynomial is an input error.
pub fn aberth(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == C64::new(0.0, 0.0) {
        deg -= 1;
    }
    if deg == 0 {
        return Err(Error::Input("zero polynomial has no isolated roots".into()));
    }
    let p: Vec<C64> = coeffs[..deg].iter().map(|c| c / coeffs[deg - 1]).collect();
    let n = deg - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let dp: Vec<C64> = (1..=n).map(|k| p[k] * k as f64).collect();

    // Initial guesses on a circle sized by the Fujiwara-type bound.
    let radius = (0..n).map(|k| p[k].norm().powf(1.0 / (n - k) as f64)).fold(0.0, f64::max).max(1e-300);
    let mut z: Vec<C64> =
        (0..n).map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4)).collect();

    let horner = |c: &[C64], x: C64| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * x + a);
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let pk = horner(&p, z[k]);
            if pk == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pk / horner(&dp, z[k]);
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    sum += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / z[k].norm().max(f64::MIN_POSITIVE));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::match_sets;

    #[test]
    fn cubic_with_known_roots() {
        let r = [C64::new(1.0, 0.0), C64::new(-2.0, 1.0), C64::new(0.5, -3.0)];
        // (z - r0)(z - r1)(z - r2)
        let mut c = vec![C64::new(1.0, 0.0)];
        for root in r {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * root;
            }
            c = next;
        }
        let z = aberth(&c).unwrap();
        let (_, worst) = match_sets(&z, &r);
        assert!(worst < 1e-12, "worst {worst}");
    }

    #[test]
    fn double_root_converges() {
        // (z-1)^2 (z+2)
        let c = [2.0, -3.0, 0.0, 1.0].map(|x| C64::new(x, 0.0));
        let z = aberth(&c).unwrap();
        let (_, worst) = match_sets(&z, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-2.0, 0.0)]);
        assert!(worst < 1e-6);
    }

    #[test]
    fn zero_polynomial_is_error() {
        assert!(aberth(&[C64::new(0.0, 0.0)]).is_err());
    }
}
