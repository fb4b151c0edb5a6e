//! Turing bifurcation in a three-field vasculogenesis model
//!
//! ```text
//! rho_t + (rho u)_x = mu rho_xx
//! (rho u)_t + (rho u^2)_x + P(rho)_x - beta rho c_x = nu u_xx - gamma rho u
//! c_t = D c_xx + alpha rho - c / tau
//! ```
//!
//! with `P = A rho^2`, linearized about `(rho, u, c) = (1, 0, alpha tau)`.

use crate::asymptotics::coeffs_numerical_fit;
use crate::eig::{eigenvalues, track_two_sided, FnFamily};
use crate::exec::{self, Execution};
use crate::linalg::{log_space, CMat};
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VasculoParams {
    pub alpha_r: f64,
    pub beta_r: f64,
    pub tau: f64,
    #[serde(rename = "A_p")]
    pub a_p: f64,
    pub gamma_d: f64,
    #[serde(rename = "D_c")]
    pub d_c: f64,
    #[serde(default)]
    pub mu_v: f64,
    #[serde(default)]
    pub nu_v: f64,
}

impl VasculoParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("alpha_r", self.alpha_r),
            ("beta_r", self.beta_r),
            ("A_p", self.a_p),
            ("gamma_d", self.gamma_d),
            ("mu_v", self.mu_v),
            ("nu_v", self.nu_v),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return Err(Error::Input(format!("{name} = {v} must be nonnegative")));
            }
        }
        for (name, v) in [("tau", self.tau), ("D_c", self.d_c)] {
            if !(v > 0.0) {
                return Err(Error::Input(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Equilibrium `(rho0, u0, c0)`.
    pub fn equilibrium(&self) -> [f64; 3] {
        [1.0, 0.0, self.alpha_r * self.tau]
    }

    /// Exact second-order coefficient of the critical branch,
    /// `(alpha beta tau - 2A)/gamma - mu`.
    pub fn theta_exact(&self) -> f64 {
        (self.alpha_r * self.beta_r * self.tau - 2.0 * self.a_p) / self.gamma_d - self.mu_v
    }

    /// Largest term of `theta_exact`.
    pub fn theta_scale(&self) -> f64 {
        let g = self.gamma_d;
        (self.alpha_r * self.beta_r * self.tau / g).max(2.0 * self.a_p / g).max(self.mu_v)
    }

    /// The simplified form `alpha beta tau - A`, kept for comparison.
    pub fn theta_simplified(&self) -> f64 {
        self.alpha_r * self.beta_r * self.tau - self.a_p
    }

    fn with_product(&self, product: f64) -> Self {
        VasculoParams { beta_r: product / self.alpha_r, ..*self }
    }
}

/// `L0 + i k L1 - k^2 L2` on `(rho, u, c)`.
pub fn vasculo_symbol(p: &VasculoParams, k: f64) -> CMat {
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let ik = |x: f64| C64::new(0.0, k * x);
    let k2 = k * k;
    CMat::from_row_slice(
        3,
        3,
        &[
            r(-p.mu_v * k2),
            ik(-1.0),
            z,
            ik(-2.0 * p.a_p),
            r(-p.gamma_d - p.nu_v * k2),
            ik(p.beta_r),
            r(p.alpha_r),
            z,
            r(-1.0 / p.tau - p.d_c * k2),
        ],
    )
}

/// Eigenvalues when `alpha beta = 0`, where the symbol is block triangular:
/// `-1/tau - D k^2` and the roots of
/// `l^2 + (gamma + (mu+nu) k^2) l + mu k^2 (gamma + nu k^2) + 2 A k^2`.
pub fn decoupled_spectrum(p: &VasculoParams, k: f64) -> [C64; 3] {
    let k2 = k * k;
    let b = p.gamma_d + (p.mu_v + p.nu_v) * k2;
    let c = p.mu_v * k2 * (p.gamma_d + p.nu_v * k2) + 2.0 * p.a_p * k2;
    let disc = C64::new(b * b - 4.0 * c, 0.0).sqrt();
    [C64::new(-1.0 / p.tau - p.d_c * k2, 0.0), (C64::new(-b, 0.0) + disc) / 2.0, (C64::new(-b, 0.0) - disc) / 2.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaReport {
    pub theta_fit: f64,
    pub theta_exact: f64,
    pub theta_simplified: f64,
    pub fit_residual: f64,
    /// Fit within 5% of the exact value, measured against the largest of its
    /// terms so that a vanishing `theta` is not judged relatively.
    pub agrees: bool,
    /// `theta < 0`: diffusively stable near `k = 0`.
    pub stable_near_zero: bool,
}

/// Fits `lambda(k) ~ theta k^2` to the branch through the origin over
/// `|k| <= k_window`.
pub fn critical_branch_coefficient(p: &VasculoParams, k_window: f64) -> Result<ThetaReport> {
    p.validate()?;
    if !(p.gamma_d > 0.0) {
        return Err(Error::Input("gamma_d must be positive for a spectral gap at k = 0".into()));
    }
    let fam = FnFamily { dim: 3, f: |k: f64| vasculo_symbol(p, k) };
    let curve = track_two_sided(&fam, k_window, 16, Execution::Sequential)?;
    let fit = coeffs_numerical_fit(&curve, 0, k_window)?;
    let exact = p.theta_exact();
    Ok(ThetaReport {
        theta_fit: fit.mu,
        theta_exact: exact,
        theta_simplified: p.theta_simplified(),
        fit_residual: fit.residual,
        agrees: (fit.mu - exact).abs() <= 0.05 * p.theta_scale(),
        stable_near_zero: fit.mu < 0.0,
    })
}

/// Default fit window, well inside the spectral gap.
pub fn default_k_window(p: &VasculoParams) -> f64 {
    0.05 * p.gamma_d.min(1.0 / p.tau).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnsetKind {
    LongWave,
    FiniteK,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub product: f64,
    pub theta_fit: f64,
    pub max_re: f64,
    pub k_at_max: f64,
    pub unstable: bool,
    pub kind: Option<OnsetKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationReport {
    pub lo: f64,
    pub hi: f64,
    /// Critical `alpha beta`, absent for a single-point range.
    pub critical_product: Option<f64>,
    pub k_star: Option<f64>,
    pub kind: Option<OnsetKind>,
    pub evaluations: usize,
    pub at_lo: Classification,
    pub at_hi: Classification,
}

/// Wavenumber grid used for finite-k detection.
pub fn k_grid(p: &VasculoParams) -> Vec<f64> {
    let kmax = 10.0 * (1.0 / p.d_c.sqrt()).max(1.0);
    log_space(1e-3, kmax, 400)
}

/// Stability at one value of `alpha beta` (with `alpha` fixed).
pub fn classify(p: &VasculoParams, product: f64, exec: Execution) -> Result<Classification> {
    let q = p.with_product(product);
    let theta = critical_branch_coefficient(&q, default_k_window(&q))?.theta_fit;
    let grid = k_grid(&q);
    let res = exec::try_map(exec, &grid, |&k| -> Result<f64> {
        let ev = eigenvalues(&vasculo_symbol(&q, k)).map_err(|e| e.at_sigma(k))?.eigenvalues;
        Ok(ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
    })?;
    let (imax, max_re) =
        res.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let finite = max_re > 1e-10;
    // a band whose peak sits inside the long-wave window is attached to the
    // origin; at onset the k^4 term can tip it before theta changes sign
    let long = theta > 0.0 || (finite && grid[imax] <= default_k_window(&q));
    let kind = if long {
        Some(OnsetKind::LongWave)
    } else if finite {
        Some(OnsetKind::FiniteK)
    } else {
        None
    };
    Ok(Classification { product, theta_fit: theta, max_re, k_at_max: grid[imax], unstable: long || finite, kind })
}

/// Bisects `alpha beta` over `[lo, hi]` for the first loss of stability.
pub fn bifurcation_locate(p: &VasculoParams, range: (f64, f64), exec: Execution) -> Result<BifurcationReport> {
    p.validate()?;
    let (lo, hi) = range;
    if !(p.alpha_r > 0.0) || !(lo >= 0.0) || !(hi >= lo) {
        return Err(Error::Input(format!(
            "need alpha_r > 0 and 0 <= lo <= hi, got alpha_r = {}, [{lo}, {hi}]",
            p.alpha_r
        )));
    }
    let at_lo = classify(p, lo, exec)?;
    if lo == hi {
        return Ok(BifurcationReport {
            lo,
            hi,
            critical_product: None,
            k_star: None,
            kind: at_lo.kind,
            evaluations: 1,
            at_hi: at_lo.clone(),
            at_lo,
        });
    }
    if at_lo.unstable {
        return Err(Error::Input(format!("alpha beta = {lo} is already unstable")));
    }
    let at_hi = classify(p, hi, exec)?;
    if !at_hi.unstable {
        return Err(Error::NoBifurcation { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut top = at_hi.clone();
    let mut evaluations = 2;
    while b - a > 1e-10 * hi.max(1.0) && evaluations < 100 {
        let mid = 0.5 * (a + b);
        let c = classify(p, mid, exec)?;
        evaluations += 1;
        if c.unstable {
            b = mid;
            top = c;
        } else {
            a = mid;
        }
    }
    let kind = top.kind;
    let k_star = match kind {
        Some(OnsetKind::LongWave) => 0.0,
        _ => top.k_at_max,
    };
    Ok(BifurcationReport {
        lo,
        hi,
        critical_product: Some(0.5 * (a + b)),
        k_star: Some(k_star),
        kind,
        evaluations,
        at_lo,
        at_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::match_sets;

    fn unit(a_p: f64) -> VasculoParams {
        VasculoParams { alpha_r: 1.0, beta_r: 1.0, tau: 1.0, a_p, gamma_d: 1.0, d_c: 1.0, mu_v: 0.0, nu_v: 0.0 }
    }

    #[test]
    fn spectrum_at_zero_wavenumber() {
        let p = VasculoParams { gamma_d: 0.7, tau: 2.5, ..unit(2.0) };
        let mut ev: Vec<f64> =
            eigenvalues(&vasculo_symbol(&p, 0.0)).unwrap().eigenvalues.iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in ev.iter().zip([-0.7, -0.4, 0.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_closed_form() {
        let p = VasculoParams { beta_r: 0.0, mu_v: 0.1, nu_v: 0.2, ..unit(2.0) };
        for k in [0.0, 0.1, 0.3, 1.0, 5.0] {
            let ev = eigenvalues(&vasculo_symbol(&p, k)).unwrap().eigenvalues;
            let (_, worst) = match_sets(&ev, &decoupled_spectrum(&p, k));
            assert!(worst < 1e-10, "k = {k}: {worst}");
        }
    }

    #[test]
    fn long_wave_coefficient() {
        // alpha = beta = tau = gamma = 1, A = 2: theta = (1 - 4)/1 = -3
        let r = critical_branch_coefficient(&unit(2.0), 0.01).unwrap();
        assert!((r.theta_fit + 3.0).abs() < 1e-3, "{r:?}");
        assert!(r.agrees && r.stable_near_zero);
        assert_eq!(r.theta_simplified, -1.0);
        // A = 0.5 sits exactly on the long-wave boundary
        let r = critical_branch_coefficient(&unit(0.5), 0.01).unwrap();
        assert!(r.theta_fit.abs() < 1e-3, "{r:?}");
        // alpha beta = 0: theta = -2A/gamma
        let r = critical_branch_coefficient(&VasculoParams { beta_r: 0.0, ..unit(1.5) }, 0.01).unwrap();
        assert!((r.theta_fit + 3.0).abs() < 1e-3 && r.stable_near_zero);
    }

    #[test]
    fn onset_with_viscosity() {
        let p = VasculoParams { mu_v: 0.1, nu_v: 0.1, ..unit(1.0) };
        let r = bifurcation_locate(&p, (0.5, 5.0), Execution::default()).unwrap();
        let x = r.critical_product.unwrap();
        // (alpha beta tau - 2A)/gamma = mu
        assert!((x - 2.1).abs() < 1e-3, "{r:?}");
        assert_eq!(r.kind, Some(OnsetKind::LongWave), "{r:?}");
        assert_eq!(r.k_star, Some(0.0));
    }

    #[test]
    fn locator_edge_cases() {
        let p = VasculoParams { mu_v: 0.1, nu_v: 0.1, ..unit(1.0) };
        assert!(matches!(bifurcation_locate(&p, (0.1, 1.0), Execution::Sequential), Err(Error::NoBifurcation { .. })));
        let r = bifurcation_locate(&p, (3.0, 3.0), Execution::Sequential).unwrap();
        assert!(r.critical_product.is_none() && r.at_lo.unstable && r.evaluations == 1);
    }

    #[test]
    fn params_from_json() {
        let p: VasculoParams =
            serde_json::from_str(r#"{"alpha_r":1,"beta_r":2,"tau":1,"A_p":1,"gamma_d":1,"D_c":1}"#).unwrap();
        assert_eq!(p.mu_v, 0.0);
        assert_eq!(p.equilibrium(), [1.0, 0.0, 1.0]);
        assert!(serde_json::from_str::<VasculoParams>(r#"{"alpha_r":1}"#).is_err());
        assert!(VasculoParams { tau: 0.0, ..p }.validate().is_err());
    }
}
