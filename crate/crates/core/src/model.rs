//! Model coefficients, the wave family and the quantities derived from it.

use crate::eig::eigenvalues_real;
use crate::linalg::{is_singular, RMat};
use crate::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex64 as C64;

/// Coefficient set of the amplitude system with `m` conservation laws.
///
/// `d` is a row vector, `g` and `h` are column vectors, `e_b` and `f` are
/// `m x m`. Construct through [`ModelParams::new`] to get the dimension
/// check; the fields stay public so sweeps can vary single coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: Vec<C64>,
    pub e_b: RMat,
    pub f: RMat,
    pub g: Vec<C64>,
    pub h: Vec<f64>,
    pub epsilon: f64,
    pub m: usize,
}

/// A structural hypothesis on the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    ParabolicA,
    PositiveB,
    Supercritical,
    RealFluxSpectrum,
    PositiveDiffusion,
    PositiveEpsilon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub hypothesis: Hypothesis,
    /// The offending number (the real part, the largest imaginary part, ...).
    pub value: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, h: Hypothesis) -> bool {
        self.violations.iter().any(|v| v.hypothesis == h)
    }
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: C64,
        b: C64,
        c: C64,
        d: Vec<C64>,
        e_b: RMat,
        f: RMat,
        g: Vec<C64>,
        h: Vec<f64>,
        epsilon: f64,
    ) -> Result<Self> {
        let p = ModelParams { a, b, c, m: d.len(), d, e_b, f, g, h, epsilon };
        p.check_dimensions()?;
        Ok(p)
    }

    /// Single conservation law.
    #[allow(clippy::too_many_arguments)]
    pub fn scalar(a: C64, b: C64, c: C64, d: C64, e_b: f64, f: f64, g: C64, h: f64, epsilon: f64) -> Self {
        ModelParams {
            a,
            b,
            c,
            d: vec![d],
            e_b: RMat::from_element(1, 1, e_b),
            f: RMat::from_element(1, 1, f),
            g: vec![g],
            h: vec![h],
            epsilon,
            m: 1,
        }
    }

    /// The scalar benchmark set a=1+i, b=1, c=-3+2i, d=-1+2i, e_B=1, f=1,
    /// g=2+2i, h=2.
    pub fn benchmark(epsilon: f64) -> Self {
        ModelParams::scalar(
            C64::new(1.0, 1.0),
            C64::new(1.0, 0.0),
            C64::new(-3.0, 2.0),
            C64::new(-1.0, 2.0),
            1.0,
            1.0,
            C64::new(2.0, 2.0),
            2.0,
            epsilon,
        )
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let m = self.m;
        if m == 0 {
            return Err(Error::Dimension("m must be positive".into()));
        }
        let fail =
            |what: &str, got: String| Err(Error::Dimension(format!("{what}: expected length/shape {m}, got {got}")));
        if self.d.len() != m {
            return fail("d", self.d.len().to_string());
        }
        if self.g.len() != m {
            return fail("g", self.g.len().to_string());
        }
        if self.h.len() != m {
            return fail("h", self.h.len().to_string());
        }
        if self.e_b.shape() != (m, m) {
            return fail("e_B", format!("{:?}", self.e_b.shape()));
        }
        if self.f.shape() != (m, m) {
            return fail("f", format!("{:?}", self.f.shape()));
        }
        Ok(())
    }

    pub fn d_re(&self) -> Vec<f64> {
        self.d.iter().map(|z| z.re).collect()
    }

    pub fn d_im(&self) -> Vec<f64> {
        self.d.iter().map(|z| z.im).collect()
    }

    /// `d . v` for a real vector `v`.
    pub fn d_dot(&self, v: &[f64]) -> C64 {
        self.d.iter().zip(v).map(|(d, x)| d * *x).sum()
    }

    /// `f^-1 h`, or an error when `f` is singular.
    pub fn f_inv_h(&self) -> Result<Vec<f64>> {
        if is_singular(&self.f) {
            return Err(Error::SingularFlux);
        }
        let sol = self.f.clone().lu().solve(&DVector::from_column_slice(&self.h)).ok_or(Error::SingularFlux)?;
        Ok(sol.iter().cloned().collect())
    }
}

/// Checks every structural hypothesis on the coefficients. Dimension
/// mismatches are hard errors; violated hypotheses are listed.
pub fn validate_model(params: &ModelParams) -> Result<ValidationReport> {
    params.check_dimensions()?;
    let mut v = Vec::new();
    let mut push = |hypothesis, value: f64, message: String| v.push(Violation { hypothesis, value, message });
    if !(params.a.re > 0.0) {
        push(Hypothesis::ParabolicA, params.a.re, format!("Re(a)>0 fails: Re(a) = {}", params.a.re));
    }
    if !(params.b.re > 0.0) {
        push(Hypothesis::PositiveB, params.b.re, format!("Re(b)>0 fails: Re(b) = {}", params.b.re));
    }
    if !(params.c.re < 0.0) {
        push(Hypothesis::Supercritical, params.c.re, format!("Re(c)<0 fails: Re(c) = {}", params.c.re));
    }
    if !(params.epsilon > 0.0) {
        push(Hypothesis::PositiveEpsilon, params.epsilon, format!("epsilon>0 fails: epsilon = {}", params.epsilon));
    }
    let spec_f = eigenvalues_real(&params.f)?.eigenvalues;
    let worst_im = spec_f.iter().map(|z| z.im.abs() / (1.0 + z.norm())).fold(0.0, f64::max);
    if worst_im > 1e-10 {
        let im = spec_f.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        push(Hypothesis::RealFluxSpectrum, im, format!("spec(f) not real: max |Im| = {im}"));
    }
    let spec_e = eigenvalues_real(&params.e_b)?.eigenvalues;
    let min_re = spec_e.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if !(min_re > 0.0) {
        push(Hypothesis::PositiveDiffusion, min_re, format!("Re spec(e_B)>0 fails: min Re = {min_re}"));
    }
    Ok(ValidationReport { violations: v })
}

/// `kappa_E^2 = (Re b + Re(d) . B0) / Re a`. A negative value means the
/// existence range is empty.
pub fn existence_bound(params: &ModelParams, b0: &[f64]) -> f64 {
    (params.b.re + params.d_dot(b0).re) / params.a.re
}

/// A wave of the family: wavenumber and mean-mode offset.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveParams {
    pub kappa: f64,
    pub b0: Vec<f64>,
}

impl WaveParams {
    /// Checks `kappa^2 < kappa_E^2`.
    pub fn new(params: &ModelParams, kappa: f64, b0: Vec<f64>) -> Result<Self> {
        if b0.len() != params.m {
            return Err(Error::Dimension(format!("B0: expected length {}, got {}", params.m, b0.len())));
        }
        let bound = existence_bound(params, &b0);
        if !(kappa * kappa < bound) {
            return Err(Error::Existence { kappa2: kappa * kappa, bound });
        }
        Ok(WaveParams { kappa, b0 })
    }

    /// Wave with `B0 = 0`.
    pub fn at(params: &ModelParams, kappa: f64) -> Result<Self> {
        WaveParams::new(params, kappa, vec![0.0; params.m])
    }
}

/// Every scalar the linearization needs, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedQuantities {
    pub kappa: f64,
    pub a0: f64,
    pub a0_sq: f64,
    /// Temporal frequency for the wave `A0 exp(i(kappa x - omega t))`.
    pub omega: f64,
    pub b_tilde: C64,
    pub b_hat: C64,
    pub c_hat: C64,
    pub p: Vec<f64>,
    pub q: f64,
    pub q_hat: f64,
    /// Jordan coupling `A0 (Im d + q Re d)`, one entry per mean mode.
    pub r: Vec<f64>,
    pub effective_flux: RMat,
    pub m0: f64,
    /// `f^-1 h`.
    pub f_inv_h: Vec<f64>,
}

/// Derives amplitude, frequency and the reduced coefficients of a wave.
pub fn derive_wave(params: &ModelParams, wave: &WaveParams) -> Result<DerivedQuantities> {
    params.check_dimensions()?;
    if wave.b0.len() != params.m {
        return Err(Error::Dimension(format!("B0: expected length {}, got {}", params.m, wave.b0.len())));
    }
    let (a, c) = (params.a, params.c);
    let kappa = wave.kappa;
    let bound = existence_bound(params, &wave.b0);
    if !(kappa * kappa < bound) {
        return Err(Error::Existence { kappa2: kappa * kappa, bound });
    }
    let b_tilde = params.b + params.d_dot(&wave.b0);
    let a0_sq = (b_tilde.re - a.re * kappa * kappa) / (-c.re);
    if !(a0_sq > 0.0) {
        return Err(Error::Existence { kappa2: kappa * kappa, bound });
    }
    let a0 = a0_sq.sqrt();
    let omega = a.im * kappa * kappa - b_tilde.im - c.im * a0_sq;

    let f_inv_h = params.f_inv_h()?;
    let d_finv_h = params.d_dot(&f_inv_h);
    let c_hat = c - d_finv_h;
    let b_hat = b_tilde + d_finv_h * a0_sq;

    let p: Vec<f64> = params.d.iter().map(|d| -d.re / (2.0 * a0 * c.re)).collect();
    let q = -c.im / c.re;
    let q_hat = -c_hat.im / c_hat.re;
    let r: Vec<f64> = params.d.iter().map(|d| a0 * (d.im + q * d.re)).collect();
    let m = params.m;
    let effective_flux = RMat::from_fn(m, m, |i, j| params.f[(i, j)] - params.h[i] * params.d[j].re / c.re);

    Ok(DerivedQuantities {
        kappa,
        a0,
        a0_sq,
        omega,
        b_tilde,
        b_hat,
        c_hat,
        p,
        q,
        q_hat,
        r,
        effective_flux,
        m0: 2.0 * a0_sq * c.re,
        f_inv_h,
    })
}

impl DerivedQuantities {
    /// `f + 2 A0 h p`, the defining form of the effective flux.
    pub fn effective_flux_from_p(&self, params: &ModelParams) -> RMat {
        let m = params.m;
        RMat::from_fn(m, m, |i, j| params.f[(i, j)] + 2.0 * self.a0 * params.h[i] * self.p[j])
    }

    /// Residual of `-i omega = -a kappa^2 + b~ + c A0^2`.
    pub fn dispersion_residual(&self, params: &ModelParams) -> f64 {
        let k2 = self.kappa * self.kappa;
        (C64::new(0.0, -self.omega) - (-params.a * k2 + self.b_tilde + params.c * self.a0_sq)).norm()
    }
}

/// Outcome of the mean-mode compatibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    pub holds: bool,
    /// Largest real part over the grid.
    pub worst: f64,
    /// `(z, max Re spec)` per grid point.
    pub per_z: Vec<(f64, f64)>,
}

/// Checks `Re spec(i z f - z^2 e_B) < 0` on a grid of nonzero `z`.
pub fn compat_check(params: &ModelParams, z_grid: &[f64]) -> Result<CompatReport> {
    params.check_dimensions()?;
    if z_grid.is_empty() {
        return Err(Error::Input("compatibility grid is empty".into()));
    }
    if let Some(z) = z_grid.iter().find(|z| **z == 0.0 || !z.is_finite()) {
        return Err(Error::Input(format!("compatibility grid contains z = {z}")));
    }
    let mut per_z = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let sym = params.f.map(|x| C64::new(0.0, z * x)) - params.e_b.map(|x| C64::new(z * z * x, 0.0));
        let ev = crate::eig::eigenvalues(&sym)?.eigenvalues;
        per_z.push((z, ev.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)));
    }
    let worst = per_z.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(CompatReport { holds: worst < 0.0, worst, per_z })
}
