//! Linearized Fourier symbols.
//!
//! The full symbol about a wave is `M(sigma) = C0 + i sigma C1 - sigma^2 C2`
//! on the state `(u, v, w)` = (amplitude modulus, phase, mean modes), with
//! the `eps^-1` couplings baked into `C1`. The Darcy symbol is its `2 x 2`
//! reduction obtained by slaving the mean modes to the amplitude.

use crate::eig::MatrixFamily;
use crate::linalg::{CMat, RMat};
use crate::model::{DerivedQuantities, ModelParams};
use crate::Result;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

/// Real coefficient matrices of a quadratic matrix symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTriple {
    pub c0: RMat,
    pub c1: RMat,
    pub c2: RMat,
    pub epsilon: f64,
    /// The `eps^-1` part of `C1`: `C1 = S / eps + (C1 - S / eps)`.
    pub c1_singular: RMat,
}

/// Which frequency variable a value is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// The symbol's own variable.
    Hat,
    /// `sigma_hat / eps`.
    Check,
    /// `eps * sigma_check`, numerically the same as `Hat`.
    Rho,
    /// `eps^2 * sigma_check = eps * sigma_hat`.
    Pde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyCoordinate {
    pub value: f64,
    pub scale: Scale,
}

impl FrequencyCoordinate {
    pub fn hat(value: f64) -> Self {
        FrequencyCoordinate { value, scale: Scale::Hat }
    }

    pub fn to_hat(self, eps: f64) -> f64 {
        match self.scale {
            Scale::Hat | Scale::Rho => self.value,
            Scale::Check => self.value * eps,
            Scale::Pde => self.value / eps,
        }
    }

    pub fn convert(self, scale: Scale, eps: f64) -> Self {
        let h = self.to_hat(eps);
        let value = match scale {
            Scale::Hat | Scale::Rho => h,
            Scale::Check => h / eps,
            Scale::Pde => h * eps,
        };
        FrequencyCoordinate { value, scale }
    }
}

impl SymbolTriple {
    /// A triple without a distinguished singular part.
    pub fn new(c0: RMat, c1: RMat, c2: RMat, epsilon: f64) -> Self {
        let n = c0.nrows();
        SymbolTriple { c0, c1, c2, epsilon, c1_singular: RMat::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.c0.nrows()
    }

    pub fn assemble(&self, sigma: FrequencyCoordinate) -> CMat {
        self.assemble_hat(sigma.to_hat(self.epsilon))
    }

    pub fn assemble_hat(&self, s: f64) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |i, j| C64::new(self.c0[(i, j)] - s * s * self.c2[(i, j)], s * self.c1[(i, j)]))
    }

    /// The symbol with `eps sigma_check` in the regular part replaced by an
    /// independent `rho`: `C0 + i chk S + i rho R - rho^2 C2`. At
    /// `rho = eps chk` this is the ordinary symbol.
    pub fn assemble_rescaled(&self, chk: f64, rho: f64) -> CMat {
        let n = self.dim();
        let e = self.epsilon;
        CMat::from_fn(n, n, |i, j| {
            let s = self.c1_singular[(i, j)];
            let reg = self.c1[(i, j)] - s / e;
            C64::new(self.c0[(i, j)] - rho * rho * self.c2[(i, j)], chk * s + rho * reg)
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "epsilon": self.epsilon,
            "C0": crate::io::matrix_to_json(&self.c0),
            "C1": crate::io::matrix_to_json(&self.c1),
            "C2": crate::io::matrix_to_json(&self.c2),
        })
    }
}

impl MatrixFamily for SymbolTriple {
    fn dim(&self) -> usize {
        SymbolTriple::dim(self)
    }
    fn at(&self, s: f64) -> CMat {
        self.assemble_hat(s)
    }
}

/// The `(m+2) x (m+2)` symbol of the linearization about a wave.
pub fn build_full_symbol(dq: &DerivedQuantities, params: &ModelParams) -> SymbolTriple {
    let m = params.m;
    let n = m + 2;
    let (a, c) = (params.a, params.c);
    let (a0, k, e) = (dq.a0, dq.kappa, params.epsilon);
    let mut c0 = RMat::zeros(n, n);
    let mut c1 = RMat::zeros(n, n);
    let mut c2 = RMat::zeros(n, n);
    let mut sing = RMat::zeros(n, n);

    c0[(0, 0)] = 2.0 * dq.a0_sq * c.re;
    c0[(1, 0)] = 2.0 * dq.a0_sq * c.im;
    for j in 0..m {
        c0[(0, 2 + j)] = a0 * params.d[j].re;
        c0[(1, 2 + j)] = a0 * params.d[j].im;
    }

    c1[(0, 0)] = -2.0 * k * a.im;
    c1[(0, 1)] = -2.0 * k * a.re;
    c1[(1, 0)] = 2.0 * k * a.re;
    c1[(1, 1)] = -2.0 * k * a.im;
    for i in 0..m {
        sing[(2 + i, 0)] = 2.0 * a0 * params.h[i];
        c1[(2 + i, 0)] = 2.0 * a0 * params.h[i] / e + 2.0 * a0 * k * params.g[i].im;
        for j in 0..m {
            sing[(2 + i, 2 + j)] = params.f[(i, j)];
            c1[(2 + i, 2 + j)] = params.f[(i, j)] / e;
        }
    }

    c2[(0, 0)] = a.re;
    c2[(0, 1)] = -a.im;
    c2[(1, 0)] = a.im;
    c2[(1, 1)] = a.re;
    for i in 0..m {
        c2[(2 + i, 0)] = 2.0 * a0 * params.g[i].re;
        c2[(2 + i, 1)] = 2.0 * a0 * params.g[i].im;
        for j in 0..m {
            c2[(2 + i, 2 + j)] = params.e_b[(i, j)];
        }
    }
    SymbolTriple { c0, c1, c2, epsilon: e, c1_singular: sing }
}

/// The `2 x 2` Darcy symbol, at the amplitude of the full model.
pub fn build_darcy_symbol(dq: &DerivedQuantities, params: &ModelParams) -> Result<SymbolTriple> {
    // the slaving needs f^-1
    params.f_inv_h()?;
    let full = build_full_symbol(dq, params);
    let mut c0 = RMat::zeros(2, 2);
    c0[(0, 0)] = 2.0 * dq.a0_sq * dq.c_hat.re;
    c0[(1, 0)] = 2.0 * dq.a0_sq * dq.c_hat.im;
    let c1 = full.c1.view((0, 0), (2, 2)).into_owned();
    let c2 = full.c2.view((0, 0), (2, 2)).into_owned();
    Ok(SymbolTriple::new(c0, c1, c2, params.epsilon))
}

/// The `m x 2` slaving block `N = (-f^-1 2 A0 h, 0)`.
pub fn darcy_slaving(dq: &DerivedQuantities, params: &ModelParams) -> Result<RMat> {
    let fh = params.f_inv_h()?;
    let m = params.m;
    Ok(RMat::from_fn(m, 2, |i, j| if j == 0 { -2.0 * dq.a0 * fh[i] } else { 0.0 }))
}

/// `max_sigma |m(sigma) - [I 0] M(sigma) [I; N]|_inf` for a given `N`.
pub fn embedding_residual_with(full: &SymbolTriple, darcy: &SymbolTriple, n_block: &RMat, grid: &[f64]) -> f64 {
    let m = full.dim() - 2;
    let mut lift = CMat::zeros(m + 2, 2);
    lift[(0, 0)] = C64::new(1.0, 0.0);
    lift[(1, 1)] = C64::new(1.0, 0.0);
    for i in 0..m {
        for j in 0..2 {
            lift[(2 + i, j)] = C64::new(n_block[(i, j)], 0.0);
        }
    }
    let mut worst: f64 = 0.0;
    for &s in grid {
        let mf = full.assemble_hat(s);
        let reduced = mf.rows(0, 2) * &lift;
        let diff = darcy.assemble_hat(s) - reduced;
        let inf = (0..2).map(|i| (0..2).map(|j| diff[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
        worst = worst.max(inf);
    }
    worst
}

/// Residual of the embedding identity between the Darcy and full symbols.
pub fn darcy_embedding_residual(
    full: &SymbolTriple,
    darcy: &SymbolTriple,
    dq: &DerivedQuantities,
    params: &ModelParams,
    grid: &[f64],
) -> Result<f64> {
    Ok(embedding_residual_with(full, darcy, &darcy_slaving(dq, params)?, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::eigenvalues;
    use crate::linalg::match_sets;
    use crate::model::{derive_wave, WaveParams};
    use approx::assert_relative_eq;

    fn bench(kappa: f64, eps: f64) -> (ModelParams, DerivedQuantities) {
        let p = ModelParams::benchmark(eps);
        let dq = derive_wave(&p, &WaveParams::at(&p, kappa).unwrap()).unwrap();
        (p, dq)
    }

    #[test]
    fn constant_part_values() {
        let (p, dq) = bench(0.0, 0.01);
        let s = build_full_symbol(&dq, &p);
        let want = [[-2.0, 0.0, -0.57735], [1.33333, 0.0, 1.15470], [0.0, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((s.c0[(i, j)] - want[i][j]).abs() < 1e-5, "C0[{i},{j}]");
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(s.c1[(i, j)], 0.0);
            }
        }
        let ev = eigenvalues(&s.assemble_hat(0.0)).unwrap().eigenvalues;
        let (_, worst) = match_sets(&ev, &[C64::new(-2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(worst < 1e-7, "worst {worst}");
    }

    #[test]
    fn assembly() {
        let (p, dq) = bench(0.3, 0.01);
        let s = build_full_symbol(&dq, &p);
        assert_eq!(s.assemble_hat(0.0), s.c0.map(|x| C64::new(x, 0.0)));
        let plus = s.assemble_hat(0.37);
        let minus = s.assemble_hat(-0.37);
        assert_eq!(plus.map(|z| z.conj()), minus);

        let (p, dq) = bench(0.0, 0.01);
        let s = build_full_symbol(&dq, &p);
        let m = s.assemble(FrequencyCoordinate::hat(0.01));
        // eps cancels in the singular coupling: sigma 2 A0 h / eps = 2 A0 h
        assert_relative_eq!(m[(2, 0)].im, 2.0 * (1.0f64 / 3.0).sqrt() * 2.0, epsilon = 1e-12);
        assert_relative_eq!(m[(2, 0)].re, -1e-4 * 2.0 * (1.0f64 / 3.0).sqrt() * 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rescaled_assembly_agrees_on_the_diagonal() {
        let (p, dq) = bench(0.2, 0.01);
        let s = build_full_symbol(&dq, &p);
        let chk = 3.7;
        let a = s.assemble_rescaled(chk, 0.01 * chk);
        let b = s.assemble(FrequencyCoordinate { value: chk, scale: Scale::Check });
        assert!((a - b).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn coordinate_round_trips() {
        let eps = 1e-3;
        for v in [1e-7, 0.3, 17.0, 4e5] {
            for sc in [Scale::Hat, Scale::Check, Scale::Rho, Scale::Pde] {
                let x = FrequencyCoordinate { value: v, scale: sc };
                for to in [Scale::Hat, Scale::Check, Scale::Rho, Scale::Pde] {
                    let back = x.convert(to, eps).convert(sc, eps).value;
                    let ulp = f64::EPSILON * v.abs();
                    assert!((back - v).abs() <= ulp, "{v} {sc:?} -> {to:?}");
                }
            }
        }
        assert_eq!(FrequencyCoordinate { value: 2.0, scale: Scale::Check }.to_hat(0.5), 1.0);
        assert_eq!(FrequencyCoordinate { value: 2.0, scale: Scale::Pde }.to_hat(0.5), 4.0);
    }

    #[test]
    fn darcy_symbol() {
        let (p, dq) = bench(0.0, 0.01);
        let d = build_darcy_symbol(&dq, &p).unwrap();
        assert_relative_eq!(d.c0[(0, 0)], -2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(d.c0[(1, 0)], -4.0 / 3.0, epsilon = 1e-14);
        assert_eq!(d.c0[(0, 1)], 0.0);
        assert_eq!(d.c0[(1, 1)], 0.0);
        let ev = eigenvalues(&d.assemble_hat(0.0)).unwrap().eigenvalues;
        let (_, worst) = match_sets(&ev, &[C64::new(-2.0 / 3.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(worst < 1e-14);

        let mut q = p.clone();
        q.d = vec![C64::new(0.0, 0.0)];
        let dq0 = derive_wave(&q, &WaveParams::at(&q, 0.1).unwrap()).unwrap();
        let full = build_full_symbol(&dq0, &q);
        let d0 = build_darcy_symbol(&dq0, &q).unwrap();
        assert_eq!(d0.c0, full.c0.view((0, 0), (2, 2)).into_owned());

        let mut sing = p.clone();
        sing.f = RMat::zeros(1, 1);
        assert!(build_darcy_symbol(&dq, &sing).is_err());
    }

    #[test]
    fn embedding_identity_and_its_sensitivity() {
        let (p, dq) = bench(0.0, 0.01);
        let full = build_full_symbol(&dq, &p);
        let d = build_darcy_symbol(&dq, &p).unwrap();
        let grid = [0.1, 1.0, 10.0];
        assert!(darcy_embedding_residual(&full, &d, &dq, &p, &grid).unwrap() <= 1e-13);
        let mut n = darcy_slaving(&dq, &p).unwrap();
        n[(0, 0)] += 1e-3;
        assert!(embedding_residual_with(&full, &d, &n, &grid) >= 1e-4);
    }

    #[test]
    fn slaving_similarity_decouples_the_singular_part() {
        let (p, dq) = bench(0.25, 0.01);
        let full = build_full_symbol(&dq, &p);
        let n = darcy_slaving(&dq, &p).unwrap();
        let m = p.m;
        let mut s = RMat::identity(m + 2, m + 2);
        let mut sinv = RMat::identity(m + 2, m + 2);
        for i in 0..m {
            for j in 0..2 {
                s[(2 + i, j)] = n[(i, j)];
                sinv[(2 + i, j)] = -n[(i, j)];
            }
        }
        let t = &sinv * &full.c1_singular * &s;
        for i in 0..m {
            for j in 0..2 {
                assert!(t[(2 + i, j)].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mean_offset_does_not_change_the_symbol() {
        let p = ModelParams::benchmark(0.01);
        let dq = derive_wave(&p, &WaveParams::at(&p, 0.2).unwrap()).unwrap();
        let mut q = p.clone();
        let delta = 0.3;
        q.b = p.b - p.d[0] * delta;
        let dq2 = derive_wave(&q, &WaveParams::new(&q, 0.2, vec![delta]).unwrap()).unwrap();
        let s1 = build_full_symbol(&dq, &p);
        let s2 = build_full_symbol(&dq2, &q);
        for (a, b) in [(&s1.c0, &s2.c0), (&s1.c1, &s2.c1), (&s1.c2, &s2.c2)] {
            assert!((a - b).iter().all(|x| x.abs() < 1e-14));
        }
    }
}
