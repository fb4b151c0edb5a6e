//! Random parameter generation shared by the integration targets.
#![allow(dead_code)]

use mcgl::linalg::RMat;
use mcgl::model::{derive_wave, DerivedQuantities, ModelParams, WaveParams};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

/// Raw draw of a scalar model: Re a, Im a, Re b, Im b, Re c, Im c, Re d,
/// Im d, e_B, f, Re g, Im g, h, and the wavenumber fraction of kappa_E.
#[derive(Debug, Clone, Copy)]
pub struct ScalarDraw(pub [f64; 14]);

pub fn scalar_draw() -> impl Strategy<Value = ScalarDraw> {
    (
        (0.2..2.0f64, -2.0..2.0f64, 0.2..2.0f64, -1.0..1.0f64),
        (-3.0..-0.2f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
        (0.2..2.0f64, -3.0..3.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
        0.0..0.9f64,
    )
        .prop_map(|((ar, ai, br, bi), (cr, ci, dr, di), (eb, f, gr, gi, h), kf)| {
            ScalarDraw([ar, ai, br, bi, cr, ci, dr, di, eb, f, gr, gi, h, kf])
        })
}

/// Scalar model and a wave at fraction `kf` of the existence range; `None`
/// when the draw is too close to a degenerate case.
pub fn build_scalar(d: ScalarDraw, eps: f64) -> Option<(ModelParams, DerivedQuantities)> {
    let [ar, ai, br, bi, cr, ci, dr, di, eb, f, gr, gi, h, kf] = d.0;
    if f.abs() < 0.3 {
        return None;
    }
    let p = ModelParams::scalar(
        C64::new(ar, ai),
        C64::new(br, bi),
        C64::new(cr, ci),
        C64::new(dr, di),
        eb,
        f,
        C64::new(gr, gi),
        h,
        eps,
    );
    let ke = (br / ar).sqrt();
    let wave = WaveParams::at(&p, kf * ke).ok()?;
    let dq = derive_wave(&p, &wave).ok()?;
    // stay away from singular or near-singular reductions
    let flux = dq.effective_flux[(0, 0)];
    if flux.abs() < 0.05 || dq.c_hat.re.abs() < 0.05 || dq.r[0].abs() < 0.05 || (h * dr).abs() < 0.05 {
        return None;
    }
    Some((p, dq))
}

pub fn random_scalar(rng: &mut impl Rng, eps: f64) -> (ModelParams, DerivedQuantities) {
    loop {
        let d = ScalarDraw([
            rng.gen_range(0.2..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-3.0..-0.2),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..0.9),
        ]);
        if let Some(x) = build_scalar(d, eps) {
            return x;
        }
    }
}

pub fn complex_matrix(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = mcgl::linalg::CMat> {
    proptest::collection::vec((lo..hi, lo..hi), n * n)
        .prop_map(move |v| mcgl::linalg::CMat::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1)))
}

pub fn real_matrix(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = RMat> {
    proptest::collection::vec(lo..hi, n * n).prop_map(move |v| RMat::from_fn(n, n, |i, j| v[i * n + j]))
}
