//! Stability verdicts: the criteria checklist, the region-wise spectral
//! check of diffusive stability, and the Darcy comparison.
//!
//! A wave is diffusively spectrally stable when, for some `c > 0`,
//! `max Re lambda(s) <= -c s^2 / (1 + s^2)` for all `s`. The frequency
//! axis is split at `eps/C, C eps, 1/C, 1/(C eps), C/eps` into six regions
//! with different balances; each gets its own log grid.

use crate::asymptotics::{mu_c_from_spectrum, ExpansionCoefficients, GENERICITY_TOL};
use crate::eig::{eigenvalues, eigenvalues_real, track_branches_with, track_two_sided, FnFamily};
use crate::exec::{self, Execution};
use crate::linalg::{fit_line, log_space, match_sets, max_abs, CMat, RMat};
use crate::model::{DerivedQuantities, ModelParams};
use crate::symbol::SymbolTriple;
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use serde::Serialize;

/// A decided condition and the number it was decided on. Positive margin
/// means the condition holds with room to spare.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flag {
    pub holds: bool,
    pub margin: f64,
}

impl Flag {
    fn positive(margin: f64) -> Self {
        Flag { holds: margin > 0.0, margin }
    }

    fn nonzero(value: f64) -> Self {
        Flag { holds: value.abs() > GENERICITY_TOL, margin: value.abs() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaChecklist {
    /// `Re c < 0`.
    pub supercritical: Flag,
    /// `kappa^2 < kappa_S^2`.
    pub eckhaus: Flag,
    /// Benjamin-Feir-Newell type condition; margin is its value.
    pub bfn: Flag,
    /// `Re c < Re c_hat < 0`.
    pub scalar_pair: Flag,
    /// Spectrum of the effective flux real; margin is minus the largest
    /// imaginary part.
    pub preccond: Flag,
    /// That spectrum simple; margin is the smallest gap.
    pub splitass: Flag,
    /// `mu_c,i < 0` for each conservative branch.
    pub ccond: Vec<Flag>,
    /// `r != 0`, the generic (non-Jordan) case.
    pub gencase: Flag,
    /// Effective flux nonsingular; margin is its smallest eigenvalue modulus.
    pub fluxcond: Flag,
    /// `c_hat != 0`.
    pub genc: Flag,
    /// `h . Re d != 0`.
    pub genz1: Flag,
    /// `h_j Re d_j != 0` for each j.
    pub indcouple: Vec<Flag>,
    /// Spectrum of `f` simple.
    pub shyp: Flag,
    /// Decoupling relation `Im d = Re d Im c / Re c`; informational.
    pub decoup: Flag,
    /// `mu_t < 0`.
    pub mu_t: Flag,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl CriteriaChecklist {
    /// Smallest genericity margin that enters the verdict.
    pub fn genericity_margin(&self) -> f64 {
        let mut m = self.gencase.margin.min(self.fluxcond.margin).min(self.genc.margin).min(self.splitass.margin);
        if self.indcouple.len() == 1 {
            m = m.min(self.genz1.margin);
        } else {
            m = m.min(self.shyp.margin);
            for f in &self.indcouple {
                m = m.min(f.margin);
            }
        }
        m
    }
}

fn spectrum_flags(m: &RMat) -> Result<(Vec<C64>, Flag, Flag)> {
    let mut ev = eigenvalues_real(m)?.eigenvalues;
    ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    let im = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let real = Flag { holds: im <= 1e-10 * (1.0 + max_abs(m)), margin: -im };
    let mut gap = f64::INFINITY;
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            gap = gap.min((ev[i] - ev[j]).norm());
        }
    }
    if ev.len() == 1 {
        gap = f64::INFINITY;
    }
    let simple = Flag { holds: gap > 1e-10 * (1.0 + max_abs(m)), margin: gap };
    Ok((ev, real, simple))
}

/// Evaluates every condition. `coeffs` are the leading-order coefficients;
/// pass `None` when they could not be formed (the verdict then rests on the
/// first-order condition).
pub fn evaluate_criteria(
    dq: &DerivedQuantities,
    params: &ModelParams,
    coeffs: Option<&ExpansionCoefficients>,
) -> Result<CriteriaChecklist> {
    let m = params.m;
    let (c, ch) = (params.c, dq.c_hat);
    let dre = params.d_re();
    let kappa2 = dq.kappa * dq.kappa;
    let eb = crate::asymptotics::eckhaus_bound(dq, params);
    let bfn = crate::asymptotics::bfn_check(dq, params);

    let (flux_ev, preccond, splitass) = spectrum_flags(&dq.effective_flux)?;
    let (_, _, shyp) = spectrum_flags(&params.f)?;
    let flux_min = flux_ev.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let r_norm = dq.r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let genz1: f64 = params.h.iter().zip(&dre).map(|(h, d)| h * d).sum();

    let mu_t = coeffs.map(|k| k.mu_t);
    let mu_c: Option<Vec<f64>> = match coeffs {
        Some(k) => Some(k.mu_c.clone()),
        None if preccond.holds && splitass.holds && ch.re.abs() > GENERICITY_TOL => {
            crate::asymptotics::flux_spectrum(&dq.effective_flux).ok().map(|fs| mu_c_from_spectrum(&fs, dq, params))
        }
        None => None,
    };

    let mut cl = CriteriaChecklist {
        supercritical: Flag::positive(-c.re),
        eckhaus: Flag {
            holds: eb.stable_band && kappa2 < eb.kappa_s2,
            margin: if eb.stable_band { eb.kappa_s2 - kappa2 } else { -kappa2.max(GENERICITY_TOL) },
        },
        bfn: Flag::positive(bfn.value),
        scalar_pair: Flag::positive((ch.re - c.re).min(-ch.re)),
        preccond,
        splitass,
        ccond: mu_c.as_ref().map(|v| v.iter().map(|x| Flag::positive(-x)).collect()).unwrap_or_default(),
        gencase: Flag::nonzero(r_norm),
        fluxcond: Flag::nonzero(flux_min),
        genc: Flag::nonzero(ch.norm()),
        genz1: Flag::nonzero(genz1),
        indcouple: params.h.iter().zip(&dre).map(|(h, d)| Flag::nonzero(h * d)).collect(),
        shyp,
        decoup: {
            let gap = (0..m).map(|j| (params.d[j].im - dre[j] * c.im / c.re).abs()).fold(0.0, f64::max);
            Flag { holds: gap <= GENERICITY_TOL, margin: gap }
        },
        mu_t: mu_t.map(|x| Flag::positive(-x)).unwrap_or(Flag { holds: false, margin: f64::NAN }),
        verdict: Verdict::Inconclusive,
        reasons: Vec::new(),
    };

    let mut reasons = Vec::new();
    if !cl.supercritical.holds {
        reasons.push("subcritical: Re(c) >= 0".to_string());
    }
    if !cl.gencase.holds {
        reasons.push("degenerate: r = 0, the decoupled Jordan case".to_string());
    }
    if !cl.fluxcond.holds {
        reasons.push("effective flux is singular".to_string());
    }
    if !cl.genc.holds || ch.re.abs() <= GENERICITY_TOL {
        reasons.push("Re(c_hat) vanishes".to_string());
    }
    if m == 1 {
        if !cl.genz1.holds {
            reasons.push("h Re(d) = 0".to_string());
        }
    } else {
        if !cl.shyp.holds {
            reasons.push("spectrum of f is not simple".to_string());
        }
        if is_diagonal(&params.f) {
            for (j, f) in cl.indcouple.iter().enumerate() {
                if !f.holds {
                    reasons.push(format!("h_{j} Re(d_{j}) = 0"));
                }
            }
        }
        if cl.preccond.holds && !cl.splitass.holds {
            reasons.push("effective flux has a repeated eigenvalue".to_string());
        }
    }

    cl.verdict = if m > 1 && !cl.preccond.holds {
        // complex speeds: unstable at first order whatever else holds
        Verdict::Unstable
    } else if !reasons.is_empty() || mu_t.is_none() || mu_c.is_none() {
        if reasons.is_empty() {
            reasons.push("expansion coefficients unavailable".to_string());
        }
        Verdict::Inconclusive
    } else if cl.mu_t.holds && cl.ccond.iter().all(|f| f.holds) {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    cl.reasons = reasons;
    Ok(cl)
}

fn is_diagonal(m: &RMat) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
}

/// Settings for [`verify_dss`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DssConfig {
    /// Region separation constant, at least 4.
    pub c: f64,
    /// Grid points per decade of frequency.
    pub points_per_region: usize,
    pub exec: Execution,
}

impl Default for DssConfig {
    fn default() -> Self {
        DssConfig { c: 10.0, points_per_region: 64, exec: Execution::default() }
    }
}

pub const REGION_IDS: [&str; 6] = ["i", "ii", "iii", "iv", "v", "vi"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub region: String,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub grid_size: usize,
    /// Per tracked branch, `max Re lambda + c_dss s^2/(1+s^2)` over the grid.
    pub max_excess: Vec<f64>,
    pub max_re: f64,
    /// Frequency of the largest excess.
    pub worst_sigma: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DssReport {
    pub regions: Vec<RegionReport>,
    pub c_dss: f64,
    /// `"pilot"` when calibrated, `"fallback"` otherwise.
    pub c_dss_source: String,
    /// Regions were clamped because `eps > 1/C^3`.
    pub merged: bool,
    pub warnings: Vec<String>,
    /// Largest real part at the origin; zero up to rounding.
    pub origin_max_re: f64,
    pub origin_ok: bool,
    /// `max Re lambda < 0` at every grid point.
    pub strict: bool,
    pub stable: bool,
}

/// Region boundaries: `lo_i, eps/C, C eps, 1/C, 1/(C eps), C/eps, 100 C/eps`.
pub fn region_bounds(eps: f64, c: f64, lo: f64) -> ([f64; 7], bool) {
    let mut b = [lo, eps / c, c * eps, 1.0 / c, 1.0 / (c * eps), c / eps, 100.0 * c / eps];
    let merged = eps > c.powi(-3);
    for k in 1..7 {
        b[k] = b[k].max(b[k - 1]);
    }
    (b, merged)
}

fn grid_for(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let n = ((hi / lo).log10() * per_decade as f64).ceil() as usize + 1;
    log_space(lo, hi, n.max(2))
}

fn max_re(m: &CMat) -> Result<f64> {
    Ok(eigenvalues(m)?.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Checks the diffusive stability bound region by region on the full
/// symbol. `mu_t0` is the leading-order translational coefficient, used to
/// place the first grid above rounding noise and as a calibration cap.
pub fn verify_dss(sym: &SymbolTriple, mu_t0: Option<f64>, cfg: &DssConfig) -> Result<DssReport> {
    if !(cfg.c >= 4.0) {
        return Err(Error::Input(format!("region constant C = {} must be at least 4", cfg.c)));
    }
    if cfg.points_per_region < 2 {
        return Err(Error::Input("need at least two points per decade".into()));
    }
    let eps = sym.epsilon;
    let c = cfg.c;
    let mut warnings = Vec::new();

    let mu_scale = mu_t0.map(f64::abs).filter(|x| *x > 0.0).unwrap_or(1.0);
    let noise = (1e3 * f64::EPSILON * max_abs(&sym.c0).max(1.0) / mu_scale).sqrt();
    let lo = (eps / (100.0 * c)).max(noise.min(0.5 * eps / c));
    let (b, merged) = region_bounds(eps, c, lo);
    if merged {
        warnings.push(format!("eps = {eps} exceeds 1/C^3 = {}: regions merged", c.powi(-3)));
    }

    // pilot pass
    let g = |s: f64| -> Result<f64> {
        let r = max_re(&sym.assemble_hat(s)).map_err(|e| e.at_sigma(s))?;
        Ok(-r * (1.0 + s * s) / (s * s))
    };
    let mut min_all = f64::INFINITY;
    let mut min_v = f64::INFINITY;
    for k in 0..6 {
        let pts = grid_for(b[k], b[k + 1], 8);
        let gs = exec::try_map(cfg.exec, &pts, |&s| g(s))
            .map_err(|e| Error::InRegion { region: REGION_IDS[k].into(), source: Box::new(e) })?;
        let mn = gs.into_iter().fold(f64::INFINITY, f64::min);
        min_all = min_all.min(mn);
        if k == 4 {
            min_v = mn;
        }
    }
    let cap = mu_t0.map(f64::abs).unwrap_or(f64::INFINITY);
    let mut c_dss = 0.5 * cap.min(min_v).min(min_all);
    let mut source = "pilot".to_string();
    if !(c_dss > 0.0) || !c_dss.is_finite() {
        c_dss = mu_t0.map(|x| 0.5 * x.abs()).unwrap_or(0.0);
        source = "fallback".into();
        warnings.push("pilot pass found no positive decay margin".into());
    }

    let origin: Vec<C64> = eigenvalues(&crate::linalg::to_complex(&sym.c0))?.eigenvalues;
    let origin_max_re = origin.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let origin_ok = origin_max_re.abs() <= 1e-10;

    let mut regions = Vec::with_capacity(6);
    let mut strict = true;
    for k in 0..6 {
        let (lo, hi) = (b[k], b[k + 1]);
        let grid = grid_for(lo, hi, cfg.points_per_region);
        let wrap = |e: Error| Error::InRegion { region: REGION_IDS[k].into(), source: Box::new(e) };
        let weight = |s: f64| c_dss * s * s / (1.0 + s * s);
        let (max_excess, mre, worst_sigma) = if grid.len() >= 2 {
            let curve = track_branches_with(sym, &grid, cfg.exec).map_err(wrap)?;
            let mut per = vec![f64::NEG_INFINITY; curve.n_branches()];
            let (mut mre, mut worst, mut wsig) = (f64::NEG_INFINITY, f64::NEG_INFINITY, lo);
            for (i, &s) in curve.sigma_grid.iter().enumerate() {
                for (j, br) in curve.branches.iter().enumerate() {
                    let x = br[i].re + weight(s);
                    per[j] = per[j].max(x);
                    mre = mre.max(br[i].re);
                    if x > worst {
                        worst = x;
                        wsig = s;
                    }
                }
            }
            (per, mre, wsig)
        } else {
            let s = grid[0];
            let ev = eigenvalues(&sym.assemble_hat(s)).map_err(|e| wrap(e.at_sigma(s)))?.eigenvalues;
            let per: Vec<f64> = ev.iter().map(|z| z.re + weight(s)).collect();
            let mre = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            (per, mre, s)
        };
        strict &= mre < 0.0;
        let passed = max_excess.iter().all(|x| *x <= 0.0);
        regions.push(RegionReport {
            region: REGION_IDS[k].into(),
            sigma_lo: lo,
            sigma_hi: hi,
            grid_size: grid.len(),
            max_excess,
            max_re: mre,
            worst_sigma,
            passed,
        });
    }
    let stable = regions.iter().all(|r| r.passed) && strict && origin_ok;
    Ok(DssReport { regions, c_dss, c_dss_source: source, merged, warnings, origin_max_re, origin_ok, strict, stable })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DarcyReport {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    /// Largest distance between a Darcy eigenvalue and its matched full one.
    pub d_darcy: f64,
    /// Largest distance for the fast eigenvalues, times `eps`.
    pub d_fast_scaled: f64,
    /// Matched real parts have the same sign wherever the Darcy one is
    /// clearly nonzero.
    pub sign_agreement: bool,
    /// Largest real part of the Darcy pair over the interval.
    pub darcy_max_re: f64,
    /// Frequencies where two candidates sat within 1e-6 of each other.
    pub ambiguous: Vec<f64>,
}

/// One frequency of the Darcy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DarcyPoint {
    pub sigma: f64,
    pub d_darcy: f64,
    pub d_fast_scaled: f64,
    pub signs_agree: bool,
    pub ambiguous: bool,
    pub darcy: Vec<C64>,
    /// Full eigenvalues matched to the Darcy pair, in the same order.
    pub matched: Vec<C64>,
}

/// Matches the full spectrum against the Darcy pair and the fast
/// eigenvalues `i s spec(f) / eps` at each frequency of `grid`.
pub fn darcy_points(
    full: &SymbolTriple,
    darcy: &SymbolTriple,
    params: &ModelParams,
    grid: &[f64],
    exec: Execution,
) -> Result<Vec<DarcyPoint>> {
    if crate::linalg::is_singular(&params.f) {
        return Err(Error::SingularFlux);
    }
    let eps = params.epsilon;
    let fspec = eigenvalues_real(&params.f)?.eigenvalues;
    exec::try_map(exec, grid, |&s| -> Result<DarcyPoint> {
        let ef = eigenvalues(&full.assemble_hat(s)).map_err(|e| e.at_sigma(s))?.eigenvalues;
        let ed = eigenvalues(&darcy.assemble_hat(s)).map_err(|e| e.at_sigma(s))?.eigenvalues;
        let mut cand = ed.clone();
        cand.extend(fspec.iter().map(|l| C64::new(0.0, s / eps) * l));
        let mut ambiguous = false;
        for i in 0..cand.len() {
            for j in i + 1..cand.len() {
                ambiguous |= (cand[i] - cand[j]).norm() < 1e-6;
            }
        }
        // perm[i] = index in `cand` matched to ef[i]
        let (perm, _) = match_sets(&ef, &cand);
        let mut matched = vec![C64::new(0.0, 0.0); ed.len()];
        let (mut dd, mut dfast, mut signs) = (0.0f64, 0.0f64, true);
        for (i, &j) in perm.iter().enumerate() {
            let d = (ef[i] - cand[j]).norm();
            if j < ed.len() {
                matched[j] = ef[i];
                dd = dd.max(d);
                let scale = 1e-8 * (1.0 + cand[j].norm());
                if cand[j].re.abs() > scale && ef[i].re.abs() > scale {
                    signs &= (cand[j].re > 0.0) == (ef[i].re > 0.0);
                }
            } else {
                dfast = dfast.max(d);
            }
        }
        Ok(DarcyPoint {
            sigma: s,
            d_darcy: dd,
            d_fast_scaled: dfast * eps,
            signs_agree: signs,
            ambiguous,
            darcy: ed,
            matched,
        })
    })
}

/// [`darcy_points`] on a log grid over the interval, aggregated.
pub fn darcy_necessity(
    full: &SymbolTriple,
    darcy: &SymbolTriple,
    params: &ModelParams,
    interval: (f64, f64),
    points: usize,
    exec: Execution,
) -> Result<DarcyReport> {
    let grid = log_space(interval.0, interval.1, points.max(2));
    let rows = darcy_points(full, darcy, params, &grid, exec)?;
    Ok(DarcyReport {
        sigma_lo: interval.0,
        sigma_hi: interval.1,
        d_darcy: rows.iter().map(|r| r.d_darcy).fold(0.0, f64::max),
        d_fast_scaled: rows.iter().map(|r| r.d_fast_scaled).fold(0.0, f64::max),
        sign_agreement: rows.iter().all(|r| r.signs_agree),
        darcy_max_re: rows.iter().flat_map(|r| r.darcy.iter().map(|z| z.re)).fold(f64::NEG_INFINITY, f64::max),
        ambiguous: rows.iter().filter(|r| r.ambiguous).map(|r| r.sigma).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImaginaryRootReport {
    /// `min |Re lambda|` over the grid and the spectrum.
    pub min_margin: f64,
    pub at_sigma_check: f64,
    /// False when an eigenvalue reaches the imaginary axis.
    pub no_imaginary_root: bool,
    pub warning: Option<String>,
}

/// The reduced matrix `[[2 A0^2 Re c, A0 Re d], [2 A0 h i s, f i s]]` on
/// the amplitude and mean modes.
pub fn reduced_leading_matrix(dq: &DerivedQuantities, params: &ModelParams, s: f64) -> CMat {
    let m = params.m;
    let mut out = CMat::zeros(m + 1, m + 1);
    out[(0, 0)] = C64::new(2.0 * dq.a0_sq * params.c.re, 0.0);
    for j in 0..m {
        out[(0, 1 + j)] = C64::new(dq.a0 * params.d[j].re, 0.0);
        out[(1 + j, 0)] = C64::new(0.0, 2.0 * dq.a0 * params.h[j] * s);
        for k in 0..m {
            out[(1 + j, 1 + k)] = C64::new(0.0, params.f[(j, k)] * s);
        }
    }
    out
}

/// Scans the reduced matrix for purely imaginary eigenvalues.
pub fn imaginary_root_scan(
    dq: &DerivedQuantities,
    params: &ModelParams,
    grid: &[f64],
    genericity_holds: bool,
) -> Result<ImaginaryRootReport> {
    let mut min_margin = f64::INFINITY;
    let mut at = f64::NAN;
    for &s in grid {
        let ev = eigenvalues(&reduced_leading_matrix(dq, params, s)).map_err(|e| e.at_sigma(s))?.eigenvalues;
        for z in ev {
            if z.re.abs() < min_margin {
                min_margin = z.re.abs();
                at = s;
            }
        }
    }
    let warning = (min_margin < 1e-8 && genericity_holds).then(|| {
        format!("eigenvalue within {min_margin:.2e} of the imaginary axis at sigma_check = {at} despite genericity")
    });
    Ok(ImaginaryRootReport { min_margin, at_sigma_check: at, no_imaginary_root: min_margin >= 1e-8, warning })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineReport {
    /// `lambda_2 ~ a + b / sigma_check`.
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub relative_residual: f64,
    pub points: usize,
    pub passed: bool,
}

/// On `sigma_check in [1/C, C]`, fits the second-order coefficient in
/// `rho` of the neutral branch of `C0 + i chk S + i rho R - rho^2 C2` and
/// checks that it is affine in `1/chk`.
pub fn region_ii_affine_check(sym: &SymbolTriple, c: f64, points: usize, exec: Execution) -> Result<AffineReport> {
    let grid = log_space(1.0 / c, c, points.max(3));
    let window = 1e-4;
    let l2 = exec::try_map(exec, &grid, |&chk| -> Result<C64> {
        let fam = FnFamily { dim: sym.dim(), f: |rho: f64| sym.assemble_rescaled(chk, rho) };
        let curve = track_two_sided(&fam, window, 8, Execution::Sequential).map_err(|e| e.at_sigma(chk))?;
        let xs: Vec<f64> = curve.sigma_grid.clone();
        let ys: Vec<C64> = xs.iter().zip(&curve.branches[0]).map(|(r, l)| l / r).collect();
        Ok(fit_line(&xs, &ys).1)
    })?;
    let inv: Vec<f64> = grid.iter().map(|s| 1.0 / s).collect();
    let (a, b, rms) = fit_line(&inv, &l2);
    let scale = l2.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let rel = rms / scale;
    Ok(AffineReport {
        a: (a.re, a.im),
        b: (b.re, b.im),
        relative_residual: rel,
        points: grid.len(),
        passed: rel <= 1e-3,
    })
}
