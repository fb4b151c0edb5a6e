//! The full analysis of one wave and its JSON report.

use crate::asymptotics::{
    bfn_check, coeffs_closed_form, coeffs_matched_determinant, eckhaus_bound, fit_coefficients, BfnReport,
    EckhausBound, ExpansionCoefficients, FitConfig,
};
use crate::io::{matrix_to_json, model_to_json};
use crate::linalg::log_space;
use crate::model::{compat_check, derive_wave, validate_model, DerivedQuantities, ModelParams, WaveParams};
use crate::symbol::{build_darcy_symbol, build_full_symbol, SymbolTriple};
use crate::verdict::{
    darcy_necessity, evaluate_criteria, imaginary_root_scan, region_ii_affine_check, verify_dss, AffineReport,
    CriteriaChecklist, DarcyReport, DssConfig, DssReport, ImaginaryRootReport, Verdict,
};
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

/// Conventions stated at the top of every report.
pub fn conventions() -> Value {
    json!({
        "wave": "A = A0 exp(i(kappa x - omega t)), omega = Im(a) kappa^2 - Im(b_tilde) - Im(c) A0^2",
        "state": "(u, v, w) = (amplitude modulus, phase, mean modes)",
        "symbol": "M(s) = C0 + i s C1 - s^2 C2, s = sigma_hat",
        "expansions": "lambda_t = i alpha_t s + mu_t s^2; lambda_c = i alpha_c s/eps + mu_c s^2/eps^2; alpha_c and mu_c reported times eps and eps^2",
        "stability_sign": "mu < 0 is stable",
        "compat": "Re spec(i z f - z^2 e_B) < 0 (the printed form with + z^2 e_B contradicts Re spec(e_B) > 0)",
        "dss": "max Re lambda(s) <= -c_dss s^2 / (1 + s^2)",
    })
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub dss: DssConfig,
    /// Defaults to [`FitConfig::for_epsilon`].
    pub fit: Option<FitConfig>,
    /// Grid size for the Darcy comparison and the imaginary-root scan.
    pub scan_points: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { dss: DssConfig::default(), fit: None, scan_points: 64 }
    }
}

/// One route's coefficients or the reason they are missing.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum RouteOutcome {
    Ok(ExpansionCoefficients),
    Failed { error: String },
}

impl RouteOutcome {
    fn from(r: Result<ExpansionCoefficients>) -> Self {
        match r {
            Ok(c) => RouteOutcome::Ok(c),
            Err(e) => RouteOutcome::Failed { error: e.to_string() },
        }
    }

    pub fn ok(&self) -> Option<&ExpansionCoefficients> {
        match self {
            RouteOutcome::Ok(c) => Some(c),
            RouteOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Coefficients {
    pub closed_form: RouteOutcome,
    pub matched_determinant: RouteOutcome,
    pub numerical_fit: RouteOutcome,
}

/// Pairwise gaps between routes against `max(5 eps, 5 fit_residual)`.
#[derive(Debug, Clone, Serialize)]
pub struct RouteAgreement {
    pub tolerance: f64,
    /// `(pair, quantity, gap)`.
    pub gaps: Vec<(String, String, f64)>,
    pub within_tolerance: bool,
}

pub fn route_agreement(routes: &[&ExpansionCoefficients], eps: f64) -> RouteAgreement {
    let resid = routes
        .iter()
        .filter_map(|r| r.fit.as_ref())
        .map(|f| f.t.residual.max(f.c.iter().map(|c| c.residual * eps * eps).fold(0.0, f64::max)))
        .fold(0.0, f64::max);
    let tolerance = (5.0 * eps).max(5.0 * resid);
    let name = |r: &ExpansionCoefficients| format!("{:?}", r.route);
    let mut gaps = Vec::new();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            let (a, b) = (routes[i], routes[j]);
            let pair = format!("{}/{}", name(a), name(b));
            gaps.push((pair.clone(), "alpha_t".to_string(), (a.alpha_t - b.alpha_t).abs()));
            gaps.push((pair.clone(), "mu_t".to_string(), (a.mu_t - b.mu_t).abs()));
            for (k, (x, y)) in a.mu_c.iter().zip(&b.mu_c).enumerate() {
                gaps.push((pair.clone(), format!("mu_c[{k}]"), (x - y).abs()));
            }
        }
    }
    let within_tolerance = gaps.iter().all(|g| g.2 <= tolerance);
    RouteAgreement { tolerance, gaps, within_tolerance }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub conventions: Value,
    pub model: Value,
    pub wave: Value,
    pub derived: Value,
    pub violations: Vec<String>,
    pub compat: Value,
    pub coefficients: Coefficients,
    pub route_agreement: Option<RouteAgreement>,
    pub eckhaus: EckhausBound,
    pub bfn: BfnReport,
    pub criteria: CriteriaChecklist,
    pub regions: Vec<crate::verdict::RegionReport>,
    pub dss: DssSummary,
    pub darcy: Option<DarcyReport>,
    pub imaginary_roots: ImaginaryRootReport,
    pub region_ii_affine: Option<AffineReport>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DssSummary {
    pub stable: bool,
    pub c: f64,
    pub c_dss: f64,
    pub c_dss_source: String,
    pub merged: bool,
    pub origin_max_re: f64,
    pub strict: bool,
}

impl StabilityReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

pub fn derived_to_json(dq: &DerivedQuantities) -> Value {
    let z = |v: C64| Value::from(vec![v.re, v.im]);
    json!({
        "kappa": dq.kappa,
        "A0": dq.a0,
        "A0_sq": dq.a0_sq,
        "omega": dq.omega,
        "b_tilde": z(dq.b_tilde),
        "b_hat": z(dq.b_hat),
        "c_hat": z(dq.c_hat),
        "p": dq.p,
        "q": dq.q,
        "q_hat": dq.q_hat,
        "r": dq.r,
        "effective_flux": matrix_to_json(&dq.effective_flux),
        "m0": dq.m0,
    })
}

/// Runs everything on one wave: derived quantities, the three coefficient
/// routes, the checklist, the region-wise spectral check and the auxiliary
/// scans. The final verdict is the checklist's, downgraded to inconclusive
/// when the spectral check disagrees.
pub fn analyze(params: &ModelParams, wave: &WaveParams, cfg: &AnalysisConfig) -> Result<StabilityReport> {
    let validation = validate_model(params)?;
    let dq = derive_wave(params, wave)?;
    let sym = build_full_symbol(&dq, params);
    analyze_derived(params, wave, &dq, &sym, validation.violations.iter().map(|v| v.message.clone()).collect(), cfg)
}

fn analyze_derived(
    params: &ModelParams,
    wave: &WaveParams,
    dq: &DerivedQuantities,
    sym: &SymbolTriple,
    violations: Vec<String>,
    cfg: &AnalysisConfig,
) -> Result<StabilityReport> {
    let eps = params.epsilon;
    let mut warnings = Vec::new();
    let fit_cfg = cfg.fit.unwrap_or_else(|| FitConfig { exec: cfg.dss.exec, ..FitConfig::for_epsilon(eps) });
    let coefficients = Coefficients {
        closed_form: RouteOutcome::from(coeffs_closed_form(dq, params)),
        matched_determinant: RouteOutcome::from(coeffs_matched_determinant(dq, params)),
        numerical_fit: RouteOutcome::from(fit_coefficients(sym, params, &fit_cfg)),
    };
    let closed = coefficients.closed_form.ok();
    let available: Vec<&ExpansionCoefficients> =
        [&coefficients.closed_form, &coefficients.matched_determinant, &coefficients.numerical_fit]
            .iter()
            .filter_map(|r| r.ok())
            .collect();
    let route_agreement = (available.len() >= 2).then(|| route_agreement(&available, eps));
    if let Some(ra) = &route_agreement {
        if !ra.within_tolerance {
            warnings.push(format!("coefficient routes differ by more than {:.3e}", ra.tolerance));
        }
    }

    let criteria = evaluate_criteria(dq, params, closed)?;
    let dss = verify_dss(sym, closed.map(|c| c.mu_t), &cfg.dss)?;
    warnings.extend(dss.warnings.iter().cloned());

    let c = cfg.dss.c;
    let darcy = match build_darcy_symbol(dq, params) {
        Ok(d) => Some(darcy_necessity(sym, &d, params, (1.0 / c, c), cfg.scan_points, cfg.dss.exec)?),
        Err(e) => {
            warnings.push(format!("Darcy comparison skipped: {e}"));
            None
        }
    };
    if let Some(d) = &darcy {
        if dss.stable && d.darcy_max_re > 1e-10 {
            warnings.push("spectrum passes although the Darcy pair has positive real part".into());
        }
        if !d.ambiguous.is_empty() {
            warnings.push(format!("Darcy matching ambiguous at {} frequencies", d.ambiguous.len()));
        }
    }
    let generic = criteria.genericity_margin() > crate::asymptotics::GENERICITY_TOL;
    let imaginary_roots = imaginary_root_scan(dq, params, &log_space(1.0 / c, c, cfg.scan_points), generic)?;
    if let Some(w) = &imaginary_roots.warning {
        warnings.push(w.clone());
    }
    let region_ii_affine = match region_ii_affine_check(sym, c, 21, cfg.dss.exec) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("region (ii) check skipped: {e}"));
            None
        }
    };

    let compat = compat_check(params, &[-10.0, -1.0, -0.1, 0.1, 1.0, 10.0])?;
    let mut verdict = criteria.verdict;
    if verdict != Verdict::Inconclusive && dss.stable != (verdict == Verdict::Stable) {
        warnings.push(format!(
            "asymptotic criteria say {verdict:?} but the spectral check says {}",
            if dss.stable { "stable" } else { "unstable" }
        ));
        verdict = Verdict::Inconclusive;
    }

    Ok(StabilityReport {
        conventions: conventions(),
        model: model_to_json(params),
        wave: json!({"kappa": wave.kappa, "B0": wave.b0}),
        derived: derived_to_json(dq),
        violations,
        compat: json!({"holds": compat.holds, "worst": compat.worst}),
        coefficients,
        route_agreement,
        eckhaus: eckhaus_bound(dq, params),
        bfn: bfn_check(dq, params),
        criteria,
        regions: dss.regions.clone(),
        dss: DssSummary {
            stable: dss.stable,
            c,
            c_dss: dss.c_dss,
            c_dss_source: dss.c_dss_source.clone(),
            merged: dss.merged,
            origin_max_re: dss.origin_max_re,
            strict: dss.strict,
        },
        darcy,
        imaginary_roots,
        region_ii_affine,
        verdict,
        warnings,
    })
}

/// Report for a spectrum check only, for quick sweeps.
pub fn dss_only(params: &ModelParams, wave: &WaveParams, cfg: &DssConfig) -> Result<DssReport> {
    let dq = derive_wave(params, wave)?;
    let mu = coeffs_closed_form(&dq, params).ok().map(|c| c.mu_t);
    verify_dss(&build_full_symbol(&dq, params), mu, cfg)
}

/// Bisects the spectrum-check verdict in `kappa` between `lo` and `hi`,
/// whose verdicts must differ, down to a bracket of width `tol`. Returns the
/// final bracket and the verdict at its lower end.
pub fn dss_boundary(
    params: &ModelParams,
    b0: &[f64],
    (mut lo, mut hi): (f64, f64),
    tol: f64,
    cfg: &DssConfig,
) -> Result<((f64, f64), bool)> {
    let probe =
        |k: f64| -> Result<bool> { Ok(dss_only(params, &WaveParams::new(params, k, b0.to_vec())?, cfg)?.stable) };
    let lo_state = probe(lo)?;
    if probe(hi)? == lo_state {
        return Err(Error::Input(format!("no verdict change between kappa = {lo} and {hi}")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? == lo_state {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((lo, hi), lo_state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_report() {
        let p = ModelParams::benchmark(0.01);
        let r = analyze(&p, &WaveParams::at(&p, 0.0).unwrap(), &AnalysisConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Stable, "{:?}", r.warnings);
        let v = r.to_json();
        assert_eq!(v["verdict"], "stable");
        for key in ["criteria", "coefficients", "regions", "conventions"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["regions"].as_array().unwrap().len(), 6);
        assert!(v["coefficients"]["matched_determinant"]["mu_t"].is_number());

        let r = analyze(&p, &WaveParams::at(&p, 0.5).unwrap(), &AnalysisConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Unstable);
    }
}
