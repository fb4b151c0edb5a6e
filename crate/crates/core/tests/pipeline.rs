//! End-to-end runs of the analysis on the bundled model files.

use mcgl::asymptotics::*;
use mcgl::exec::Execution;
use mcgl::io::parse_model;
use mcgl::linalg::{log_space, match_sets};
use mcgl::model::*;
use mcgl::report::{analyze, AnalysisConfig};
use mcgl::symbol::*;
use mcgl::verdict::*;
use mcgl::C64;

fn model(name: &str) -> ModelParams {
    let path = format!("{}/../../models/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_model(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn benchmark_at_zero_wavenumber_is_stable() {
    let p = model("benchmark.json");
    let r = analyze(&p, &WaveParams::at(&p, 0.0).unwrap(), &AnalysisConfig::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Stable);
    assert!(r.dss.stable && r.criteria.verdict == Verdict::Stable);
    assert_eq!(r.regions.len(), 6);
    assert!(r.imaginary_roots.no_imaginary_root);
    let j = r.to_json();
    assert_eq!(j["verdict"], "stable");
    for key in ["criteria", "coefficients", "regions", "conventions", "derived"] {
        assert!(!j[key].is_null(), "missing {key}");
    }
    for route in ["closed_form", "matched_determinant", "numerical_fit"] {
        assert!(j["coefficients"][route]["mu_t"].is_number(), "{route}");
    }
    assert!((j["coefficients"]["closed_form"]["mu_t"].as_f64().unwrap() + 3.0).abs() < 1e-12);
}

#[test]
fn benchmark_outside_the_eckhaus_band_is_unstable() {
    let p = model("benchmark.json");
    let r = analyze(&p, &WaveParams::at(&p, 0.5).unwrap(), &AnalysisConfig::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Unstable);
    assert!(!r.criteria.eckhaus.holds && !r.dss.stable);
    let cf = coeffs_closed_form(&derive_wave(&p, &WaveParams::at(&p, 0.5).unwrap()).unwrap(), &p).unwrap();
    assert!((cf.mu_t - 7.0).abs() < 1e-10);
}

#[test]
fn two_mean_modes() {
    let p = model("two_mode.json");
    let r = analyze(&p, &WaveParams::at(&p, 0.0).unwrap(), &AnalysisConfig::default()).unwrap();
    assert!(r.criteria.preccond.holds && r.criteria.splitass.holds);
    assert_eq!(r.criteria.ccond.len(), 2);
    assert_eq!(r.verdict, Verdict::Stable);
}

#[test]
fn report_is_deterministic() {
    let p = model("benchmark.json");
    let w = WaveParams::at(&p, 0.2).unwrap();
    let a = analyze(&p, &w, &AnalysisConfig::default()).unwrap().to_json().to_string();
    let b = analyze(&p, &w, &AnalysisConfig::default()).unwrap().to_json().to_string();
    assert_eq!(a, b);
}

#[test]
fn execution_modes_give_identical_region_reports() {
    let p = ModelParams::benchmark(1e-2);
    let dq = derive_wave(&p, &WaveParams::at(&p, 0.1).unwrap()).unwrap();
    let sym = build_full_symbol(&dq, &p);
    let run = |exec| {
        let cfg = DssConfig { exec, ..Default::default() };
        serde_json::to_string(&verify_dss(&sym, Some(-1.0), &cfg).unwrap()).unwrap()
    };
    assert_eq!(run(Execution::Parallel), run(Execution::Sequential));
}

#[test]
fn decoupled_darcy_pair_is_the_gl_spectrum() {
    let mut p = ModelParams::benchmark(1e-2);
    p.d = vec![C64::new(0.0, 0.0)];
    let dq = derive_wave(&p, &WaveParams::at(&p, 0.2).unwrap()).unwrap();
    let full = build_full_symbol(&dq, &p);
    let darcy = build_darcy_symbol(&dq, &p).unwrap();
    for s in log_space(0.1, 10.0, 20) {
        let pts = darcy_points(&full, &darcy, &p, &[s], Execution::Sequential).unwrap();
        assert!(pts[0].d_darcy < 1e-10, "sigma {s}: {}", pts[0].d_darcy);
    }
}

#[test]
fn darcy_pair_near_full_spectrum() {
    let p = ModelParams::benchmark(1e-3);
    let dq = derive_wave(&p, &WaveParams::at(&p, 0.0).unwrap()).unwrap();
    let full = build_full_symbol(&dq, &p);
    let darcy = build_darcy_symbol(&dq, &p).unwrap();
    let r = darcy_necessity(&full, &darcy, &p, (1.0, 1.0), 1, Execution::Sequential).unwrap();
    assert!(r.d_darcy < 5e-2 && r.d_fast_scaled < 5.0 * p.epsilon, "{r:?}");
    assert!(r.sign_agreement);
}

#[test]
fn imaginary_root_scan_examples() {
    let grid = log_space(0.1, 10.0, 64);
    let p = ModelParams::benchmark(1e-2);
    let dq = derive_wave(&p, &WaveParams::at(&p, 0.0).unwrap()).unwrap();
    assert!(imaginary_root_scan(&dq, &p, &grid, true).unwrap().no_imaginary_root);

    let mut q = p.clone();
    q.h = vec![0.0];
    let dq = derive_wave(&q, &WaveParams::at(&q, 0.0).unwrap()).unwrap();
    assert!(!imaginary_root_scan(&dq, &q, &grid, false).unwrap().no_imaginary_root);

    let v = ModelParams::new(
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        vec![C64::new(1.0, 0.5), C64::new(1.0, -0.5)],
        mcgl::linalg::RMat::identity(2, 2),
        mcgl::linalg::RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]),
        vec![C64::new(0.0, 0.0); 2],
        vec![1.0, 1.0],
        1e-3,
    )
    .unwrap();
    let dq = derive_wave(&v, &WaveParams::at(&v, 0.0).unwrap()).unwrap();
    assert!(imaginary_root_scan(&dq, &v, &grid, true).unwrap().no_imaginary_root);
}

#[test]
fn degenerate_coupling_is_inconclusive() {
    let mut p = ModelParams::benchmark(1e-2);
    p.d = vec![C64::new(0.0, 0.0)];
    let dq = derive_wave(&p, &WaveParams::at(&p, 0.0).unwrap()).unwrap();
    let cl = evaluate_criteria(&dq, &p, None).unwrap();
    assert!(!cl.gencase.holds);
    assert_eq!(cl.verdict, Verdict::Inconclusive);
}

#[test]
fn spectrum_at_origin_is_neutral() {
    let p = ModelParams::benchmark(1e-2);
    let dq = derive_wave(&p, &WaveParams::at(&p, 0.0).unwrap()).unwrap();
    let sym = build_full_symbol(&dq, &p);
    let ev = mcgl::eig::eigenvalues(&sym.assemble_hat(0.0)).unwrap().eigenvalues;
    let want = [C64::new(-2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    assert!(match_sets(&ev, &want).1 < 1e-7);
    let r = verify_dss(&sym, Some(-3.0), &DssConfig::default()).unwrap();
    assert!(r.origin_ok && r.origin_max_re.abs() <= 1e-10);
}
