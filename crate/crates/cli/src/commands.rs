use crate::manifest::{InputRecord, Manifest};
use crate::{Cli, Command, Common, DarcyArgs, FigureArgs, SpectrumArgs, SweepArgs, TuringArgs, WaveArgs};
use anyhow::{bail, Context, Result};
use clap::Parser;
use mcgl::asymptotics::{coeffs_closed_form, eckhaus_bound};
use mcgl::eig::FnFamily;
use mcgl::eig::{track_branches, SpectrumCurve};
use mcgl::exec::Execution;
use mcgl::io::parse_model;
use mcgl::linalg::log_space;
use mcgl::model::{derive_wave, existence_bound, ModelParams, WaveParams};
use mcgl::report::{analyze, dss_boundary, dss_only, AnalysisConfig};
use mcgl::symbol::{build_darcy_symbol, build_full_symbol};
use mcgl::turing::{bifurcation_locate, critical_branch_coefficient, default_k_window, vasculo_symbol, VasculoParams};
use mcgl::verdict::{darcy_points, evaluate_criteria, DssConfig, Verdict};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Bad combinations of otherwise well-formed arguments.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Files written by one run, in order.
struct Outputs {
    dir: PathBuf,
    names: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs { dir: dir.to_path_buf(), names: Vec::new() })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, name: &str, v: &Value) -> Result<()> {
        self.write(name, &(serde_json::to_string_pretty(v)? + "\n"))
    }

    fn csv(&mut self, name: &str, doc: &str, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.iter().map(|x| x.to_string()))?;
        }
        let body = String::from_utf8(w.into_inner()?)?;
        self.write(name, &format!("# {doc}\n{body}"))
    }
}

pub fn run(cli: Cli, argv: &[String]) -> Result<u8> {
    let resolved = serde_json::to_value(&cli.command)?;
    match cli.command {
        Command::Analyze(a) => analyze_cmd(&a, argv, resolved),
        Command::Spectrum(a) => spectrum_cmd(&a, argv, resolved),
        Command::SweepKappa(a) => sweep_cmd(&a, argv, resolved),
        Command::DarcyCompare(a) => darcy_cmd(&a, argv, resolved),
        Command::Regions(a) => regions_cmd(&a, argv, resolved),
        Command::TuringExample(a) => turing_cmd(&a, argv, resolved),
        Command::Figures(a) => figures_cmd(&a, argv, resolved),
        Command::Replay(r) => {
            let m = Manifest::read(&r.manifest)?;
            let mut full = vec!["mcgl".to_string()];
            full.extend(m.argv.iter().cloned());
            let mut recorded = Cli::try_parse_from(&full).map_err(|e| usage(format!("manifest arguments: {e}")))?;
            if matches!(recorded.command, Command::Replay(_)) {
                return Err(usage("a manifest cannot record a replay"));
            }
            let mut argv = m.argv.clone();
            if let Some(out) = &r.out {
                set_out(&mut recorded.command, out.clone());
                if let Some(i) = argv.iter().position(|a| a == "--out") {
                    argv[i + 1] = out.display().to_string();
                }
            }
            run(recorded, &argv)
        }
    }
}

fn set_out(cmd: &mut Command, out: PathBuf) {
    match cmd {
        Command::Analyze(a) | Command::Regions(a) => a.common.out = out,
        Command::Spectrum(a) => a.wave.common.out = out,
        Command::SweepKappa(a) => a.common.out = out,
        Command::DarcyCompare(a) => a.wave.common.out = out,
        Command::TuringExample(a) => a.out = out,
        Command::Figures(a) => a.common.out = out,
        Command::Replay(_) => {}
    }
}

fn load_model(path: &Path) -> Result<(ModelParams, Value)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p = parse_model(&text).with_context(|| format!("in model file {}", path.display()))?;
    let v: Value = serde_json::from_str(&text)?;
    Ok((p, v))
}

fn wave_for(p: &ModelParams, kappa: f64, b0: &[f64]) -> Result<WaveParams> {
    let b0 = if b0.is_empty() { vec![0.0; p.m] } else { b0.to_vec() };
    if b0.len() != p.m {
        return Err(usage(format!("--b0 has {} entries, the model has m = {}", b0.len(), p.m)));
    }
    Ok(WaveParams::new(p, kappa, b0)?)
}

fn dss_config(c: &Common) -> Result<DssConfig> {
    if !(c.c >= 4.0) {
        return Err(usage(format!("--C must be at least 4, got {}", c.c)));
    }
    if c.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    Ok(DssConfig { c: c.c, points_per_region: c.points, exec: Execution::default() })
}

fn finish(mut m: Manifest, out: Outputs, inputs: Vec<InputRecord>) -> Result<()> {
    m.inputs = inputs;
    m.outputs = out.names.clone();
    m.write(&out.dir)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Stable => 0,
        Verdict::Unstable => 1,
        Verdict::Inconclusive => 2,
    }
}

fn analyze_cmd(a: &WaveArgs, argv: &[String], resolved: Value) -> Result<u8> {
    let cfg = dss_config(&a.common)?;
    let (p, raw) = load_model(&a.common.model)?;
    let wave = wave_for(&p, a.kappa, &a.b0)?;
    let report = analyze(&p, &wave, &AnalysisConfig { dss: cfg, ..Default::default() })?;
    let mut out = Outputs::new(&a.common.out)?;
    out.json("report.json", &report.to_json())?;
    if a.dump_symbol {
        dump_symbol(&mut out, &p, &wave)?;
    }
    say!("verdict: {}", serde_json::to_value(report.verdict)?.as_str().unwrap_or("?"));
    if let Some(c) = report.coefficients.closed_form.ok() {
        say!("mu_t = {:.6}, mu_c = {:?}, alpha_c = {:?}", c.mu_t, c.mu_c, c.alpha_c);
    }
    say!("kappa_S^2 = {:.6} (kappa^2 = {:.6})", report.eckhaus.kappa_s2, a.kappa * a.kappa);
    for r in &report.regions {
        say!(
            "region {:>3} [{:.3e}, {:.3e}] {}",
            r.region,
            r.sigma_lo,
            r.sigma_hi,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    for w in &report.warnings {
        say!("warning: {w}");
    }
    finish(
        Manifest::new("analyze", argv, resolved),
        out,
        vec![InputRecord { path: a.common.model.clone(), content: raw }],
    )?;
    Ok(verdict_code(report.verdict))
}

fn dump_symbol(out: &mut Outputs, p: &ModelParams, wave: &WaveParams) -> Result<()> {
    let dq = derive_wave(p, wave)?;
    let full = build_full_symbol(&dq, p);
    let darcy = build_darcy_symbol(&dq, p).map(|d| d.to_json()).unwrap_or(Value::Null);
    out.json("symbol.json", &json!({"full": full.to_json(), "darcy": darcy}))
}

fn curve_rows(c: &SpectrumCurve) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut header = vec!["sigma_hat".to_string()];
    for j in 1..=c.n_branches() {
        header.push(format!("re_lambda_{j}"));
        header.push(format!("im_lambda_{j}"));
    }
    let rows = (0..c.len())
        .map(|k| {
            let mut r = vec![c.sigma_grid[k]];
            for b in &c.branches {
                r.push(b[k].re);
                r.push(b[k].im);
            }
            r
        })
        .collect();
    (header, rows)
}

fn spectrum_cmd(a: &SpectrumArgs, argv: &[String], resolved: Value) -> Result<u8> {
    if a.n < 2 || !(a.sigma_max > a.sigma_min) {
        return Err(usage("need --n >= 2 and --sigma-max > --sigma-min"));
    }
    if a.log && !(a.sigma_min > 0.0) {
        return Err(usage("--log needs --sigma-min > 0"));
    }
    let (p, raw) = load_model(&a.wave.common.model)?;
    let wave = wave_for(&p, a.wave.kappa, &a.wave.b0)?;
    let dq = derive_wave(&p, &wave)?;
    let sym = build_full_symbol(&dq, &p);
    let grid = if a.log {
        log_space(a.sigma_min, a.sigma_max, a.n)
    } else {
        (0..a.n).map(|k| a.sigma_min + (a.sigma_max - a.sigma_min) * k as f64 / (a.n - 1) as f64).collect()
    };
    let curve = track_branches(&sym, &grid)?;
    let mut out = Outputs::new(&a.wave.common.out)?;
    let (header, rows) = curve_rows(&curve);
    out.csv(
        "spectrum.csv",
        "eigenvalues of M(sigma_hat) tracked along the grid; branches ordered by decreasing real part at the first point",
        &header,
        &rows,
    )?;
    if a.wave.dump_symbol {
        dump_symbol(&mut out, &p, &wave)?;
    }
    say!("{} branches, {} points, {} crossings", curve.n_branches(), curve.len(), curve.crossings.len());
    finish(
        Manifest::new("spectrum", argv, resolved),
        out,
        vec![InputRecord { path: a.wave.common.model.clone(), content: raw }],
    )?;
    Ok(0)
}

fn regions_cmd(a: &WaveArgs, argv: &[String], resolved: Value) -> Result<u8> {
    let cfg = dss_config(&a.common)?;
    let (p, raw) = load_model(&a.common.model)?;
    let wave = wave_for(&p, a.kappa, &a.b0)?;
    let r = dss_only(&p, &wave, &cfg)?;
    let mut out = Outputs::new(&a.common.out)?;
    out.json("regions.json", &serde_json::to_value(&r)?)?;
    for g in &r.regions {
        say!(
            "region {:>3} [{:.3e}, {:.3e}] {} points {}",
            g.region,
            g.sigma_lo,
            g.sigma_hi,
            g.grid_size,
            if g.passed { "pass" } else { "FAIL" }
        );
    }
    say!("spectrally {}", if r.stable { "stable" } else { "unstable" });
    finish(
        Manifest::new("regions", argv, resolved),
        out,
        vec![InputRecord { path: a.common.model.clone(), content: raw }],
    )?;
    Ok(if r.stable { 0 } else { 1 })
}

fn sweep_cmd(a: &SweepArgs, argv: &[String], resolved: Value) -> Result<u8> {
    if !(a.step > 0.0) || !(a.kappa_max >= a.kappa_min) || !(a.tol > 0.0) {
        return Err(usage("empty sweep: need --step > 0, --tol > 0 and --kappa-max >= --kappa-min"));
    }
    let cfg = dss_config(&a.common)?;
    let (p, raw) = load_model(&a.common.model)?;
    let n = ((a.kappa_max - a.kappa_min) / a.step + 1e-9).floor() as usize + 1;
    let kappas: Vec<f64> = (0..n).map(|i| a.kappa_min + a.step * i as f64).collect();
    let mut rows = Vec::new();
    let mut stable = Vec::new();
    let mut verdicts = Vec::new();
    for &k in &kappas {
        let wave = wave_for(&p, k, &a.b0)?;
        let dq = derive_wave(&p, &wave)?;
        let closed = coeffs_closed_form(&dq, &p).ok();
        let cl = evaluate_criteria(&dq, &p, closed.as_ref())?;
        let s = dss_only(&p, &wave, &cfg)?.stable;
        stable.push(s);
        verdicts.push(json!({"kappa": k, "criteria": cl.verdict, "spectrum_stable": s}));
        rows.push(vec![
            k,
            verdict_code(cl.verdict) as f64,
            if s { 1.0 } else { 0.0 },
            closed.as_ref().map(|c| c.mu_t).unwrap_or(f64::NAN),
        ]);
    }
    let b0 = if a.b0.is_empty() { vec![0.0; p.m] } else { a.b0.clone() };
    let mut boundary = Value::Null;
    if let Some(i) = (1..kappas.len()).find(|&i| stable[i - 1] != stable[i]) {
        let ((lo, hi), lo_state) = dss_boundary(&p, &b0, (kappas[i - 1], kappas[i]), a.tol, &cfg)?;
        boundary = json!({"kappa": 0.5 * (lo + hi), "bracket": [lo, hi], "stable_below": lo_state});
    }
    let dq0 = derive_wave(&p, &wave_for(&p, kappas[0], &a.b0)?)?;
    let eb = eckhaus_bound(&dq0, &p);
    let summary = json!({
        "sweep": verdicts,
        "numerical_boundary": boundary,
        "kappa_s2": eb.kappa_s2,
        "kappa_s": if eb.stable_band { Value::from(eb.kappa_s2.sqrt()) } else { Value::Null },
        "kappa_e2": existence_bound(&p, &b0),
    });
    let mut out = Outputs::new(&a.common.out)?;
    out.csv(
        "sweep.csv",
        "criteria_verdict: 0 stable, 1 unstable, 2 inconclusive; spectrum_stable: 1 if the region check passes",
        &["kappa", "criteria_verdict", "spectrum_stable", "mu_t"].map(String::from),
        &rows,
    )?;
    out.json("boundary.json", &summary)?;
    match boundary.get("kappa") {
        Some(k) => say!("numerical boundary kappa = {k}, kappa_S = {}", summary["kappa_s"]),
        None => say!("no stability change in the sweep; kappa_S = {}", summary["kappa_s"]),
    }
    finish(
        Manifest::new("sweep-kappa", argv, resolved),
        out,
        vec![InputRecord { path: a.common.model.clone(), content: raw }],
    )?;
    Ok(0)
}

fn darcy_cmd(a: &DarcyArgs, argv: &[String], resolved: Value) -> Result<u8> {
    let c = a.wave.common.c;
    let lo = a.sigma_min.unwrap_or(1.0 / c);
    let hi = a.sigma_max.unwrap_or(c);
    if !(lo > 0.0) || !(hi >= lo) || a.n < 2 {
        return Err(usage("need 0 < --sigma-min <= --sigma-max and --n >= 2"));
    }
    let (p, raw) = load_model(&a.wave.common.model)?;
    let wave = wave_for(&p, a.wave.kappa, &a.wave.b0)?;
    let dq = derive_wave(&p, &wave)?;
    let full = build_full_symbol(&dq, &p);
    let darcy = build_darcy_symbol(&dq, &p)?;
    let grid = log_space(lo, hi, a.n);
    let pts = darcy_points(&full, &darcy, &p, &grid, Execution::default())?;
    let header: Vec<String> = [
        "sigma_hat",
        "d_darcy",
        "d_fast_scaled",
        "re_darcy_1",
        "im_darcy_1",
        "re_darcy_2",
        "im_darcy_2",
        "re_full_1",
        "im_full_1",
        "re_full_2",
        "im_full_2",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|q| {
            let mut r = vec![q.sigma, q.d_darcy, q.d_fast_scaled];
            for z in q.darcy.iter().chain(&q.matched) {
                r.push(z.re);
                r.push(z.im);
            }
            r
        })
        .collect();
    let summary = json!({
        "sigma_interval": [lo, hi],
        "d_darcy": pts.iter().map(|q| q.d_darcy).fold(0.0, f64::max),
        "d_fast_scaled": pts.iter().map(|q| q.d_fast_scaled).fold(0.0, f64::max),
        "sign_agreement": pts.iter().all(|q| q.signs_agree),
        "ambiguous_sigma": pts.iter().filter(|q| q.ambiguous).map(|q| q.sigma).collect::<Vec<_>>(),
    });
    let mut out = Outputs::new(&a.wave.common.out)?;
    out.csv("darcy.csv", "Darcy pair and the full eigenvalues matched to it; d_fast_scaled = eps * distance of the fast eigenvalues to i sigma spec(f)/eps", &header, &rows)?;
    out.json("darcy.json", &summary)?;
    say!(
        "d_darcy = {:.3e}, eps*d_fast = {:.3e}, signs agree: {}",
        summary["d_darcy"].as_f64().unwrap_or(f64::NAN),
        summary["d_fast_scaled"].as_f64().unwrap_or(f64::NAN),
        summary["sign_agreement"]
    );
    finish(
        Manifest::new("darcy-compare", argv, resolved),
        out,
        vec![InputRecord { path: a.wave.common.model.clone(), content: raw }],
    )?;
    Ok(0)
}

fn turing_cmd(a: &TuringArgs, argv: &[String], resolved: Value) -> Result<u8> {
    if a.n < 2 || !(a.k_max > 0.0) {
        return Err(usage("need --n >= 2 and --k-max > 0"));
    }
    let text = std::fs::read_to_string(&a.params).with_context(|| format!("reading {}", a.params.display()))?;
    let p: VasculoParams =
        serde_json::from_str(&text).with_context(|| format!("in parameter file {}", a.params.display()))?;
    p.validate()?;
    let raw: Value = serde_json::from_str(&text)?;
    let window = a.k_window.unwrap_or_else(|| default_k_window(&p));
    let theta = critical_branch_coefficient(&p, window)?;
    let grid: Vec<f64> = (0..a.n).map(|i| a.k_max * i as f64 / (a.n - 1) as f64).collect();
    let fam = FnFamily { dim: 3, f: |k: f64| vasculo_symbol(&p, k) };
    let curve = track_branches(&fam, &grid)?;
    let (mut header, rows) = curve_rows(&curve);
    header[0] = "k".into();
    let bif = match &a.range {
        Some(r) if r.len() != 2 => return Err(usage("--range takes two values lo,hi")),
        Some(r) => Some(serde_json::to_value(bifurcation_locate(&p, (r[0], r[1]), Execution::default())?)?),
        None => None,
    };
    let mut out = Outputs::new(&a.out)?;
    out.csv("turing_branches.csv", "eigenvalues of the linearized vasculogenesis symbol over k", &header, &rows)?;
    out.json("turing.json", &json!({"params": p, "k_window": window, "theta": theta, "bifurcation": bif}))?;
    say!(
        "theta: fit {:.6}, exact {:.6}, simplified {:.6}; {}",
        theta.theta_fit,
        theta.theta_exact,
        theta.theta_simplified,
        if theta.stable_near_zero { "diffusively stable near k = 0" } else { "unstable near k = 0" }
    );
    if let Some(b) = &bif {
        say!("onset alpha*beta = {}, kind {}", b["critical_product"], b["kind"]);
    }
    finish(
        Manifest::new("turing-example", argv, resolved),
        out,
        vec![InputRecord { path: a.params.clone(), content: raw }],
    )?;
    Ok(0)
}

fn figures_cmd(a: &FigureArgs, argv: &[String], resolved: Value) -> Result<u8> {
    if a.n < 4 {
        return Err(usage("--n must be at least 4"));
    }
    let (p, raw) = load_model(&a.common.model)?;
    let ke2 = existence_bound(&p, &vec![0.0; p.m]);
    if !(ke2 > 0.0) {
        bail!("empty existence range (kappa_E^2 = {ke2})");
    }
    let ke = ke2.sqrt();
    let eps = p.epsilon;
    let m = p.m;
    let mut out = Outputs::new(&a.common.out)?;
    for (tag, kappa) in [("k0", 0.0), ("kE4", ke / 4.0), ("kE2", ke / 2.0)] {
        let wave = wave_for(&p, kappa, &[])?;
        let dq = derive_wave(&p, &wave)?;
        let sym = build_full_symbol(&dq, &p);
        let coef = coeffs_closed_form(&dq, &p)?;
        for (size, smax) in [("small", 10.0 * eps), ("large", 1.0)] {
            let grid: Vec<f64> = (1..=a.n).map(|k| smax * k as f64 / a.n as f64).collect();
            let curve = track_branches(&sym, &grid)?;
            // identify branches at the first point: translational closest to
            // the origin, then conservative, stable farthest
            let mut idx: Vec<usize> = (0..curve.n_branches()).collect();
            idx.sort_by(|&x, &y| curve.branches[x][0].norm().partial_cmp(&curve.branches[y][0].norm()).unwrap());
            let mut cons: Vec<usize> = idx[1..=m].to_vec();
            cons.sort_by(|&x, &y| curve.branches[x][0].im.partial_cmp(&curve.branches[y][0].im).unwrap());
            let order: Vec<usize> = std::iter::once(idx[0]).chain(cons).chain(std::iter::once(idx[m + 1])).collect();
            let mut header = vec!["sigma_hat".to_string(), "re_lambda_t".to_string()];
            header.extend((1..=m).map(|i| format!("re_lambda_c_{i}")));
            header.push("re_lambda_s".into());
            header.push("mu_t_parabola".into());
            header.extend((1..=m).map(|i| format!("mu_c_parabola_{i}")));
            let rows: Vec<Vec<f64>> = (0..curve.len())
                .map(|k| {
                    let s = curve.sigma_grid[k];
                    let mut r = vec![s];
                    r.extend(order.iter().map(|&j| curve.branches[j][k].re));
                    r.push(coef.mu_t * s * s);
                    r.extend(coef.mu_c.iter().map(|mc| mc / (eps * eps) * s * s));
                    r
                })
                .collect();
            let doc = format!(
                "kappa = {kappa}, eps = {eps}; real parts of the translational (t), conservative (c) and stable (s) branches with the leading-order parabolas mu_t s^2 and mu_c s^2/eps^2"
            );
            out.csv(&format!("panel_{tag}_{size}.csv"), &doc, &header, &rows)?;
        }
    }
    say!("wrote {} panel files to {}", out.names.len(), out.dir.display());
    finish(
        Manifest::new("figures", argv, resolved),
        out,
        vec![InputRecord { path: a.common.model.clone(), content: raw }],
    )?;
    Ok(0)
}
