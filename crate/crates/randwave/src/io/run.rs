//! Experiment dispatch: one function per subcommand, each writing its CSV
//! tables, a JSON summary and any snapshots below the output directory.

use std::fs;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::json;

use super::config::{CounterexampleKind, DataKind, ExperimentKind, RunConfig, TailNorm};
use super::report::{
    inventory, write_manifest_atomic, ArtifactWriter, Check, CsvTable, ExperimentOutcome, RunManifest, Summary,
    ARTIFACT_VERSION, MANIFEST_FILE,
};
use super::IoError;
use crate::evolution::free_evolution;
use crate::expansion::{alpha, build_z_terms, build_zeta_terms, to_f64, ExpansionSet};
use crate::experiments::{
    bilinear_sweep, dispersive_decay, gaussian_bump, hs_tail, integrability_gain, profiled_data, smoothing_study,
    strichartz_tail, trilinear_nonsmoothing, wave_packet, z3_nonsmoothing_counterexample, CounterexampleOptions,
    CounterexampleSpec, DispersiveWindow, GainAxis, GainSpec, SmoothingOptions, TailCurve,
};
use crate::randomization::{wiener_randomize, EnsembleSpec, RandomLaw, WindowSpec};
use crate::solver::{nls_residual, picard_solve, reconstruct_u, SolverConfig};
use crate::spectral::{save_snapshot, sobolev_norm, SpectralField};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "RANDWAVE_WORKERS";

/// Worker count from `RANDWAVE_WORKERS`, or 1 when unset or unparsable.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&k| k >= 1).unwrap_or(1)
}

/// Run with the worker count of [`default_workers`].
pub fn run(cfg: &RunConfig) -> Result<RunManifest, IoError> {
    run_with_workers(cfg, default_workers())
}

/// Execute the configured experiment on a pool of `workers` threads.
///
/// An existing manifest is removed first, so an interrupted run leaves none.
/// Experiment failures are recorded in the manifest; only an unusable output
/// directory or an unbuildable pool is returned as `Err`.
pub fn run_with_workers(cfg: &RunConfig, workers: usize) -> Result<RunManifest, IoError> {
    let start = Instant::now();
    let workers = workers.max(1);
    let mut out = ArtifactWriter::new(&cfg.output)?;
    match fs::remove_file(out.path(MANIFEST_FILE)) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
        _ => {}
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| IoError::Pool(e.to_string()))?;
    let name = cfg.experiment.name();
    let outcome = match pool.install(|| dispatch(cfg, &mut out)) {
        Ok(summary) => ExperimentOutcome { name: name.into(), passed: summary.passed, error: None },
        Err(e) => ExperimentOutcome { name: name.into(), passed: None, error: Some(e.to_string()) },
    };
    let files = inventory(out.root(), out.written())?;
    let manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION.into(),
        config: serde_json::to_value(cfg)?,
        workers,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        experiments: vec![outcome],
        files,
    };
    write_manifest_atomic(out.root(), &manifest)?;
    Ok(manifest)
}

fn dispatch(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let summary = match cfg.experiment {
        ExperimentKind::Randomize => randomize(cfg, out)?,
        ExperimentKind::Expand => expand(cfg, out)?,
        ExperimentKind::Solve => solve(cfg, out)?,
        ExperimentKind::Tail => tail(cfg, out)?,
        ExperimentKind::SmoothFit => smooth_fit(cfg, out)?,
        ExperimentKind::Counterexample => counterexample(cfg, out)?,
        ExperimentKind::Dispersive => dispersive(cfg, out)?,
        ExperimentKind::Bilinear => bilinear(cfg, out)?,
        ExperimentKind::Gain => gain(cfg, out)?,
    };
    out.json(&format!("{}_summary", cfg.experiment.name()), &summary)?;
    Ok(summary)
}

fn cells(values: &[&dyn std::fmt::Display]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

fn ensemble(cfg: &RunConfig) -> EnsembleSpec {
    EnsembleSpec::new(cfg.random.law, cfg.random.seed, cfg.random.members)
}

/// Deterministic data `φ` of the configuration.
pub fn base_data(cfg: &RunConfig) -> Result<SpectralField, IoError> {
    let g = cfg.grid;
    let f = match cfg.data.kind {
        DataKind::Profiled { delta } => profiled_data(g, cfg.regularity.s, delta)?,
        DataKind::Bump { width } => gaussian_bump(g, width)?,
        DataKind::PlaneWave { mode } => SpectralField::plane_wave(g, Complex64::new(1.0, 0.0), mode)?,
    };
    Ok(f.scaled(Complex64::new(cfg.data.amplitude, 0.0)))
}

fn member_data(cfg: &RunConfig, phi: &SpectralField, member: usize) -> SpectralField {
    wiener_randomize(phi, cfg.random.window, cfg.random.law, ensemble(cfg).member(member))
}

fn randomize(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let phi = base_data(cfg)?;
    let (s, sigma) = (cfg.regularity.s, cfg.regularity.sigma);
    fs::create_dir_all(out.path("members"))?;
    let data_path = out.path("data.rwv");
    save_snapshot(&phi, &data_path)?;
    out.record([data_path]);
    let mut table = CsvTable::new(&["member", "hs_norm", "l2_norm", "hsigma_norm"]);
    let mut worst = 0.0f64;
    let reference = sobolev_norm(&phi, s);
    for i in 0..cfg.random.members {
        let f = member_data(cfg, &phi, i);
        let path = out.path(format!("members/member_{i:04}.rwv"));
        save_snapshot(&f, &path)?;
        out.record([path]);
        let hs = sobolev_norm(&f, s);
        if reference > 0.0 {
            worst = worst.max((hs / reference - 1.0).abs());
        }
        table.push(cells(&[&i, &hs, &sobolev_norm(&f, 0.0), &sobolev_norm(&f, sigma)]));
    }
    out.csv("randomize", "randomize", &table)?;
    let mut checks = Vec::new();
    if cfg.random.law == RandomLaw::UniformCircle && cfg.random.window == WindowSpec::SharpCube {
        checks.push(Check::at_most("per_sample_norm_deviation", worst, 1e-12));
    }
    Ok(Summary::new(
        "randomize",
        checks,
        json!({ "data_hs_norm": reference, "members": cfg.random.members, "max_relative_norm_deviation": worst }),
    ))
}

fn build_expansion(cfg: &RunConfig, member: usize, k: usize, full_z: bool) -> Result<ExpansionSet, IoError> {
    let phi = base_data(cfg)?;
    let data = member_data(cfg, &phi, member);
    let z1 = free_evolution(&data, cfg.time_grid);
    let set = if full_z {
        build_z_terms(&z1, k, cfg.quadrature)?
    } else {
        build_zeta_terms(&z1, k, cfg.quadrature)?
    };
    Ok(set.with_seed(ensemble(cfg).member(member)))
}

fn expand(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let k = cfg.regularity.k.expect("validated: expand has a depth");
    let set = build_expansion(cfg, cfg.params.expand_member, k, cfg.params.expand_full_z)?;
    let written = set.save(&out.path("expansion"))?;
    out.record(written);
    let mut table = CsvTable::new(&["order", "node", "t", "l2_norm", "hsigma_norm"]);
    for (l, term) in set.terms().iter().enumerate() {
        for (m, snap) in term.snapshots().iter().enumerate() {
            let t = cfg.time_grid.node(m);
            table.push(cells(&[&(2 * l + 1), &m, &t, &sobolev_norm(snap, 0.0), &sobolev_norm(snap, cfg.regularity.sigma)]));
        }
    }
    out.csv("expand", "expand", &table)?;
    Ok(Summary::new(
        "expand",
        Vec::new(),
        json!({ "depth": k, "orders": (0..k).map(|l| 2 * l + 1).collect::<Vec<_>>(), "variant": set.variant() }),
    ))
}

fn solve(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let k = cfg.regularity.k.expect("validated: solve has a depth");
    let set = build_expansion(cfg, cfg.params.solve_member, k, false)?;
    let solver = SolverConfig {
        depth: k,
        tolerance: cfg.params.solve_tolerance,
        max_iterations: cfg.params.solve_max_iterations,
        sigma: cfg.regularity.sigma,
        v0: None,
        quadrature: cfg.quadrature,
    };
    let (v, report) = picard_solve(&set, &solver)?;
    let u = reconstruct_u(&set, &v)?;
    fs::create_dir_all(out.path("solution"))?;
    let mut traj = CsvTable::new(&["node", "t", "u_l2_norm", "v_hsigma_norm"]);
    for (m, (us, vs)) in u.snapshots().iter().zip(v.snapshots()).enumerate() {
        let path = out.path(format!("solution/node_{m:04}.rwv"));
        save_snapshot(us, &path)?;
        out.record([path]);
        traj.push(cells(&[&m, &cfg.time_grid.node(m), &sobolev_norm(us, 0.0), &sobolev_norm(vs, cfg.regularity.sigma)]));
    }
    let mut inc = CsvTable::new(&["iteration", "increment"]);
    for (j, d) in report.increments.iter().enumerate() {
        inc.push(cells(&[&(j + 1), d]));
    }
    out.csv("solve", "solve_iterations", &inc)?;
    out.csv("solve", "solve_trajectory", &traj)?;
    let residual = if cfg.time_grid.nodes() >= 3 { Some(nls_residual(&u)?) } else { None };
    let checks = vec![Check::at_least("converged", if report.converged { 1.0 } else { 0.0 }, 1.0)];
    Ok(Summary::new("solve", checks, json!({ "depth": k, "report": report, "residual": residual })))
}

fn tail(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let phi = base_data(cfg)?;
    let ens = ensemble(cfg);
    let p = &cfg.params;
    let study = match p.tail_norm {
        TailNorm::Strichartz => strichartz_tail(&phi, cfg.random.window, &ens, p.tail_q, p.tail_r, cfg.time_grid, &[0.0])?,
        TailNorm::Hs => hs_tail(&phi, cfg.random.window, &ens, cfg.regularity.s, &[0.0])?,
    };
    let lambdas = TailCurve::thresholds_spanning(&study.samples, p.tail_thresholds);
    let curve = TailCurve::from_samples(&study.samples, &lambdas);
    let mut table = CsvTable::new(&["lambda", "lambda_squared", "exceedance", "log_exceedance"]);
    for (l, e) in curve.lambdas.iter().zip(&curve.exceedance) {
        table.push(cells(&[l, &(l * l), e, &e.ln()]));
    }
    out.csv("tail", "tail", &table)?;
    let mut samples = CsvTable::new(&["member", "norm"]);
    for (i, v) in study.samples.iter().enumerate() {
        samples.push(cells(&[&i, v]));
    }
    out.csv("tail", "tail_samples", &samples)?;
    let (lo, hi) = study.samples.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let spread = if lo > 0.0 { hi / lo - 1.0 } else { f64::INFINITY };
    let degenerate_law = cfg.random.law == RandomLaw::UniformCircle
        && cfg.random.window == WindowSpec::SharpCube
        && p.tail_norm == TailNorm::Hs;
    let fit = curve.log_fit().ok();
    let checks = if degenerate_law {
        vec![Check::at_most("relative_spread", spread, 1e-12)]
    } else {
        let fit = fit.as_ref().ok_or(crate::experiments::ExperimentError::TooFewPoints(0))?;
        vec![Check::at_most("slope", fit.slope, 0.0), Check::at_least("r_squared", fit.r_squared, 0.9)]
    };
    Ok(Summary::new("tail", checks, json!({ "fit": fit, "relative_spread": spread, "members": study.samples.len() })))
}

/// Slope rule of the order-`2l + 1` smoothing fit at regularity `s`.
fn smoothing_check(l: usize, s: f64, slope: f64) -> Check {
    let name = format!("order_{}_slope", 2 * l + 1);
    match l {
        0 => Check::within(&name, slope, -s, 0.1),
        _ => {
            let tol = if l <= 2 { 0.25 } else { 0.3 };
            Check::at_most(&name, slope, -to_f64(alpha(l + 1)) * s + tol)
        }
    }
}

fn smooth_fit(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let phi = base_data(cfg)?;
    let opts = SmoothingOptions {
        t_eval: cfg.time_grid.horizon(),
        nodes: cfg.time_grid.nodes(),
        k_max: cfg.params.smooth_k_max,
        quadrature: cfg.quadrature,
        window: cfg.random.window,
        fit_window: cfg.params.smooth_fit,
    };
    let study = smoothing_study(&ensemble(cfg), &phi, &opts)?;
    let mut table = CsvTable::new(&["order", "n", "median", "lower_quartile", "upper_quartile", "mean"]);
    for (l, row) in study.profiles.iter().enumerate() {
        for (n, s) in study.blocks.iter().zip(row) {
            table.push(cells(&[&(2 * l + 1), n, &s.median, &s.lower_quartile, &s.upper_quartile, &s.mean]));
        }
    }
    out.csv("smooth-fit", "smooth_profiles", &table)?;
    let mut fits = CsvTable::new(&["order", "slope", "intercept", "residual_std_error", "samples"]);
    let mut checks = Vec::new();
    for (l, fit) in study.fits.iter().enumerate() {
        match fit {
            Some(f) => {
                fits.push(cells(&[&(2 * l + 1), &f.slope, &f.intercept, &f.residual_std_error, &f.samples]));
                checks.push(smoothing_check(l, cfg.regularity.s, f.slope));
            }
            None => checks.push(smoothing_check(l, cfg.regularity.s, f64::NAN)),
        }
    }
    out.csv("smooth-fit", "smooth_fits", &fits)?;
    Ok(Summary::new("smooth-fit", checks, json!({ "fits": study.fits, "options": opts, "members": study.members })))
}

fn counterexample(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let p = &cfg.params;
    let opts = CounterexampleOptions { nodes: p.counterexample_nodes, quadrature: cfg.quadrature, ..Default::default() };
    let sigma = cfg.regularity.sigma;
    match p.counterexample_kind {
        CounterexampleKind::Z3 => {
            let spec = CounterexampleSpec {
                box_scale: p.counterexample_box_scale,
                offset_factor: p.counterexample_offset,
                s: 0.0,
                sigma,
                ..Default::default()
            };
            let rep = z3_nonsmoothing_counterexample(cfg.grid, &spec, &p.counterexample_ns, &opts)?;
            let mut table = CsvTable::new(&[
                "n", "t_star", "sup_phase", "data_l2", "z3_hsigma_norm", "target_min", "c0", "time_exponent",
            ]);
            for r in &rep.rows {
                table.push(cells(&[&r.n, &r.t_star, &r.sup_phase, &r.data_l2, &r.z3_norm, &r.target_min, &r.c0, &r.time_exponent]));
            }
            out.csv("counterexample", "counterexample_z3", &table)?;
            let checks = vec![
                Check::within("growth_slope", rep.growth.slope, sigma, 0.1),
                Check::at_least("c0", rep.c0, f64::MIN_POSITIVE),
            ];
            Ok(Summary::new("counterexample", checks, json!({ "kind": "z3", "growth": rep.growth, "c0": rep.c0 })))
        }
        CounterexampleKind::Trilinear => {
            let specs: Vec<CounterexampleSpec> = p
                .counterexample_ns
                .iter()
                .map(|&n| CounterexampleSpec {
                    box_scale: n / 2.0,
                    offset_factor: p.counterexample_offset,
                    n,
                    l: n,
                    s: cfg.regularity.s,
                    sigma,
                })
                .collect();
            let rep = trilinear_nonsmoothing(cfg.grid, &specs, &opts)?;
            let mut table = CsvTable::new(&[
                "n", "l", "box_scale", "t_star", "sup_phase", "numerator", "denominator", "ratio",
            ]);
            for r in &rep.rows {
                table.push(cells(&[&r.n, &r.l, &r.box_scale, &r.t_star, &r.sup_phase, &r.numerator, &r.denominator, &r.ratio]));
            }
            out.csv("counterexample", "counterexample_trilinear", &table)?;
            let checks = vec![Check::within("ratio_slope", rep.fit.slope, rep.predicted, 0.2)];
            Ok(Summary::new(
                "counterexample",
                checks,
                json!({ "kind": "trilinear", "fit": rep.fit, "denominator_fit": rep.denominator_fit, "predicted": rep.predicted, "kappa": rep.kappa }),
            ))
        }
    }
}

/// `count` geometrically spaced times across the window.
fn geometric_times(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..count).map(|j| lo * (ratio * j as f64 / (count - 1) as f64).exp()).collect()
}

fn dispersive(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let width = match cfg.data.kind {
        DataKind::Bump { width } => width,
        _ => return Err(IoError::Unsupported("dispersive needs data.kind = bump".into())),
    };
    let f = base_data(cfg)?;
    let window = DispersiveWindow::for_bump(&cfg.grid, width);
    if !(window.hi > window.lo) {
        return Err(crate::experiments::ExperimentError::EmptyWindow { lo: window.lo, hi: window.hi }.into());
    }
    let ts = geometric_times(window.lo, window.hi, cfg.params.dispersive_times);
    let mut table = CsvTable::new(&["r", "t", "norm", "in_window"]);
    let mut fits = CsvTable::new(&["r", "slope", "predicted", "residual_std_error", "samples"]);
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    for &r in &cfg.params.dispersive_r {
        let rep = dispersive_decay(&f, &ts, r, window)?;
        for (t, v) in &rep.rows {
            table.push(cells(&[&r, t, v, &window.contains(*t)]));
        }
        fits.push(cells(&[&r, &rep.fit.slope, &rep.predicted, &rep.fit.residual_std_error, &rep.fit.samples]));
        let tol = if r.is_infinite() { 0.2 } else { 0.15 };
        checks.push(Check::within(&format!("exponent_r_{r}"), rep.fit.slope, rep.predicted, tol));
        reports.push(json!({ "r": r, "fit": rep.fit, "predicted": rep.predicted }));
    }
    out.csv("dispersive", "dispersive", &table)?;
    out.csv("dispersive", "dispersive_fits", &fits)?;
    Ok(Summary::new("dispersive", checks, json!({ "window": window, "fits": reports })))
}

fn bilinear(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let p = &cfg.params;
    let (w1, w2) = p.bilinear_widths;
    let phi1 = gaussian_bump(cfg.grid, w1)?;
    let d = p.bilinear_direction;
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let grid = cfg.grid;
    let sweep = bilinear_sweep(&phi1, p.bilinear_n1, &p.bilinear_n2, cfg.time_grid, |n2| {
        let xi0 = [0, 1, 2].map(|i| n2 as f64 * d[i] / norm);
        wave_packet(grid, [0.0; 3], xi0, w2)
    })?;
    let mut table = CsvTable::new(&["n1", "n2", "value", "ratio"]);
    for r in &sweep.rows {
        table.push(cells(&[&r.n1, &r.n2, &r.value, &r.ratio]));
    }
    out.csv("bilinear", "bilinear", &table)?;
    let checks = vec![Check::at_most("n2_exponent", sweep.fit.slope, -0.5 + 0.15)];
    Ok(Summary::new("bilinear", checks, json!({ "fit": sweep.fit })))
}

fn gain(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<Summary, IoError> {
    let p = &cfg.params;
    let axis = if p.gain_time_axis {
        GainAxis::Time { ts: p.gain_values.clone(), block: p.gain_block }
    } else {
        GainAxis::Frequency { ns: p.gain_values.iter().map(|v| *v as u64).collect() }
    };
    let spec = GainSpec {
        k: p.gain_k,
        q: p.gain_q,
        r: p.gain_r,
        time_grid: cfg.time_grid,
        quadrature: cfg.quadrature,
        window: cfg.random.window,
        axis,
    };
    let rep = integrability_gain(&ensemble(cfg), &base_data(cfg)?, &spec)?;
    let mut table = CsvTable::new(&["abscissa", "median", "lower_quartile", "upper_quartile", "mean"]);
    for (x, s) in &rep.rows {
        table.push(cells(&[x, &s.median, &s.lower_quartile, &s.upper_quartile, &s.mean]));
    }
    out.csv("gain", "gain", &table)?;
    let check = if p.gain_time_axis {
        Check::at_least("t_exponent", rep.fit.slope, rep.predicted - 0.15)
    } else {
        Check::at_most("n_exponent", rep.fit.slope, rep.predicted + 0.15)
    };
    Ok(Summary::new("gain", vec![check], json!({ "fit": rep.fit, "predicted": rep.predicted })))
}
