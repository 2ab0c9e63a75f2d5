//! Subcommand orchestration: each stage reads only its config sections,
//! writes CSV/JSON artifacts into the output directory and returns a
//! [`RunReport`].

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ablab_core::cocycle::{expander_family_f64, expander_size, freeness_certificate, FreenessStatus};
use ablab_core::measures::{
    bernoulli_estimate, bernoulli_fourier, density_smoothness_probe, furstenberg_fixed_point, furstenberg_mc,
    pisot_nondecay_probe, stationarity_residual, MeasureEstimate,
};
use ablab_core::numberfield::{conjugates, diophantine_floor, hypothesis_check, integrality_scale, pisot_check};
use ablab_core::seeds::derive_seed;
use ablab_core::spectrum::{
    dyadic_scales, energy_derivative_probe, halperin_alpha, holder_probe, ids_sturm, lyapunov_from_ids, lyapunov_mc,
    lyapunov_operator, spectral_csv, EnergyGrid, SpectralRow,
};
use ablab_core::transferop::{
    build_operator, deviation_decay, expander_average_norm_for, restricted_norm_scan, smoothing_suite, DecayCurve,
    Frame, SmoothingParams, Variant,
};
use clap::ValueEnum;
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cache::Cache;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{collect_reports, RunReport, AGGREGATE_NAME, TOOL_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckLambda,
    FreeCert,
    Gap,
    Spectrum,
    Smoothing,
    Measure,
    Bernoulli,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::CheckLambda => "check-lambda",
            Self::FreeCert => "free-cert",
            Self::Gap => "gap",
            Self::Spectrum => "spectrum",
            Self::Smoothing => "smoothing",
            Self::Measure => "measure",
            Self::Bernoulli => "bernoulli",
            Self::Report => "report",
        }
    }
}

/// Validates the config, runs the subcommand on a pool of `threads`
/// workers, and saves its report next to the artifacts.
pub fn run(command: Command, config: &ExperimentConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let outdir = config.outdir.as_path();
    std::fs::create_dir_all(outdir).map_err(|source| CliError::Io {
        path: outdir.to_path_buf(),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::stage("setup", e))?;
    let mut report = RunReport::new(command.name(), config);
    let cache = Cache::locate(outdir);
    pool.install(|| {
        let mut ctx = Ctx {
            config,
            outdir,
            cache: &cache,
            report: &mut report,
        };
        match command {
            Command::CheckLambda => check_lambda(&mut ctx),
            Command::FreeCert => free_cert(&mut ctx),
            Command::Gap => gap(&mut ctx),
            Command::Spectrum => spectrum(&mut ctx),
            Command::Smoothing => smoothing(&mut ctx),
            Command::Measure => measure(&mut ctx),
            Command::Bernoulli => bernoulli(&mut ctx),
            Command::Report => aggregate(&mut ctx),
        }
    })?;
    if command != Command::Report {
        report.save(outdir)?;
    }
    Ok(report)
}

struct Ctx<'a> {
    config: &'a ExperimentConfig,
    outdir: &'a Path,
    cache: &'a Cache,
    report: &'a mut RunReport,
}

impl Ctx<'_> {
    fn timed<T>(
        &mut self,
        stage: &'static str,
        f: impl FnOnce(&mut Self) -> Result<T, CliError>,
    ) -> Result<T, CliError> {
        let start = Instant::now();
        info!("stage {stage}");
        let out = f(self);
        self.report.timings.push(crate::report::StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        self.report.write_artifact(self.outdir, name, body.as_bytes())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.report.write_json(self.outdir, name, value)
    }

    fn lambda(&self) -> Result<f64, CliError> {
        self.config.lambda_value()
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut s = cells.join(",");
    s.push('\n');
    s
}

fn check_lambda(ctx: &mut Ctx) -> Result<(), CliError> {
    let alpha = ctx.config.require_algebraic()?;
    let c = ctx.config.c;
    let r = expander_size(alpha.value(), ctx.config.tau);
    let body = ctx.timed("hypothesis_check", |_| {
        let rep = hypothesis_check(&alpha, c).map_err(|e| CliError::stage("hypothesis_check", e))?;
        let conj = conjugates(&alpha).map_err(|e| CliError::stage("conjugates", e))?;
        let pisot = pisot_check(&alpha).map_err(|e| CliError::stage("pisot_check", e))?;
        Ok(json!({
            "lambda": alpha.value(),
            "min_poly": alpha.coeffs(),
            "hypotheses": rep,
            "all_ok": rep.all_ok(),
            "pisot": pisot,
            "conjugates": conj.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "integrality_scale": integrality_scale(&alpha),
            "expander_size": r,
            "diophantine_floor_l6": diophantine_floor(&alpha, r.max(1), 6),
        }))
    })?;
    ctx.write_json("check_lambda.json", &body)?;
    ctx.report.metric("all_ok", &body["all_ok"], "check_lambda.json");
    ctx.report.metric("pisot", &body["pisot"], "check_lambda.json");
    Ok(())
}

fn free_cert(ctx: &mut Ctx) -> Result<(), CliError> {
    let alpha = ctx.config.require_algebraic()?;
    let spec = ctx.config.free_cert.clone();
    let cert = ctx.timed("freeness_certificate", |_| {
        freeness_certificate(&alpha, spec.mu_mode, spec.max_length, spec.floor_r)
            .map_err(|e| CliError::stage("freeness_certificate", e))
    })?;
    ctx.write_json("free_cert.json", &cert)?;
    let free = cert.status == FreenessStatus::FreeUpToLength;
    ctx.report.metric("free_up_to_length", free, "free_cert.json");
    ctx.report.metric("words_checked", cert.words_checked, "free_cert.json");
    ctx.report.metric("min_distance", cert.min_distance, "free_cert.json");
    ctx.report
        .metric("floor_violations", cert.floor_violations, "free_cert.json");
    ctx.report.metric(
        "witness",
        cert.witness.as_ref().map(|w| format!("{w:?}")),
        "free_cert.json",
    );
    Ok(())
}

fn gap(ctx: &mut Ctx) -> Result<(), CliError> {
    let lambda = ctx.lambda()?;
    let op_spec = ctx.config.operator.clone();
    let cache = ctx.cache;
    let (op, event) = ctx.timed("build_operator", |_| {
        cache.operator(
            op_spec.energy,
            lambda,
            op_spec.n_max,
            op_spec.quadrature,
            op_spec.variant,
            op_spec.frame,
        )
    })?;
    ctx.report.cache.push(event);
    let scan = ctx.timed("restricted_norm", |_| {
        restricted_norm_scan(&op, &op_spec.k_list).map_err(|e| CliError::stage("restricted_norm", e))
    })?;
    let mut csv = csv_line(&["K", "norm", "gap", "iterations", "half_size_norm", "sensitivity"].map(String::from));
    for r in &scan {
        csv.push_str(&csv_line(&[
            r.k.to_string(),
            r.norm.to_string(),
            r.gap().to_string(),
            r.iterations.to_string(),
            r.half_size_norm.to_string(),
            r.sensitivity.to_string(),
        ]));
    }
    ctx.write("gap.csv", &csv)?;
    let best = scan.iter().min_by(|a, b| a.norm.total_cmp(&b.norm));
    ctx.report
        .metric("min_restricted_norm", best.map(|r| r.norm), "gap.csv");
    ctx.report.metric("best_K", best.map(|r| r.k), "gap.csv");
    ctx.report
        .metric("sensitivity_at_best_K", best.map(|r| r.sensitivity), "gap.csv");
    let monotone = scan.windows(2).all(|w| w[1].norm <= w[0].norm + 1e-6);
    ctx.report.metric("monotone_in_K", monotone, "gap.csv");

    let tau = ctx.config.tau;
    let expander = ctx.timed("expander_average", |_| {
        let family = expander_family_f64(lambda, tau).map_err(|e| CliError::stage("expander_family", e))?;
        if family.is_empty() {
            return Ok(None);
        }
        expander_average_norm_for(
            &family,
            op_spec.expander_k,
            op_spec.expander_n_max,
            op_spec.expander_quadrature,
        )
        .map(Some)
        .map_err(|e| CliError::stage("expander_average", e))
    })?;
    let operator_info = json!({
        "meta": op.meta,
        "hermitian_defect": op.hermitian_defect(),
        "expander": expander,
    });
    ctx.write_json("gap.json", &operator_info)?;
    ctx.report
        .metric("quadrature_change", op.meta.quadrature_change, "gap.json");
    ctx.report
        .metric("expander_norm", expander.as_ref().map(|e| e.norm), "gap.json");
    Ok(())
}

fn spectrum(ctx: &mut Ctx) -> Result<(), CliError> {
    let lambda = ctx.lambda()?;
    let cfg = ctx.config;
    let grid = cfg.energy_grid()?;
    let seed = cfg.seed;
    let mc = cfg.mc.clone();
    let sp = cfg.spectrum.clone();

    let mc_seeds: Vec<u64> = (0..grid.len() as u64)
        .map(|i| derive_seed(seed, "spectrum_lyapunov_mc", i))
        .collect();
    for (i, s) in mc_seeds.iter().enumerate() {
        ctx.report.seed(&format!("lyapunov_mc[{i}]"), seed, *s);
    }
    let l_mc = ctx.timed("lyapunov_mc", |_| {
        grid.points
            .par_iter()
            .zip(&mc_seeds)
            .map(|(&e, &s)| lyapunov_mc(e, lambda, mc.steps, s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::stage("lyapunov_mc", e))
    })?;

    let l_op = ctx.timed("lyapunov_operator", |_| {
        grid.points
            .par_iter()
            .map(|&e| {
                let op = build_operator(
                    e,
                    lambda,
                    sp.operator_n_max,
                    sp.operator_quadrature,
                    Variant::Plain,
                    Frame::Raw,
                )
                .map_err(|err| CliError::stage("build_operator", err))?;
                match lyapunov_operator(&op, sp.operator_ell) {
                    Ok(v) => Ok((v.value, v.residual)),
                    Err(err) => {
                        warn!("operator Lyapunov estimate at E = {e} unavailable: {err}");
                        Ok((f64::NAN, f64::NAN))
                    }
                }
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    let ids_seed = derive_seed(seed, "spectrum_ids", 0);
    ctx.report.seed("ids_sturm", seed, ids_seed);
    let ids = ctx.timed("ids_sturm", |_| {
        ids_sturm(&grid, lambda, mc.sites, mc.samples, ids_seed).map_err(|e| CliError::stage("ids_sturm", e))
    })?;

    let edge = 2.0 + lambda + sp.window_margin;
    let window = EnergyGrid::uniform(-edge, edge, sp.ids_points).map_err(|e| CliError::stage("ids_window", e))?;
    let window_ids = ctx.timed("ids_window", |_| {
        ids_sturm(&window, lambda, mc.sites, mc.samples, ids_seed).map_err(|e| CliError::stage("ids_sturm", e))
    })?;
    let window_data: Vec<(f64, f64)> = window_ids.iter().map(|p| (p.energy, p.n)).collect();
    let l_thouless = ctx.timed("thouless", |_| {
        lyapunov_from_ids(&window_data, &grid.points).map_err(|e| CliError::stage("thouless", e))
    })?;

    let alpha0 = halperin_alpha(lambda);
    let rows: Vec<SpectralRow> = grid
        .points
        .iter()
        .enumerate()
        .map(|(i, &e)| SpectralRow {
            E: e,
            L_mc: l_mc[i].value,
            L_mc_se: l_mc[i].stderr,
            L_op: l_op[i].0,
            L_op_resid: l_op[i].1,
            N: ids[i].n,
            N_se: ids[i].stderr,
            alpha0,
        })
        .collect();
    ctx.write("spectrum.csv", &spectral_csv(&rows))?;

    let mut ids_csv = String::from("E,N,N_se\n");
    for p in &window_ids {
        let _ = writeln!(ids_csv, "{},{},{}", p.energy, p.n, p.stderr);
    }
    ctx.write("ids_window.csv", &ids_csv)?;

    let mut th_csv = String::from("E,L_thouless,L_mc,L_mc_se,abs_diff\n");
    let mut worst: f64 = 0.0;
    for (i, &(e, lt)) in l_thouless.iter().enumerate() {
        let d = (lt - l_mc[i].value).abs();
        worst = worst.max(d);
        let _ = writeln!(th_csv, "{},{},{},{},{}", e, lt, l_mc[i].value, l_mc[i].stderr, d);
    }
    ctx.write("thouless.csv", &th_csv)?;
    ctx.report.metric("thouless_max_abs_diff", worst, "thouless.csv");
    let max_abs_l = rows.iter().map(|r| r.L_mc.abs()).fold(0.0, f64::max);
    ctx.report.metric("max_abs_L_mc", max_abs_l, "spectrum.csv");
    ctx.report.metric("alpha0", alpha0, "spectrum.csv");

    let span = window.points[window.len() - 1] - window.points[0];
    let holder = holder_probe(&window_data, &dyadic_scales(span, sp.holder_scales))
        .map_err(|e| CliError::stage("holder_probe", e))?;
    ctx.write_json("holder.json", &holder)?;
    ctx.report.metric("holder_alpha_hat", holder.alpha_hat, "holder.json");
    ctx.report.metric("holder_r_squared", holder.r_squared, "holder.json");
    Ok(())
}

fn curve_rows(csv: &mut String, name: &str, c: &DecayCurve) {
    for (x, y) in c.xs.iter().zip(&c.ys) {
        let _ = writeln!(csv, "{name},{x},{y}");
    }
}

#[derive(Serialize)]
struct CurveSummary<'a> {
    curve: String,
    label: &'a str,
    floor: f64,
    rate: Option<f64>,
    r_squared: Option<f64>,
}

fn summary(curve: String, c: &DecayCurve) -> CurveSummary<'_> {
    CurveSummary {
        curve,
        label: &c.label,
        floor: c.floor,
        rate: c.fit.map(|f| f.rate),
        r_squared: c.fit.map(|f| f.r_squared),
    }
}

fn fixed_point_cached(
    ctx: &mut Ctx,
    energy: f64,
    lambda: f64,
    n_max: usize,
    quadrature: usize,
    frame: Frame,
) -> Result<(MeasureEstimate, ablab_core::transferop::OperatorMatrix), CliError> {
    let cache = ctx.cache;
    let (op, ev) = cache.operator(energy, lambda, n_max, quadrature, Variant::Plain, frame)?;
    ctx.report.cache.push(ev);
    let (nu, ev) = cache.json(
        "furstenberg_fixed_point",
        &(energy, lambda, n_max, quadrature, frame),
        || furstenberg_fixed_point(&op).map_err(|e| CliError::stage("furstenberg_fixed_point", e)),
    )?;
    ctx.report.cache.push(ev);
    Ok((nu, op))
}

fn smoothing(ctx: &mut Ctx) -> Result<(), CliError> {
    let lambda = ctx.lambda()?;
    let cfg = ctx.config;
    let op_spec = cfg.operator.clone();
    let sm = cfg.smoothing.clone();
    let energy = op_spec.energy;
    let params = SmoothingParams {
        n_max: op_spec.n_max,
        quadrature: op_spec.quadrature,
        ks: sm.ks.clone(),
        m_max: sm.m_max,
        samples: sm.samples,
        seed: derive_seed(cfg.seed, "smoothing_suite", 0),
        sobolev: sm.sobolev.clone(),
        derivative_sobolev: sm.derivative_sobolev,
        ell_max: sm.ell_max,
        f: None,
    };
    ctx.report.seed("smoothing_suite", cfg.seed, params.seed);
    let suite = ctx.timed("smoothing_suite", |_| {
        smoothing_suite(energy, lambda, &params).map_err(|e| CliError::stage("smoothing_suite", e))
    })?;

    let mut csv = String::from("curve,x,value\n");
    curve_rows(&mut csv, "boundedness", &suite.boundedness);
    for (k, c) in &suite.high_mode_decay {
        curve_rows(&mut csv, &format!("high_mode_k{k}"), c);
    }
    for (s, c) in &suite.sobolev_envelope {
        curve_rows(&mut csv, &format!("sobolev_s{s}"), c);
    }
    curve_rows(&mut csv, "derivative_sup", &suite.derivative_sup);
    curve_rows(&mut csv, "derivative_sobolev", &suite.derivative_sobolev);
    ctx.write("smoothing_curves.csv", &csv)?;

    let mut summaries = vec![summary("boundedness".into(), &suite.boundedness)];
    summaries.extend(
        suite
            .high_mode_decay
            .iter()
            .map(|(k, c)| summary(format!("high_mode_k{k}"), c)),
    );
    summaries.extend(
        suite
            .sobolev_envelope
            .iter()
            .map(|(s, c)| summary(format!("sobolev_s{s}"), c)),
    );
    summaries.push(summary("derivative_sup".into(), &suite.derivative_sup));
    summaries.push(summary("derivative_sobolev".into(), &suite.derivative_sobolev));
    let fits = json!({ "curves": summaries, "no_gap": suite.no_gap, "max_leakage": suite.max_leakage });
    ctx.write_json("smoothing.json", &fits)?;
    for (k, c) in &suite.high_mode_decay {
        ctx.report.metric(
            &format!("high_mode_k{k}_r_squared"),
            c.fit.map(|f| f.r_squared),
            "smoothing.json",
        );
        ctx.report
            .metric(&format!("high_mode_k{k}_rate"), c.fit.map(|f| f.rate), "smoothing.json");
    }
    ctx.report.metric("no_gap", suite.no_gap, "smoothing.json");
    let d = &suite.derivative_sup;
    if d.ys.len() > 30 {
        ctx.report
            .metric("derivative_ratio_30_15", d.ratio(15, 30), "smoothing_curves.csv");
    }

    let (nu, raw) = ctx.timed("furstenberg_raw", |c| {
        fixed_point_cached(c, energy, lambda, op_spec.n_max, op_spec.quadrature, Frame::Raw)
    })?;
    let phi = ablab_core::spectrum::phi_fourier(energy, lambda, op_spec.n_max, op_spec.quadrature);
    let dev = ctx.timed("deviation_decay", |_| {
        deviation_decay(&raw, &phi, sm.deviation_ell, &nu).map_err(|e| CliError::stage("deviation_decay", e))
    })?;
    let mut dcsv = String::from("ell,d\n");
    for (l, v) in dev.values.iter().enumerate() {
        let _ = writeln!(dcsv, "{l},{v}");
    }
    ctx.write("deviation.csv", &dcsv)?;
    ctx.report.metric("stationary_mean_phi", dev.mean, "deviation.csv");
    if dev.values.len() > 40 {
        ctx.report.metric(
            "deviation_ratio_40_20",
            dev.values[40] / dev.values[20],
            "deviation.csv",
        );
    }

    let probe = ctx.timed("energy_derivative_probe", |_| {
        energy_derivative_probe(
            energy,
            lambda,
            sm.derivative_order,
            sm.derivative_ell,
            sm.derivative_n_max,
            sm.derivative_quadrature,
        )
        .map_err(|e| CliError::stage("energy_derivative_probe", e))
    })?;
    let mut pcsv = String::from("j,expansion_sup,phi_derivative_sup\n");
    for (j, (a, b)) in probe.expansion_sup.iter().zip(&probe.phi_derivative_sup).enumerate() {
        let _ = writeln!(pcsv, "{j},{a},{b}");
    }
    ctx.write("derivative.csv", &pcsv)?;
    let mut ncsv = String::from("m1,m2,m3,sup\n");
    for t in &probe.nested {
        let _ = writeln!(ncsv, "{},{},{},{}", t.m1, t.m2, t.m3, t.sup);
    }
    ctx.write("nested.csv", &ncsv)?;
    ctx.report.metric(
        "finite_difference_error",
        probe.finite_difference_error,
        "derivative.csv",
    );
    ctx.report
        .metric("nested_slope", probe.nested_fit.map(|f| f.slope), "nested.csv");
    Ok(())
}

fn measure(ctx: &mut Ctx) -> Result<(), CliError> {
    let lambda = ctx.lambda()?;
    let cfg = ctx.config;
    let energy = cfg.operator.energy;
    let ms = cfg.measure.clone();
    let burn_in = cfg.mc.burn_in;
    let (fp, op) = ctx.timed("furstenberg_fixed_point", |c| {
        fixed_point_cached(c, energy, lambda, ms.n_max, ms.quadrature, ms.frame)
    })?;
    let mc_seed = derive_seed(cfg.seed, "furstenberg_mc", 0);
    ctx.report.seed("furstenberg_mc", cfg.seed, mc_seed);
    let mc = ctx.timed("furstenberg_mc", |_| {
        furstenberg_mc(energy, lambda, ms.mc_samples, burn_in, mc_seed, ms.frame, ms.compare_n)
            .map_err(|e| CliError::stage("furstenberg_mc", e))
    })?;
    let smooth = ctx.timed("density_smoothness", |_| {
        density_smoothness_probe(&fp, ms.smoothness_r).map_err(|e| CliError::stage("density_smoothness", e))
    })?;

    let se = mc.stderr.clone().unwrap_or_default();
    let mut csv = String::from("n,fp_re,fp_im,mc_re,mc_im,mc_se,abs_diff\n");
    let mut worst: f64 = 0.0;
    let cn = ms.compare_n as i64;
    for n in -cn..=cn {
        let (a, b) = (fp.coeff(n), mc.coeff(n));
        let d = (a - b).norm();
        worst = worst.max(d);
        let s = se.get((n + cn) as usize).copied().unwrap_or(f64::NAN);
        let _ = writeln!(csv, "{n},{},{},{},{},{s},{d}", a.re, a.im, b.re, b.im);
    }
    ctx.write("measure_fourier.csv", &csv)?;
    ctx.write("measure_histogram.csv", &fp.histogram_csv())?;
    let mut bcsv = String::from("k,energy,pairing_max\n");
    for b in &smooth.blocks {
        let _ = writeln!(bcsv, "{},{},{}", b.k, b.energy, b.pairing_max);
    }
    ctx.write("smoothness.csv", &bcsv)?;
    let residual = stationarity_residual(&op, &fp.fourier);
    ctx.write_json(
        "measure.json",
        &json!({
            "fixed_point_meta": fp.meta,
            "monte_carlo_meta": mc.meta,
            "stationarity_residual": residual,
            "smoothness": smooth,
        }),
    )?;
    ctx.report.metric("oracle_max_abs_diff", worst, "measure_fourier.csv");
    ctx.report.metric("stationarity_residual", residual, "measure.json");
    ctx.report
        .metric("smoothness_exponent", smooth.exponent, "smoothness.csv");
    ctx.report.metric("density_verdict", smooth.verdict, "measure.json");
    Ok(())
}

fn bernoulli(ctx: &mut Ctx) -> Result<(), CliError> {
    let lambda = ctx.lambda()?;
    let spec = ctx.config.bernoulli.clone();
    let mut lambdas = Vec::new();
    if lambda > 0.0 && lambda < 1.0 {
        lambdas.push(lambda);
    }
    for &l in &spec.lambdas {
        if !lambdas.contains(&l) {
            lambdas.push(l);
        }
    }

    let (values, probes) = ctx.timed("bernoulli_fourier", |_| {
        let mut values = String::from("lambda,xi,value,tail_bound,terms\n");
        let mut probes = String::from("lambda,k,abs_value\n");
        for &l in &lambdas {
            for &xi in &spec.xi {
                let v = bernoulli_fourier(l, xi).map_err(|e| CliError::stage("bernoulli_fourier", e))?;
                let _ = writeln!(values, "{l},{xi},{},{},{}", v.value, v.tail_bound, v.terms);
            }
            let p = pisot_nondecay_probe(l, spec.k_max).map_err(|e| CliError::stage("pisot_nondecay_probe", e))?;
            for (k, v) in p.iter().enumerate() {
                let _ = writeln!(probes, "{l},{k},{v}");
            }
        }
        Ok((values, probes))
    })?;
    ctx.write("bernoulli_values.csv", &values)?;
    ctx.write("pisot_probe.csv", &probes)?;
    for &l in &lambdas {
        let p = pisot_nondecay_probe(l, spec.k_max).map_err(|e| CliError::stage("pisot_nondecay_probe", e))?;
        let tail = p.iter().skip(5).copied().fold(f64::INFINITY, f64::min);
        ctx.report
            .metric(&format!("pisot_min_k5_lambda_{l}"), tail, "pisot_probe.csv");
    }
    if let Some(&l) = lambdas.first() {
        let nu = bernoulli_estimate(l, spec.n_max).map_err(|e| CliError::stage("bernoulli_estimate", e))?;
        ctx.write("bernoulli_histogram.csv", &nu.histogram_csv())?;
    }
    if let Some(alpha) = ctx.config.algebraic()? {
        let pisot = pisot_check(&alpha).map_err(|e| CliError::stage("pisot_check", e))?;
        ctx.write_json("bernoulli.json", &json!({ "lambda": alpha.value(), "pisot": pisot }))?;
        ctx.report.metric("pisot", pisot, "bernoulli.json");
    }
    Ok(())
}

fn aggregate(ctx: &mut Ctx) -> Result<(), CliError> {
    let runs = collect_reports(ctx.outdir)?;
    if runs.is_empty() {
        return Err(CliError::config("no artifacts found"));
    }
    for r in &runs {
        for m in &r.metrics {
            ctx.report.metrics.push(crate::report::Metric {
                name: format!("{}.{}", r.command, m.name),
                value: m.value.clone(),
                artifact: m.artifact.clone(),
            });
        }
    }
    let body = json!({ "tool_version": TOOL_VERSION, "runs": runs });
    ctx.write_json(AGGREGATE_NAME, &body)
}
