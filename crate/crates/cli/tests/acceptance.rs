//! Acceptance checks at full scale. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ablab_cli::{run, Command, ExperimentConfig, RunReport};
use ablab_core::cocycle::{
    circle_diff, fp_frame, freeness_certificate, mobius_angle, mobius_derivative, parabolic_pair, FreenessStatus, Mat2,
    MuMode, ProjectivePoint, Sign,
};
use ablab_core::measures::{bernoulli_fourier, pisot_nondecay_probe};
use ablab_core::numberfield::{real_root_f64, FieldElement, NumberField};
use ablab_core::seeds::task_rng;
use ablab_core::spectrum::{free_ids, halperin_alpha, ids_sturm, lyapunov_mc, EnergyGrid};
use ablab_core::transferop::{build_operator, restricted_norm, Frame, Variant};
use rand::Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget_s: f64,
    check: Box<dyn Fn(&Path) -> Outcome>,
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn golden() -> f64 {
    5f64.sqrt() - 2.0
}

fn full_scale_config(outdir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.outdir = outdir.to_path_buf();
    cfg.threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    cfg
}

fn run_stage(outdir: &Path, cmd: Command) -> Result<RunReport, String> {
    run(cmd, &full_scale_config(outdir)).map_err(|e| format!("{} failed: {e}", cmd.name()))
}

fn metric(report: &RunReport, name: &str) -> Result<f64, String> {
    report.metric_f64(name).ok_or_else(|| format!("metric {name} missing"))
}

fn exact_algebra(_: &Path) -> Outcome {
    let k = NumberField::new(&real_root_f64(&[-1, 4, 1], 0.2, 0.3).map_err(|e| e.to_string())?);
    let lam = FieldElement::generator(&k);
    let two_lam = lam.add(&lam);
    let one = FieldElement::one(&k);
    let zero = FieldElement::zero(&k);
    let h1_closed = Mat2::new(one.clone(), two_lam.clone(), zero.clone(), one.clone());
    let h2_closed = Mat2::new(one.clone(), zero, two_lam, one);
    let mut rng = task_rng(0, "acceptance_parabolic", 0);
    for _ in 0..20 {
        let p = FieldElement::from_int(&k, rng.random_range(-300..=300));
        let q = FieldElement::from_int(&k, rng.random_range(1..=97));
        let e = p.div(&q).map_err(|e| e.to_string())?;
        let (h1, h2) = parabolic_pair(&e, &lam).map_err(|e| e.to_string())?;
        if h1 != h1_closed || h2 != h2_closed {
            return Err(format!("parabolic identity fails at E = {}", e.to_f64()));
        }
    }
    let l = golden();
    let mut worst: f64 = 0.0;
    for j in 0..50 {
        let kappa = std::f64::consts::PI * (j as f64 + 0.5) / 50.0;
        let f = fp_frame(2.0 * kappa.cos(), l).map_err(|e| e.to_string())?;
        for s in [Sign::Plus, Sign::Minus] {
            worst = worst.max(f.tilde(s).sub(&f.closed_form(s)).max_abs());
        }
    }
    ensure(
        worst <= 1e-12,
        format!("20 rational E exact; Figotin-Pastur max entry error {worst:.2e} (tol 1e-12)"),
    )
}

fn projective_calculus(_: &Path) -> Outcome {
    let mut rng = task_rng(0, "acceptance_projective", 0);
    let (mut angle, mut chain, mut sandwich) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..1000 {
        let g = random_sl2(&mut rng);
        let h = random_sl2(&mut rng);
        let p = ProjectivePoint::new(rng.random_range(0.0..1.0));
        let lhs = mobius_angle(&g.mul(&h), p).x();
        let rhs = mobius_angle(&g, mobius_angle(&h, p)).x();
        angle = angle.max(circle_diff(lhs, rhs).abs());
        let dl = mobius_derivative(&g.mul(&h), p);
        let dr = mobius_derivative(&g, mobius_angle(&h, p)) * mobius_derivative(&h, p);
        chain = chain.max((dl - dr).abs() / dl);
        let n2 = g.norm().powi(2);
        let d = mobius_derivative(&g, p);
        if !(d >= (1.0 - 1e-12) / n2 && d <= n2 * (1.0 + 1e-12)) {
            sandwich += 1;
        }
    }
    ensure(
        angle <= 1e-10 && chain <= 1e-8 && sandwich == 0,
        format!(
            "composition {angle:.1e} (tol 1e-10), chain rule {chain:.1e} (tol 1e-8), sandwich violations {sandwich}"
        ),
    )
}

fn random_sl2(rng: &mut impl Rng) -> Mat2<f64> {
    loop {
        let a: f64 = rng.random_range(-3.0..3.0);
        let b: f64 = rng.random_range(-3.0..3.0);
        let c: f64 = rng.random_range(-3.0..3.0);
        if a.abs() > 0.2 {
            return Mat2::new(a, b, c, (1.0 + b * c) / a);
        }
    }
}

fn freeness(_: &Path) -> Outcome {
    let alpha = real_root_f64(&[-1, 4, 1], 0.2, 0.3).map_err(|e| e.to_string())?;
    let c = freeness_certificate(&alpha, MuMode::EntryTwoLambda, 6, 4).map_err(|e| e.to_string())?;
    let half = real_root_f64(&[-1, 2], 0.4, 0.6).map_err(|e| e.to_string())?;
    let h = freeness_certificate(&half, MuMode::EntryTwoLambda, 6, 4).map_err(|e| e.to_string())?;
    let witness_len = h.witness.as_ref().map(|w| w.len());
    ensure(
        c.status == FreenessStatus::FreeUpToLength
            && c.floor_violations == 0
            && h.status == FreenessStatus::CollisionFound
            && witness_len == Some(6)
            && h.witness_sign == Some(-1),
        format!(
            "sqrt5-2: {:?} over {} words, min distance {:.3e}, floor violations {}; lambda=1/2: {:?} length {:?} sign {:?}",
            c.status, c.words_checked, c.min_distance, c.floor_violations, h.status, witness_len, h.witness_sign
        ),
    )
}

fn free_case(_: &Path) -> Outcome {
    let mut worst_l: f64 = 0.0;
    for j in 0..=36 {
        let e = -1.8 + 0.1 * j as f64;
        let est = lyapunov_mc(e, 0.0, 1_000_000, j as u64).map_err(|e| e.to_string())?;
        worst_l = worst_l.max(est.value.abs());
    }
    let grid = EnergyGrid::uniform(-2.4, 2.4, 97).map_err(|e| e.to_string())?;
    let ids = ids_sturm(&grid, 0.0, 4000, 50, 7).map_err(|e| e.to_string())?;
    let worst_n = ids.iter().map(|p| (p.n - free_ids(p.energy)).abs()).fold(0.0, f64::max);
    let outside = lyapunov_mc(3.0, 0.0, 1_000_000, 99).map_err(|e| e.to_string())?.value;
    ensure(
        worst_l <= 5e-3 && worst_n <= 2e-3 && (outside - 0.962424).abs() <= 1e-3,
        format!("max |L| {worst_l:.2e} (tol 5e-3), max IDS error {worst_n:.2e} (tol 2e-3), L(3) = {outside:.6}"),
    )
}

fn thouless_consistency(dir: &Path) -> Outcome {
    let r = run_stage(dir, Command::Spectrum)?;
    let d = metric(&r, "thouless_max_abs_diff")?;
    ensure(
        d <= 2e-2,
        format!("max |L_thouless - L_mc| = {d:.2e} on the 31-point grid (tol 2e-2)"),
    )
}

fn spectral_gap(dir: &Path) -> Outcome {
    run_stage(dir, Command::Gap)?;
    let csv = fs::read_to_string(dir.join("gap.csv")).map_err(|e| e.to_string())?;
    let rows: Vec<(usize, f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    let gapped: Vec<_> = rows.iter().filter(|r| r.0 <= 64 && r.1 <= 1.0 - 1e-4).collect();
    let stable = gapped.iter().filter(|r| r.2 < 1e-3).count();
    let least_sensitive = gapped.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let control = build_operator(0.0, 0.0, 256, 4096, Variant::Plain, Frame::Tilde).map_err(|e| e.to_string())?;
    let control_norm = restricted_norm(&control, 32).map_err(|e| e.to_string())?.norm;
    let best = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    ensure(
        !gapped.is_empty() && stable > 0 && (control_norm - 1.0).abs() < 1e-6,
        format!(
            "{} of {} K have norm <= 1-1e-4 (min {best:.4}); smallest n_max 256 vs 128 change {least_sensitive:.2e} (tol 1e-3); lambda=0 control norm {control_norm:.6}",
            gapped.len(),
            rows.len()
        ),
    )
}

fn smoothing(dir: &Path) -> Outcome {
    let r = run_stage(dir, Command::Smoothing)?;
    let r2 = metric(&r, "high_mode_k5_r_squared")?;
    let dev = metric(&r, "deviation_ratio_40_20")?;
    let der = metric(&r, "derivative_ratio_30_15")?;
    ensure(
        r2 >= 0.95 && dev <= 0.5 && der <= 0.5,
        format!("k=5 decay R^2 {r2:.4} (>= 0.95), d40/d20 {dev:.2e} (<= 0.5), sup ratio 30/15 {der:.2e} (<= 0.5)"),
    )
}

fn derivative_expansion(dir: &Path) -> Outcome {
    let r = run_stage(dir, Command::Smoothing)?;
    let err = metric(&r, "finite_difference_error")?;
    let h: f64 = 1e-4;
    ensure(
        err <= 1e-4 + h * h,
        format!("expansion vs centered difference at l=20: {err:.2e} (tol 1e-4 + h^2)"),
    )
}

fn furstenberg(dir: &Path) -> Outcome {
    let r = run_stage(dir, Command::Measure)?;
    let diff = metric(&r, "oracle_max_abs_diff")?;
    let res = metric(&r, "stationarity_residual")?;
    ensure(
        diff <= 1e-2 && res <= 1e-8,
        format!("fixed point vs MC max diff {diff:.2e} for |n| <= 32 (tol 1e-2), residual {res:.2e} (tol 1e-8)"),
    )
}

fn bernoulli(_: &Path) -> Outcome {
    let mut worst: f64 = 0.0;
    for j in 1..=400 {
        let xi = 0.05 * j as f64;
        let x = 4.0 * std::f64::consts::PI * xi;
        let v = bernoulli_fourier(0.5, xi).map_err(|e| e.to_string())?.value;
        worst = worst.max((v - x.sin() / x).abs());
    }
    let inv_phi = 2.0 / (1.0 + 5f64.sqrt());
    let probe = pisot_nondecay_probe(inv_phi, 20).map_err(|e| e.to_string())?;
    let pisot_min = probe[5..=20].iter().copied().fold(f64::INFINITY, f64::min);
    let dyadic = bernoulli_fourier(0.5, 4096.0).map_err(|e| e.to_string())?.value.abs();
    ensure(
        worst <= 1e-10 && pisot_min >= 0.01 && dyadic <= 1e-3,
        format!(
            "sinc error {worst:.1e} (tol 1e-10); min_k |nu_1/phi(phi^k)| {pisot_min:.3e} (>= 0.01); |nu_1/2(2^12)| {dyadic:.1e} (<= 1e-3)"
        ),
    )
}

fn halperin(_: &Path) -> Outcome {
    let l = golden();
    let a = halperin_alpha(l);
    let reference = 2.0 * std::f64::consts::LN_2 / (l + (l * (2.0 + l)).sqrt()).ln_1p();
    let lambdas: Vec<f64> = (1..=20).map(|j| 0.05 * j as f64 - 0.025).collect();
    let monotone = lambdas.windows(2).all(|w| halperin_alpha(w[1]) < halperin_alpha(w[0]));
    ensure(
        (a - 2.0557).abs() <= 1e-3 && (a - reference).abs() <= 1e-12 && monotone,
        format!("alpha0 = {a:.6} (2.0557 +- 1e-3), independent evaluation {reference:.6}, decreasing on 20 points: {monotone}"),
    )
}

fn reproducibility(dir: &Path) -> Outcome {
    let (a, b) = (dir.join("a"), dir.join("b"));
    run_stage(&a, Command::Spectrum)?;
    run_stage(&b, Command::Spectrum)?;
    let mut differing = Vec::new();
    for name in ["spectrum.csv", "ids_window.csv", "thouless.csv"] {
        let x = fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(name)).map_err(|e| e.to_string())?;
        if x != y {
            differing.push(name);
        }
    }
    ensure(
        differing.is_empty(),
        format!("two spectrum runs, differing CSV files: {differing:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        Criterion {
            id: 1,
            name: "exact algebra",
            budget_s: 1.0,
            check: Box::new(exact_algebra),
        },
        Criterion {
            id: 2,
            name: "projective calculus",
            budget_s: 5.0,
            check: Box::new(projective_calculus),
        },
        Criterion {
            id: 3,
            name: "freeness and diophantine floor",
            budget_s: 60.0,
            check: Box::new(freeness),
        },
        Criterion {
            id: 4,
            name: "free-case ground truth",
            budget_s: 120.0,
            check: Box::new(free_case),
        },
        Criterion {
            id: 5,
            name: "Thouless consistency",
            budget_s: 600.0,
            check: Box::new(thouless_consistency),
        },
        Criterion {
            id: 6,
            name: "restricted spectral gap",
            budget_s: 600.0,
            check: Box::new(spectral_gap),
        },
        Criterion {
            id: 7,
            name: "smoothing suite",
            budget_s: 600.0,
            check: Box::new(smoothing),
        },
        Criterion {
            id: 8,
            name: "derivative expansion",
            budget_s: 300.0,
            check: Box::new(derivative_expansion),
        },
        Criterion {
            id: 9,
            name: "Furstenberg oracle agreement",
            budget_s: 300.0,
            check: Box::new(furstenberg),
        },
        Criterion {
            id: 10,
            name: "Bernoulli convolutions",
            budget_s: 10.0,
            check: Box::new(bernoulli),
        },
        Criterion {
            id: 11,
            name: "Halperin bound",
            budget_s: 1.0,
            check: Box::new(halperin),
        },
        Criterion {
            id: 12,
            name: "reproducibility",
            budget_s: 1200.0,
            check: Box::new(reproducibility),
        },
    ];
    let root = tempfile::tempdir().expect("temporary directory");
    let mut failures = 0;
    for c in &criteria {
        let dir = root.path().join(format!("c{}", c.id));
        let start = Instant::now();
        let outcome = (c.check)(&dir);
        let secs = start.elapsed().as_secs_f64();
        let timing = format!("{secs:.1}s of {:.0}s", c.budget_s);
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {}: {detail} [{timing}]", c.id, c.name),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {}: {detail} [{timing}]", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
