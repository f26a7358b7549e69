//! Numerical verification checks, grouped into the CLI suites.

use std::time::Instant;

use bifidelity::cost::{cost_bfsag, cost_bfsvrg, cost_ratio_sag};
use bifidelity::cv::{
    corrected_factor, cv_estimate, optimal_alpha_scalar, predicted_variance, CvCoefficient, MeanKind, PairedSamples,
};
use bifidelity::fem::{
    assemble_and_solve, compliance_gradient, element_stiffness, prolong, restrict, DensityField, FilterKernel, LoadCase,
    StructuredMesh,
};
use bifidelity::problems::{QuadraticTestProblem, TopOptProblem, TopOptSpec, TopOptVariant};
use bifidelity::rng::{stream, Purpose};
use bifidelity::sgd::{
    bfsag_run, bfsvrg_run, controlled_direction, draw_realizations, mean_vector, measure_linear_rate,
    realization_pool, AlphaMode, AnchorMode, BfSagConfig, BfSvrgConfig, DesignVector, RunContext,
};
use bifidelity::uncertainty::{build_kl_grid, CovarianceSpec};
use bifidelity::{BiFidelityOracle, Fidelity};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Settings};
use crate::error::HarnessError;
use crate::replicate::replicate;
use crate::run::execute;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Gradients,
    Cv,
    Kl,
    Costs,
    Rates,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "gradients" => Suite::Gradients,
            "cv" => Suite::Cv,
            "kl" => Suite::Kl,
            "costs" => Suite::Costs,
            "rates" => Suite::Rates,
            other => return Err(format!("unknown suite '{other}' (gradients, cv, kl, costs, rates)")),
        })
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>, HarnessError> {
    match suite {
        Suite::Gradients => Ok(vec![fem_gradient_check()?, transfer_check()?]),
        Suite::Cv => Ok(vec![cv_laws()?, variance_reduction()?]),
        Suite::Kl => Ok(vec![kl_spectrum()?]),
        Suite::Costs => Ok(vec![cost_ledger()?]),
        Suite::Rates => Ok(vec![contraction_check()?, example1_ordering()?, example1_rates(100)?]),
    }
}

fn core(ctx: &str) -> impl FnOnce(bifidelity::Error) -> HarnessError {
    HarnessError::core(ctx.to_string())
}

fn settings(json: &str) -> Result<Settings, HarnessError> {
    Ok(Settings::from_config(&ExperimentConfig::from_json(json)?)?)
}

fn variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

/// Estimator variance laws for exact and estimated control means, and
/// convergence of the sample coefficient.
pub fn cv_laws() -> Result<Check, HarnessError> {
    let t = Instant::now();
    let (sx, sy, n, n_l, reps) = (2.0f64, 1.0f64, 10usize, 40usize, 10_000usize);
    let mut ok = true;
    let mut parts = Vec::new();
    for (ri, rho) in [0.5f64, 0.9, 0.99].into_iter().enumerate() {
        let pair = |rng: &mut bifidelity::rng::StreamRng| -> (f64, f64) {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            (sx * a, sy * (rho * a + (1.0 - rho * rho).sqrt() * b))
        };
        let alpha = rho * sx / sy;
        let shrunk = alpha * corrected_factor::<f64>(n, n_l);
        let (exact, est): (Vec<f64>, Vec<f64>) = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream(31, Purpose::Validation, r as u64, ri as u64);
                let (x, y): (Vec<f64>, Vec<f64>) = (0..n).map(|_| pair(&mut rng)).unzip();
                let ybar = (0..n_l).map(|_| pair(&mut rng).1).sum::<f64>() / n_l as f64;
                let a = PairedSamples::scalar(&x, &y, 0.0, MeanKind::Exact).expect("paired");
                let b = PairedSamples::scalar(&x, &y, ybar, MeanKind::Estimated { n_l }).expect("paired");
                (
                    cv_estimate(&a, &CvCoefficient::Scalar(alpha)).expect("estimate")[0],
                    cv_estimate(&b, &CvCoefficient::Scalar(shrunk)).expect("estimate")[0],
                )
            })
            .unzip();
        let want_exact = predicted_variance(rho, sx * sx, n, None).map_err(core("cv law"))?;
        let want_est = predicted_variance(rho, sx * sx, n, Some(n_l)).map_err(core("cv law"))?;
        let e1 = variance(&exact) / want_exact - 1.0;
        let e2 = variance(&est) / want_est - 1.0;

        let mut rng = stream(32, Purpose::Validation, 0, ri as u64);
        let (x, y): (Vec<f64>, Vec<f64>) = (0..10_000).map(|_| pair(&mut rng)).unzip();
        let a_hat = optimal_alpha_scalar(&PairedSamples::scalar(&x, &y, 0.0, MeanKind::Exact).map_err(core("cv"))?)
            .map_err(core("cv alpha"))?;
        let e3 = a_hat / alpha - 1.0;
        ok &= e1.abs() < 0.2 && e2.abs() < 0.2 && e3.abs() < 0.05;
        parts.push(format!(
            "rho={rho}: exact-law err {:+.1}%, corrected-law err {:+.1}%, alpha err {:+.2}%",
            100.0 * e1,
            100.0 * e2,
            100.0 * e3
        ));
    }
    parts.push(format!("{:.1}s", t.elapsed().as_secs_f64()));
    Ok(Check::new("control-variate variance laws", ok, parts.join("; ")))
}

/// Adjoint SIMP gradients against central differences on a 12×4 mesh.
pub fn fem_gradient_check() -> Result<Check, HarnessError> {
    let t = Instant::now();
    let mesh = StructuredMesh::<f64>::unit(12, 4).map_err(core("mesh"))?;
    let kernel = FilterKernel::with_widths(&mesh, 1.5);
    let k0 = element_stiffness(0.3).map_err(core("element"))?;
    let mut fixed: Vec<usize> = (0..=mesh.nely).map(|iy| 2 * mesh.node(0, iy)).collect();
    fixed.push(2 * mesh.node(mesh.nelx, 0) + 1);
    let results: Vec<Result<f64, HarnessError>> = (0..20u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(41, Purpose::Validation, trial, 0);
            let theta: Vec<f64> = (0..mesh.n_elements()).map(|_| rng.random_range(0.2..=1.0)).collect();
            let mut force = vec![0.0; mesh.n_dofs()];
            for _ in 0..2 {
                let node = mesh.node(rng.random_range(1..=mesh.nelx), rng.random_range(0..=mesh.nely));
                let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let p: f64 = rng.random_range(0.5..1.5);
                force[2 * node] += p * angle.cos();
                force[2 * node + 1] += p * angle.sin();
            }
            let load = LoadCase {
                force,
                fixed: fixed.clone(),
            };
            let compliance = |th: &[f64]| -> bifidelity::Result<f64> {
                let rho = kernel.apply(th)?;
                Ok(assemble_and_solve(&mesh, &k0, &rho, None, &load, 3.0)?.compliance)
            };
            let field = DensityField::new(&kernel, theta.clone()).map_err(core("filter"))?;
            let sol = assemble_and_solve(&mesh, &k0, &field.rho, None, &load, 3.0).map_err(core("solve"))?;
            let g = compliance_gradient(&mesh, &k0, &kernel, &field, &sol, 3.0, None).map_err(core("gradient"))?;
            let h = 1e-4;
            let mut worst = 0.0f64;
            for i in 0..theta.len() {
                let mut tp = theta.clone();
                let mut tm = theta.clone();
                tp[i] += h;
                tm[i] -= h;
                let fd = (compliance(&tp).map_err(core("fd"))? - compliance(&tm).map_err(core("fd"))?) / (2.0 * h);
                worst = worst.max((fd - g[i]).abs() / g[i].abs());
            }
            Ok(worst)
        })
        .collect();
    let worst = results.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
    Ok(Check::new(
        "SIMP adjoint gradient vs central differences",
        worst < 1e-4,
        format!("20 trials, worst relative error {worst:.2e}, {:.1}s", t.elapsed().as_secs_f64()),
    ))
}

/// Restriction/prolongation exactness and refinement behavior.
pub fn transfer_check() -> Result<Check, HarnessError> {
    let err = core("transfer");
    let (nx, ny) = (24, 8);
    let constant = vec![0.7; nx * ny];
    let c = restrict(&constant, nx, ny).map_err(core("transfer"))?;
    let (back, _) = prolong(&c, nx / 2, ny / 2).map_err(core("transfer"))?;
    let const_ok = back.iter().all(|&v| v == 0.7);

    // Coarse centroid values of a linear field; fine centroids at (i+½)/2.
    let lin = |x: f64, y: f64| 0.4 - 0.3 * x + 0.2 * y;
    let coarse: Vec<f64> = (0..nx / 2)
        .flat_map(|i| (0..ny / 2).map(move |j| lin(i as f64 + 0.5, j as f64 + 0.5)))
        .collect();
    let (fine, _) = prolong(&coarse, nx / 2, ny / 2).map_err(err)?;
    let mut lin_err = 0.0f64;
    for i in 0..nx {
        for j in 0..ny {
            let want = lin((i as f64 + 0.5) / 2.0, (j as f64 + 0.5) / 2.0);
            lin_err = lin_err.max((fine[i * ny + j] - want).abs());
        }
    }

    let mut errs = Vec::new();
    for level in 0..3 {
        let (fx, fy) = (12 << level, 4 << level);
        let f = |i: usize, j: usize| {
            let x = (i as f64 + 0.5) / fx as f64;
            let y = (j as f64 + 0.5) / fy as f64;
            (std::f64::consts::PI * x).sin() * (2.0 * std::f64::consts::PI * y).cos()
        };
        let field: Vec<f64> = (0..fx).flat_map(|i| (0..fy).map(move |j| f(i, j))).collect();
        let r = restrict(&field, fx, fy).map_err(core("transfer"))?;
        let (p, _) = prolong(&r, fx / 2, fy / 2).map_err(core("transfer"))?;
        errs.push(p.iter().zip(&field).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    let refine_ok = errs[1] < errs[0] && errs[2] < errs[1];
    Ok(Check::new(
        "restriction/prolongation",
        const_ok && lin_err < 1e-10 && refine_ok,
        format!(
            "constant exact: {const_ok}; linear max err {lin_err:.1e}; sinusoid errors {:.3e} > {:.3e} > {:.3e}",
            errs[0], errs[1], errs[2]
        ),
    ))
}

pub const KL_TARGET: f64 = 0.9992;

/// Captured variance of 100 modes on the 120×40 centroid grid, σ=2, l=L/40.
pub fn kl_spectrum() -> Result<Check, HarnessError> {
    let t = Instant::now();
    let spec = TopOptSpec::<f64>::new(TopOptVariant::C);
    let l = spec.correlation_length();
    let cov = CovarianceSpec::new(2.0, l, l).map_err(core("kl"))?;
    let kl = build_kl_grid(&cov, 120, 40, 1.0, 100).map_err(core("kl"))?;
    let frac = kl.captured_fraction();
    Ok(Check::new(
        "KL captured variance (120x40, 100 modes)",
        (frac - KL_TARGET).abs() <= 0.002,
        format!(
            "captured {frac:.4} vs target {KL_TARGET} +/- 0.002 (l = {l}), {:.1}s",
            t.elapsed().as_secs_f64()
        ),
    ))
}

/// Ledger totals of actual runs against the closed forms.
pub fn cost_ledger() -> Result<Check, HarnessError> {
    let q = QuadraticTestProblem::new(2, 1.0, 2.0)
        .and_then(|p| p.with_noise(0.1))
        .map_err(core("quadratic"))?
        .with_gamma(0.096);
    let t0 = DesignVector::new(vec![2.0, 2.0]);
    let sag = bfsag_run(
        &q,
        &t0,
        &BfSagConfig {
            eta: 0.1,
            iters: 100,
            n: 100,
            n_l: 95,
            n_h: 5,
        },
        &mut RunContext::new(1),
    )
    .map_err(core("bfsag"))?;
    let svrg = bfsvrg_run(
        &q,
        &t0,
        &BfSvrgConfig {
            eta: 0.1,
            outer: 1,
            inner: 5,
            n_l: 20,
            n_h: 4,
            alpha_mode: AlphaMode::Diagonal,
            anchor: AnchorMode::Sampled,
        },
        &mut RunContext::new(1),
    )
    .map_err(core("bfsvrg"))?;
    let a = sag.last().cum_cost;
    let b = svrg.last().cum_cost;
    let ratio = cost_ratio_sag(5, 5, 0.015, 10).map_err(core("ratio"))?;
    let ok = a == 1412.0 && b == 23.84 && cost_bfsag(100, 5, 95, 0.096) == 1412.0 && cost_bfsvrg(1, 20, 5, 4, 0.096) == 23.84;
    Ok(Check::new(
        "cost ledger",
        ok,
        format!("BF-SAG run {a}, BF-SVRG run {b}, SAG cost ratio example {ratio:.4}"),
    ))
}

/// Per-iteration contraction of the mean squared error on the quadratic
/// problem with identical fidelities.
pub fn contraction_check() -> Result<Check, HarnessError> {
    let t = Instant::now();
    let (mu, l) = (1.0f64, 2.0f64);
    let seeds = 200u64;
    let q = QuadraticTestProblem::new(4, mu, l)
        .and_then(|p| p.with_noise(0.5))
        .map_err(core("quadratic"))?;
    let t0 = DesignVector::new(vec![4.0; 4]);
    let eig = q.eigenvalues().to_vec();

    // BF-SAG, eta = mu/L^2; error against the minimizer of the realization pool.
    let (n, iters) = (50usize, 40usize);
    let sag_cfg = BfSagConfig {
        eta: mu / (l * l),
        iters,
        n,
        n_l: 20,
        n_h: 5,
    };
    let sag_runs: Vec<Vec<f64>> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let pool = realization_pool(&q, n, s)?;
            let star: Vec<f64> = (0..4)
                .map(|i| 1.0 - 0.5 * pool.iter().map(|r| r.xi[i]).sum::<f64>() / n as f64 / eig[i])
                .collect();
            let mut ctx = RunContext::new(s).with_reference(&star);
            let tr = bfsag_run(&q, &t0, &sag_cfg, &mut ctx)?;
            Ok(tr.all_records().map(|r| r.dist_to_ref.unwrap().powi(2)).collect())
        })
        .collect::<bifidelity::Result<_>>()
        .map_err(core("bfsag"))?;

    // BF-SVRG with exact anchor, eta = mu/(2L^2).
    let svrg_cfg = BfSvrgConfig {
        eta: mu / (2.0 * l * l),
        outer: 8,
        inner: 5,
        n_l: 20,
        n_h: 5,
        alpha_mode: AlphaMode::Diagonal,
        anchor: AnchorMode::Exact,
    };
    let star = q.theta_star().to_vec();
    let svrg_runs: Vec<Vec<f64>> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let mut ctx = RunContext::new(s).with_reference(&star);
            let tr = bfsvrg_run(&q, &t0, &svrg_cfg, &mut ctx)?;
            Ok(tr.all_records().map(|r| r.dist_to_ref.unwrap().powi(2)).collect())
        })
        .collect::<bifidelity::Result<_>>()
        .map_err(core("bfsvrg"))?;

    let mse = |runs: &[Vec<f64>]| -> Vec<f64> {
        (0..runs[0].len())
            .map(|k| runs.iter().map(|r| r[k]).sum::<f64>() / runs.len() as f64)
            .collect()
    };
    let (c_sag, _) = measure_linear_rate(&mse(&sag_runs), 1.0).map_err(core("rate"))?;
    let (c_svrg, _) = measure_linear_rate(&mse(&svrg_runs), 1.0).map_err(core("rate"))?;
    let b1 = 1.0 - mu * mu / (l * l);
    let b2 = 1.0 - mu * mu / (2.0 * l * l);
    Ok(Check::new(
        "linear contraction on the quadratic",
        c_sag <= b1 + 0.02 && c_svrg <= b2 + 0.02,
        format!(
            "BF-SAG factor {c_sag:.4} (bound {b1:.4}), BF-SVRG factor {c_svrg:.4} (bound {b2:.4}), {seeds} seeds, {:.1}s",
            t.elapsed().as_secs_f64()
        ),
    ))
}

fn first_below(objs: &[Option<f64>], level: f64) -> Option<usize> {
    objs.iter().position(|o| o.is_some_and(|v| v <= level))
}

/// SAG (N_h=50) against BF-SAG (N_l=230, N_h=20) on the polynomial problem.
pub fn example1_ordering() -> Result<Check, HarnessError> {
    let t = Instant::now();
    let sag = execute(&settings(
        r#"{"problem":"example1","algorithm":"sag","params":{"eta":0.25,"iters":500,"n_h":50}}"#,
    )?)?;
    let bf = execute(&settings(
        r#"{"problem":"example1","algorithm":"bfsag","params":{"eta":0.25,"iters":500,"n_l":230,"n_h":20}}"#,
    )?)?;
    let so = sag.trace.objectives();
    let bo = bf.trace.objectives();
    let (s35, b35) = (first_below(&so, 0.35), first_below(&bo, 0.35));
    let (s30, b30) = (first_below(&so, 0.30), first_below(&bo, 0.30));
    let ok = s35.is_some() && b35.is_some() && b30.is_some() && (s30.is_none() || b30 <= s30);
    let fmt = |v: Option<usize>| v.map_or("never".to_string(), |k| k.to_string());
    Ok(Check::new(
        "polynomial regression SAG vs BF-SAG",
        ok,
        format!(
            "MSE<=0.35 at SAG {} / BF-SAG {}; MSE<=0.30 at SAG {} / BF-SAG {}; final MSE {:.4} / {:.4}, {:.1}s",
            fmt(s35),
            fmt(b35),
            fmt(s30),
            fmt(b30),
            sag.summary.final_objective.unwrap_or(f64::NAN),
            bf.summary.final_objective.unwrap_or(f64::NAN),
            t.elapsed().as_secs_f64()
        ),
    ))
}

/// Log-linear tail of the mean relative error over replications.
pub fn example1_rates(runs: usize) -> Result<Check, HarnessError> {
    let t = Instant::now();
    let sag = replicate(
        &settings(r#"{"problem":"example1","algorithm":"bfsag","params":{"eta":0.25,"iters":500,"n_l":230,"n_h":20}}"#)?,
        runs,
    )?;
    let svrg = replicate(
        &settings(
            r#"{"problem":"example1","algorithm":"bfsvrg","params":{"eta":0.25,"iters":25,"m":20,"n_l":200,"n_h":16}}"#,
        )?,
        runs,
    )?;
    let q = |a: &crate::replicate::Aggregate| a.rate.map_or(f64::NAN, |r| r.fit_quality);
    let f = |a: &crate::replicate::Aggregate| a.rate.map_or(f64::NAN, |r| r.factor);
    Ok(Check::new(
        "polynomial regression log-linear error tail",
        q(&sag) > 0.9 && q(&svrg) > 0.9,
        format!(
            "{runs} runs; BF-SAG fit {:.3} (factor {:.5}, final rel err {:.2e}); BF-SVRG fit {:.3} (factor {:.5}, final rel err {:.2e}), {:.1}s",
            q(&sag),
            f(&sag),
            sag.final_mean_rel_err,
            q(&svrg),
            f(&svrg),
            svrg.final_mean_rel_err,
            t.elapsed().as_secs_f64()
        ),
    ))
}

/// Desk-scale topology A with BF-SAG: smoothed objective and design contrast.
pub fn topopt_qualitative() -> Result<Check, HarnessError> {
    let t = Instant::now();
    let out = execute(&settings(
        r#"{"problem":"topopt-a","algorithm":"bfsag","params":{"nelx":60,"nely":20,"eta":0.05,"lambda":1,"iters":300,"n":100,"n_l":20,"n_h":5}}"#,
    )?)?;
    let obj: Vec<f64> = out.trace.objectives().into_iter().map(|o| o.unwrap_or(f64::NAN)).collect();
    let ma: Vec<f64> = (9..obj.len()).map(|k| obj[k - 9..=k].iter().sum::<f64>() / 10.0).collect();
    // ma[i] averages iterations i..=i+9; "after iteration 20" compares windows ending at 20 onward.
    let violations = (11..ma.len()).filter(|&i| ma[i] > ma[i - 1]).count();
    let p = out.problem.topopt.as_ref().expect("topology problem");
    let rho = p.densities(&out.trace.theta).map_err(core("densities"))?;
    let binary = rho.iter().filter(|&&r| !(0.2..=0.8).contains(&r)).count() as f64 / rho.len() as f64;
    Ok(Check::new(
        "topology A desk-scale BF-SAG design",
        violations == 0 && binary >= 0.4,
        format!(
            "objective {:.2} -> {:.2}, moving-average increases from iteration 20: {violations}; {:.1}% elements outside [0.2, 0.8]; mass ratio {:.3}, {:.1}s",
            obj[0],
            obj[obj.len() - 1],
            100.0 * binary,
            out.summary.final_mass_ratio.unwrap_or(f64::NAN),
            t.elapsed().as_secs_f64()
        ),
    ))
}

/// Per-direction variance of the controlled BF-SVRG direction against the
/// plain HIGH batch mean at a fixed topology B desk-scale design.
pub fn variance_reduction() -> Result<Check, HarnessError> {
    let t = Instant::now();
    let p = TopOptProblem::new(TopOptSpec::<f64>::desk(TopOptVariant::B)).map_err(core("topopt"))?;
    let theta = p.initial_design().map_err(core("topopt"))?.values;
    let (n_l, n_h, draws) = (20usize, 5usize, 200u64);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..draws)
        .into_par_iter()
        .map(|r| {
            let anchor = draw_realizations(&p, 77, Purpose::Anchor, r, n_l);
            let inner = draw_realizations(&p, 77, Purpose::Inner, r, n_h);
            let low_anchor = mean_vector(&p.grad_batch(&theta, &anchor, Fidelity::Low)?);
            let high = p.grad_batch(&theta, &inner, Fidelity::High)?;
            let low = p.grad_batch(&theta, &inner, Fidelity::Low)?;
            let d = controlled_direction(&high, &low, &low_anchor, AlphaMode::Diagonal, 1.0)?;
            Ok((d.direction, mean_vector(&high)))
        })
        .collect::<bifidelity::Result<_>>()
        .map_err(core("variance reduction"))?;
    let dims = theta.len();
    let mut better = 0usize;
    let mut ratio_sum = 0.0;
    for i in 0..dims {
        let d: Vec<f64> = pairs.iter().map(|p| p.0[i]).collect();
        let h: Vec<f64> = pairs.iter().map(|p| p.1[i]).collect();
        let (vd, vh) = (variance(&d), variance(&h));
        if vd < vh {
            better += 1;
        }
        ratio_sum += vd / vh;
    }
    let frac = better as f64 / dims as f64;
    Ok(Check::new(
        "BF-SVRG per-direction variance reduction",
        frac >= 0.8,
        format!(
            "{:.1}% of {dims} directions reduced, mean variance ratio {:.3}, {draws} draws, {:.1}s",
            100.0 * frac,
            ratio_sum / dims as f64,
            t.elapsed().as_secs_f64()
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!("kl".parse::<Suite>(), Ok(Suite::Kl));
        assert!("speed".parse::<Suite>().is_err());
    }

    #[test]
    fn cost_suite_passes() {
        assert!(cost_ledger().unwrap().passed);
    }

    #[test]
    fn transfer_suite_passes() {
        let c = transfer_check().unwrap();
        assert!(c.passed, "{}", c.detail);
    }
}
