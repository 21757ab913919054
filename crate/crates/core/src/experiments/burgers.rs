use std::f64::consts::PI;

use serde::Serialize;

use super::config::{GammaMode, GammaName};
use super::{analyse, build_ops, check_dense_limit, fmt_e, record_operator, series_csv, Check, ExperimentConfig, RunOutput};
use crate::burgers::{gamma_lf, gamma_opt, BurgersScheme};
use crate::dense::Dense;
use crate::diagnostics::h_norm;
use crate::error::{Error, Result};
use crate::linearization::{eigenpairs, eta_c_from_derivative, growth_rate_fit, jacobian, real_seed, spectrum_csv, Verdict};
use crate::multiblock::GlobalOperator;
use crate::timeint::{integrate, ssprk54_step, TimeLoopConfig};

/// `U(x) = 2 + sin(π(x - 0.7))` on the periodic unit interval.
pub fn burgers_base_flow(x: &[f64]) -> Vec<f64> {
    x.iter().map(|x| 2.0 + (PI * (x - 0.7)).sin()).collect()
}

/// Smooth 1-periodic data `2 + ½ sin(2π(x - 0.7))` for the refinement study.
/// The base flow above jumps across the periodic wrap, so it cannot show
/// design-order convergence.
pub fn convergence_initial(x: f64) -> f64 {
    2.0 + 0.5 * (2.0 * PI * (x - 0.7)).sin()
}

/// Exact pre-shock solution from [`convergence_initial`] (shock time `1/π`),
/// by Newton iteration on the characteristic foot `ξ + u₀(ξ) t = x`.
pub fn convergence_exact(x: f64, t: f64) -> f64 {
    let du0 = |s: f64| PI * (2.0 * PI * (s - 0.7)).cos();
    let mut xi = x - 2.0 * t;
    for _ in 0..100 {
        let f = xi + convergence_initial(xi) * t - x;
        let step = f / (1.0 + du0(xi) * t);
        xi -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    convergence_initial(xi)
}

/// The three `(α, γ)` cells of the Burgers experiments.
struct Cell {
    name: &'static str,
    alpha: f64,
    gamma: GammaName,
    expected: Verdict,
}

const CELLS: [Cell; 3] = [
    Cell { name: "alpha_2_3_gamma_0", alpha: 2.0 / 3.0, gamma: GammaName::Zero, expected: Verdict::Unstable },
    Cell { name: "alpha_2_3_gamma_opt", alpha: 2.0 / 3.0, gamma: GammaName::Opt, expected: Verdict::LocallyStable },
    Cell { name: "alpha_1_gamma_0", alpha: 1.0, gamma: GammaName::Zero, expected: Verdict::LocallyStable },
];

fn resolve_gamma(mode: GammaMode, ops: &GlobalOperator, alpha: f64, base: &[f64]) -> Result<f64> {
    Ok(match mode {
        GammaMode::Named(GammaName::Zero) => 0.0,
        GammaMode::Named(GammaName::Opt) => gamma_opt(ops, alpha, base)?,
        GammaMode::Named(GammaName::Lf) => gamma_lf(base),
        GammaMode::Value(v) => v,
    })
}

/// Jacobian of the Burgers right-hand side at `base`.
pub fn burgers_jacobian(scheme: &BurgersScheme, base: &[f64]) -> Result<Dense> {
    jacobian(|u| Ok(scheme.rhs(u)), base)
}

#[derive(Serialize)]
struct CellSummary {
    cell: &'static str,
    alpha: f64,
    gamma: f64,
    lambda_max_re: f64,
    lambda_max_im: f64,
    norm_q: f64,
    eta_c: f64,
    band: f64,
    stable_tol: f64,
    verdict: Verdict,
    expected: Verdict,
}

struct Setup {
    ops: GlobalOperator,
    x: Vec<f64>,
    base: Vec<f64>,
    eta: f64,
}

fn setup(config: &ExperimentConfig, out: &mut RunOutput) -> Result<Setup> {
    let ops = build_ops(config, 1.0, 0.0)?;
    check_dense_limit(config, ops.size())?;
    record_operator(out, "element", &ops);
    let x = ops.nodes();
    let base = burgers_base_flow(&x);
    let eta = eta_c_from_derivative(&ops.apply_d(&base));
    Ok(Setup { ops, x, base, eta })
}

fn cell_scheme(s: &Setup, cell: &Cell) -> Result<BurgersScheme> {
    let gamma = resolve_gamma(GammaMode::Named(cell.gamma), &s.ops, cell.alpha, &s.base)?;
    BurgersScheme::new(s.ops.clone(), cell.alpha, gamma)
}

fn mode_csv(x: &[f64], v: &[num_complex::Complex64]) -> String {
    let max = v.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let pivot = v.iter().copied().find(|c| c.norm() == max).unwrap_or_default();
    let phase = if max > 0.0 { pivot.conj() / (max * max) } else { num_complex::Complex64::new(1.0, 0.0) };
    let mut s = String::from("x,re,im\n");
    for (xi, c) in x.iter().zip(v) {
        let r = c * phase;
        s.push_str(&format!("{},{},{}\n", fmt_e(*xi), fmt_e(r.re), fmt_e(r.im)));
    }
    s
}

pub fn run_burgers_spectra(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let s = setup(config, &mut out)?;
    let mut summary = Vec::new();
    for cell in &CELLS {
        let scheme = cell_scheme(&s, cell)?;
        let q = burgers_jacobian(&scheme, &s.base)?;
        let a = analyse(config, &q, s.ops.dx(), s.eta)?;
        out.add_file(format!("spectrum_{}.csv", cell.name), spectrum_csv(&a));
        let pairs = eigenpairs(&q)?;
        out.add_file(format!("mode_{}.csv", cell.name), mode_csv(&s.x, &pairs[0].1));
        out.checks.push(Check::new(
            format!("verdict {}", cell.name),
            a.verdict == cell.expected,
            format!("max Re λ = {:.6e}, verdict {:?}", a.lambda_max_re, a.verdict),
        ));
        summary.push(CellSummary {
            cell: cell.name,
            alpha: cell.alpha,
            gamma: scheme.gamma,
            lambda_max_re: a.lambda_max_re,
            lambda_max_im: a.lambda_max_im,
            norm_q: a.norm_q,
            eta_c: a.options.eta_c,
            band: a.options.band,
            stable_tol: a.options.stable_tol,
            verdict: a.verdict,
            expected: cell.expected,
        });
    }
    out.add_json("verdicts.json", &summary)?;
    Ok(out)
}

/// `‖δ‖_H` and the base-flow weighted norm `√(δᵀ |U| H δ)`. The latter is
/// invariant under the linearized conservative form `δ' = -D~ U δ` when `U`
/// keeps one sign.
fn perturbation_norms(delta: &[f64], base: &[f64], h: &[f64]) -> Result<(f64, f64)> {
    let w: Vec<f64> = base.iter().zip(h).map(|(u, h)| u.abs() * h).collect();
    Ok((h_norm(delta, h)?, h_norm(delta, &w)?))
}

#[derive(Serialize)]
struct PerturbSummary {
    cell: &'static str,
    gamma: f64,
    lambda_max_re: f64,
    initial_norm_h: f64,
    final_norm_h: f64,
    initial_norm_uh: f64,
    final_norm_uh: f64,
    uh_norm_drift: f64,
    fitted_growth_rate: Option<f64>,
}

pub fn run_burgers_perturb(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let s = setup(config, &mut out)?;
    let qs: Vec<(BurgersScheme, Dense)> = CELLS
        .iter()
        .map(|c| {
            let scheme = cell_scheme(&s, c)?;
            let q = burgers_jacobian(&scheme, &s.base)?;
            Ok((scheme, q))
        })
        .collect::<Result<_>>()?;
    // seed: fastest mode of the unstable split form
    let (lam0, v0) = eigenpairs(&qs[0].1)?.into_iter().next().ok_or(Error::NoConvergence)?;
    let seed = real_seed(&v0, config.amplitude);
    let base_norm = h_norm(&s.base, s.ops.h())?;
    let tl = TimeLoopConfig { dt: config.dt, t_final: config.t_final, checkpoint_stride: config.checkpoint_stride };
    let mut summary = Vec::new();
    for (cell, (scheme, q)) in CELLS.iter().zip(&qs) {
        let mut rows = Vec::new();
        let mut rhs = |_: f64, d: &[f64]| Ok(q.matvec(d));
        integrate(&mut rhs, &seed, &tl, &mut |_, t, d: &[f64]| {
            let (nh, nf) = perturbation_norms(d, &s.base, s.ops.h())?;
            rows.push(vec![t, nh, nf]);
            Ok(())
        })?;
        out.add_file(format!("norms_{}.csv", cell.name), series_csv("t,norm_h,norm_uh", &rows));
        let first = &rows[0];
        let last = &rows[rows.len() - 1];
        let drift = rows.iter().map(|r| (r[2] - first[2]).abs()).fold(0.0, f64::max) / first[2];
        let lam = crate::linearization::eigenvalues(q)?[0].re;
        let fit = if cell.gamma == GammaName::Zero && cell.alpha < 1.0 {
            let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let n: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            Some(growth_rate_fit(&t, &n, base_norm)?)
        } else {
            None
        };
        match (cell.alpha == 1.0, fit) {
            (true, _) => out.checks.push(Check::new(
                format!("{} UH-norm drift", cell.name),
                drift <= 1e-6,
                format!("relative drift {drift:.3e}"),
            )),
            (false, Some(eta)) => out.checks.push(Check::new(
                format!("{} growth rate", cell.name),
                ((eta - lam0.re) / lam0.re).abs() <= 0.1,
                format!("fitted {eta:.6e} vs max Re λ {:.6e}", lam0.re),
            )),
            (false, None) => out.checks.push(Check::new(
                format!("{} decay", cell.name),
                last[1] <= first[1],
                format!("final/initial H-norm {:.6e}", last[1] / first[1]),
            )),
        }
        summary.push(PerturbSummary {
            cell: cell.name,
            gamma: scheme.gamma,
            lambda_max_re: lam,
            initial_norm_h: first[1],
            final_norm_h: last[1],
            initial_norm_uh: first[2],
            final_norm_uh: last[2],
            uh_norm_drift: drift,
            fitted_growth_rate: fit,
        });
    }
    out.add_json("perturbation.json", &summary)?;
    Ok(out)
}

/// Observed orders `log2(e_i / e_{i+1})` of a halving sequence.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// SSPRK(5,4) errors on `u' = cos t`, `u(0) = 0`, integrated to `t = 1`.
pub fn ode_convergence(dts: &[f64]) -> Result<Vec<f64>> {
    dts.iter()
        .map(|&dt| {
            let steps = (1.0 / dt).round() as usize;
            let mut u = vec![0.0];
            for k in 0..steps {
                u = ssprk54_step(&mut |t, _: &[f64]| Ok(vec![t.cos()]), &u, k as f64 * dt, dt)?;
            }
            Ok((u[0] - (steps as f64 * dt).sin()).abs())
        })
        .collect()
}

pub fn run_convergence(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let mut table = String::from("nodes_per_element,elements,dx,gamma,error,order\n");
    let mut errors = Vec::new();
    let mut rows = Vec::new();
    for level in 0..4 {
        let mut c = config.clone();
        c.nodes = config.nodes << level;
        let ops = build_ops(&c, 1.0, 0.0)?;
        let x = ops.nodes();
        let u0: Vec<f64> = x.iter().map(|x| convergence_initial(*x)).collect();
        let gamma = resolve_gamma(config.gamma, &ops, config.alpha, &u0)?;
        let scheme = BurgersScheme::new(ops.clone(), config.alpha, gamma)?;
        let tl = TimeLoopConfig { dt: config.dt, t_final: config.t_final, checkpoint_stride: usize::MAX };
        let tr = integrate(&mut |_, u: &[f64]| Ok(scheme.rhs(u)), &u0, &tl, &mut |_, _, _| Ok(()))?;
        let err: Vec<f64> = x.iter().zip(&tr.u).map(|(x, u)| u - convergence_exact(*x, tr.t)).collect();
        let e = h_norm(&err, ops.h())?;
        errors.push(e);
        rows.push((c.nodes, ops.dx(), gamma));
        if level == 0 && config.t_final == 0.0 {
            out.checks.push(Check::new("zero-time error", e == 0.0, format!("{e:.3e}")));
        }
    }
    let orders = observed_orders(&errors);
    for (i, (n, dx, gamma)) in rows.iter().enumerate() {
        let o = if i == 0 { String::new() } else { format!("{:.6}", orders[i - 1]) };
        table.push_str(&format!("{n},{},{},{},{},{o}\n", config.elements, fmt_e(*dx), fmt_e(*gamma), fmt_e(errors[i])));
    }
    out.add_file("convergence.csv", table);

    let dts: Vec<f64> = (4..=8).map(|k| 0.5f64.powi(k)).collect();
    let ode = ode_convergence(&dts)?;
    let ode_orders = observed_orders(&ode);
    let mut t = String::from("dt,error,order\n");
    for (i, (dt, e)) in dts.iter().zip(&ode).enumerate() {
        let o = if i == 0 { String::new() } else { format!("{:.6}", ode_orders[i - 1]) };
        t.push_str(&format!("{},{},{o}\n", fmt_e(*dt), fmt_e(*e)));
    }
    out.add_file("ode_convergence.csv", t);
    let min_ode = ode_orders.iter().cloned().fold(f64::INFINITY, f64::min);
    out.checks.push(Check::new("ssprk54 order", min_ode >= 3.9, format!("min observed order {min_ode:.3}")));
    Ok(out)
}
