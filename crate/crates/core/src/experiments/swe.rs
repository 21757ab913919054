use std::f64::consts::PI;

use serde::Serialize;

use super::{analyse, build_ops, check_dense_limit, record_operator, series_csv, snapshot, Check, ExperimentConfig, RunOutput};
use crate::dense::Dense;
use crate::diagnostics::{block_h_norm, kinetic_energy_spectrum, resample_2d, slope_fit, spectra_csv, enstrophy_spectrum};
use crate::error::{Error, Result};
use crate::linearization::{eigenpairs, eta_c_from_derivative, growth_rate_fit, jacobian, real_seed, spectrum_csv, Verdict};
use crate::swe::{init_kelvin_helmholtz, init_stationary_vortex, swe1d_base_flow, vorticity, Grid2D, KhParams, Swe1D, Swe2D, SweOptions};
use crate::timeint::{integrate, TimeLoopConfig};

struct Cell {
    name: &'static str,
    opts: fn(f64) -> SweOptions,
    expected: Verdict,
}

const CELLS_1D: [Cell; 3] = [
    Cell { name: "conservative", opts: SweOptions::conservative, expected: Verdict::LocallyStable },
    Cell { name: "skew_gamma_0", opts: SweOptions::entropy_conserving, expected: Verdict::Unstable },
    Cell { name: "skew_gamma_pos", opts: |g| SweOptions::skew(g, 1.0), expected: Verdict::LocallyStable },
];

#[derive(Serialize)]
struct CellSummary {
    cell: &'static str,
    lambda_max_re: f64,
    lambda_max_im: f64,
    norm_q: f64,
    eta_c: f64,
    band: f64,
    stable_tol: f64,
    verdict: Verdict,
    expected: Option<Verdict>,
}

fn swe1d_setup(config: &ExperimentConfig, out: &mut RunOutput) -> Result<(crate::multiblock::GlobalOperator, Vec<f64>, f64)> {
    let ops = build_ops(config, 1.0, 0.0)?;
    check_dense_limit(config, 2 * ops.size())?;
    record_operator(out, "element", &ops);
    let base = swe1d_base_flow(&ops.nodes());
    // characteristic speeds u ± √(gh); η_c from their steepest compression
    let m = ops.size();
    let (h, hu) = base.split_at(m);
    let mut eta: f64 = 0.0;
    for sign in [-1.0, 1.0] {
        let a: Vec<f64> = (0..m).map(|i| hu[i] / h[i] + sign * (config.g * h[i]).sqrt()).collect();
        eta = eta.max(eta_c_from_derivative(&ops.apply_d(&a)));
    }
    Ok((ops, base, eta))
}

fn swe1d_jacobian(s: &Swe1D, base: &[f64]) -> Result<Dense> {
    jacobian(|q| s.rhs(q), base)
}

pub fn run_swe1d_spectra(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let (ops, base, eta) = swe1d_setup(config, &mut out)?;
    let mut summary = Vec::new();
    for cell in &CELLS_1D {
        let s = Swe1D { ops: ops.clone(), opts: (cell.opts)(config.g) };
        let q = swe1d_jacobian(&s, &base)?;
        let a = analyse(config, &q, ops.dx(), eta)?;
        out.add_file(format!("spectrum_{}.csv", cell.name), spectrum_csv(&a));
        out.checks.push(Check::new(
            format!("verdict {}", cell.name),
            a.verdict == cell.expected,
            format!("max Re λ = {:.6e}, verdict {:?}", a.lambda_max_re, a.verdict),
        ));
        summary.push(CellSummary {
            cell: cell.name,
            lambda_max_re: a.lambda_max_re,
            lambda_max_im: a.lambda_max_im,
            norm_q: a.norm_q,
            eta_c: a.options.eta_c,
            band: a.options.band,
            stable_tol: a.options.stable_tol,
            verdict: a.verdict,
            expected: Some(cell.expected),
        });
    }
    out.add_json("verdicts.json", &summary)?;
    Ok(out)
}

#[derive(Serialize)]
struct PerturbSummary {
    cell: &'static str,
    lambda_max_re: f64,
    initial_norm_h: f64,
    final_norm_h: f64,
    /// `max |‖δ(t)‖_H / ‖δ(0)‖_H - 1|` over the checkpoints.
    norm_drift: f64,
    fitted_growth_rate: Option<f64>,
}

pub fn run_swe1d_perturb(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let (ops, base, _) = swe1d_setup(config, &mut out)?;
    let qs: Vec<Dense> = CELLS_1D
        .iter()
        .map(|c| swe1d_jacobian(&Swe1D { ops: ops.clone(), opts: (c.opts)(config.g) }, &base))
        .collect::<Result<_>>()?;
    let (lam0, v0) = eigenpairs(&qs[1])?.into_iter().next().ok_or(Error::NoConvergence)?;
    let seed = real_seed(&v0, config.amplitude);
    let base_norm = block_h_norm(&base, ops.h());
    let tl = TimeLoopConfig { dt: config.dt, t_final: config.t_final, checkpoint_stride: config.checkpoint_stride };
    let mut summary = Vec::new();
    for (cell, q) in CELLS_1D.iter().zip(&qs) {
        let mut rows = Vec::new();
        integrate(&mut |_, d: &[f64]| Ok(q.matvec(d)), &seed, &tl, &mut |_, t, d: &[f64]| {
            rows.push(vec![t, block_h_norm(d, ops.h())]);
            Ok(())
        })?;
        out.add_file(format!("norms_{}.csv", cell.name), series_csv("t,norm_h", &rows));
        let (first, last) = (&rows[0], &rows[rows.len() - 1]);
        let drift = rows.iter().map(|r| (r[1] - first[1]).abs()).fold(0.0, f64::max) / first[1];
        let fit = if cell.name == "skew_gamma_0" {
            let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let n: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            growth_rate_fit(&t, &n, base_norm).ok()
        } else {
            None
        };
        let lam = crate::linearization::eigenvalues(q)?[0].re;
        match cell.name {
            "conservative" => {}
            "skew_gamma_0" => out.checks.push(Check::new(
                "skew_gamma_0 growth rate",
                fit.is_some_and(|e| ((e - lam0.re) / lam0.re).abs() <= 0.1),
                match fit {
                    Some(e) => format!("fitted {e:.6e} vs max Re λ {:.6e}", lam0.re),
                    None => "no pre-saturation growth window".to_string(),
                },
            )),
            _ => out.checks.push(Check::new(
                "skew_gamma_pos decay",
                last[1] <= first[1],
                format!("final/initial {:.6e}", last[1] / first[1]),
            )),
        }
        summary.push(PerturbSummary {
            cell: cell.name,
            lambda_max_re: lam,
            initial_norm_h: first[1],
            final_norm_h: last[1],
            norm_drift: drift,
            fitted_growth_rate: fit,
        });
    }
    out.add_json("perturbation.json", &summary)?;
    Ok(out)
}

fn square_grid(config: &ExperimentConfig, length: f64, x0: f64) -> Result<Grid2D> {
    let o = build_ops(config, length, x0)?;
    Ok(Grid2D { ox: o.clone(), oy: o })
}

/// Smallest node spacing of the grid, used to scale the time step.
pub fn min_spacing(grid: &Grid2D) -> f64 {
    let e = &grid.ox.mesh.elements[0];
    e.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

fn momentum_magnitude(q: &[f64]) -> Vec<f64> {
    let m = q.len() / 3;
    (0..m).map(|i| q[m + i].hypot(q[2 * m + i])).collect()
}

#[derive(Serialize)]
struct VortexCell {
    cell: &'static str,
    lambda_max_re: f64,
    lambda_max_im: f64,
    norm_q: f64,
    eta_c: f64,
    verdict: Verdict,
    final_error_norm: f64,
}

pub fn run_swe2d_vortex(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let grid = square_grid(config, 2.0 * PI, -PI)?;
    check_dense_limit(config, 3 * grid.len())?;
    record_operator(&mut out, "element", &grid.ox);
    let base = init_stationary_vortex(&grid, config.g);
    let m = grid.len();
    let (xs, ys) = (grid.ox.nodes(), grid.oy.nodes());
    let eta = {
        let u: Vec<f64> = (0..m).map(|i| base[m + i] / base[i]).collect();
        let v: Vec<f64> = (0..m).map(|i| base[2 * m + i] / base[i]).collect();
        eta_c_from_derivative(&grid.dx(&u)).max(eta_c_from_derivative(&grid.dy(&v)))
    };
    let dt = config.dt * min_spacing(&grid);
    let tl = TimeLoopConfig { dt, t_final: config.t_final, checkpoint_stride: config.checkpoint_stride };
    let weights = grid.weights();
    let physics = serde_json::json!({ "g": config.g, "domain": [-PI, PI] });
    let mut summary = Vec::new();
    for (name, opts) in [("skew_gamma_0", SweOptions::entropy_conserving(config.g)), ("skew_gamma_pos", SweOptions::skew(config.g, 1.0))] {
        let s = Swe2D { grid: grid.clone(), opts };
        let q = jacobian(|v| s.rhs(v), &base)?;
        let a = analyse(config, &q, grid.ox.dx(), eta)?;
        out.add_file(format!("spectrum_{name}.csv"), spectrum_csv(&a));
        let (lam, vec) = eigenpairs(&q)?.into_iter().next().ok_or(Error::NoConvergence)?;
        let seed = real_seed(&vec, config.amplitude);
        let mode_h: Vec<f64> = seed[..m].to_vec();
        snapshot(&mut out, &format!("mode_{name}_h"), "eigenmode height component", &xs, &ys, &mode_h, 0.0, physics.clone())?;

        // perturbed and unperturbed nonlinear runs, error = their difference
        let rhs = |_: f64, v: &[f64]| s.rhs(v);
        let mut ref_states = Vec::new();
        integrate(&mut rhs.clone(), &base, &tl, &mut |_, _, v: &[f64]| {
            ref_states.push(v.to_vec());
            Ok(())
        })?;
        let perturbed: Vec<f64> = base.iter().zip(&seed).map(|(b, d)| b + d).collect();
        let mut rows = Vec::new();
        let mut k = 0;
        let fin = integrate(&mut rhs.clone(), &perturbed, &tl, &mut |_, t, v: &[f64]| {
            let d: Vec<f64> = v.iter().zip(&ref_states[k]).map(|(a, b)| a - b).collect();
            k += 1;
            rows.push(vec![t, block_h_norm(&d, &weights)]);
            Ok(())
        })?;
        out.add_file(format!("errors_{name}.csv"), series_csv("t,norm_h", &rows));
        snapshot(
            &mut out,
            &format!("momentum_{name}"),
            "|(hu, hv)| of the perturbed run",
            &xs,
            &ys,
            &momentum_magnitude(&fin.u),
            fin.t,
            physics.clone(),
        )?;
        summary.push(VortexCell {
            cell: name,
            lambda_max_re: lam.re,
            lambda_max_im: lam.im,
            norm_q: a.norm_q,
            eta_c: a.options.eta_c,
            verdict: a.verdict,
            final_error_norm: rows[rows.len() - 1][1],
        });
    }
    let (r0, r1) = (summary[0].lambda_max_re, summary[1].lambda_max_re);
    let tol0 = 1e-8 * summary[0].norm_q;
    out.checks.push(Check::new("gamma_0 has growing mode", r0 > tol0, format!("max Re λ = {r0:.6e}")));
    out.checks.push(Check::new("gamma_pos reduces growth by 5x", r1 <= r0 / 5.0, format!("{r1:.6e} vs {r0:.6e}")));
    if config.paper_scale {
        let near = |got: f64, want: f64| ((got - want) / want).abs() <= 0.05;
        out.checks.push(Check::new("full-size gamma_0 eigenvalue", near(r0, 0.279), format!("{r0:.4e} vs 0.279")));
        out.checks.push(Check::new("full-size gamma_pos eigenvalue", near(r1, 0.0400), format!("{r1:.4e} vs 0.0400")));
    }
    out.add_json("verdicts.json", &summary)?;
    Ok(out)
}

#[derive(Serialize)]
struct KhSummary {
    steps: usize,
    dt: f64,
    t_final: f64,
    entropy_initial: f64,
    entropy_final: f64,
    max_entropy_increase: f64,
    kinetic_slope: f64,
    enstrophy_slope: f64,
    slope_window: [usize; 2],
}

pub fn run_swe2d_kh(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let p = KhParams { g: config.g, ..KhParams::default() };
    let grid = square_grid(config, p.length, 0.0)?;
    record_operator(&mut out, "element", &grid.ox);
    let mut opts = SweOptions::skew(p.g, 1.0);
    opts.coriolis = p.f;
    let s = Swe2D { grid: grid.clone(), opts };
    let q0 = init_kelvin_helmholtz(&grid, &p);
    let dt = config.dt * min_spacing(&grid);
    let tl = TimeLoopConfig { dt, t_final: config.t_final, checkpoint_stride: config.checkpoint_stride };
    let (xs, ys) = (grid.ox.nodes(), grid.oy.nodes());
    let physics = serde_json::to_value(&p)?;
    let absolute = |q: &[f64]| -> Result<Vec<f64>> { Ok(vorticity(&grid, q)?.into_iter().map(|w| w + p.f).collect()) };
    snapshot(&mut out, "vorticity_t0", "absolute vorticity", &xs, &ys, &absolute(&q0)?, 0.0, physics.clone())?;

    let mut log = Vec::new();
    let traj = integrate(&mut |_, q: &[f64]| s.rhs(q), &q0, &tl, &mut |_, t, q: &[f64]| {
        log.push(vec![t, s.total_entropy(q)?]);
        Ok(())
    })?;
    if traj.u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: traj.t });
    }
    out.add_file("entropy.csv", series_csv("t,entropy", &log));
    snapshot(&mut out, "vorticity_final", "absolute vorticity", &xs, &ys, &absolute(&traj.u)?, traj.t, physics)?;

    let m = grid.len();
    let mres = config.resample;
    let u: Vec<f64> = (0..m).map(|i| traj.u[m + i] / traj.u[i]).collect();
    let v: Vec<f64> = (0..m).map(|i| traj.u[2 * m + i] / traj.u[i]).collect();
    let ke = kinetic_energy_spectrum(&resample_2d(&grid, &u, mres)?, &resample_2d(&grid, &v, mres)?, mres)?;
    out.add_file("spectra_final.csv", spectra_csv(&ke));
    let [lo, hi] = config.slope_window;
    let ks = slope_fit(&ke, lo, hi)?;
    let es = slope_fit(&enstrophy_spectrum(&ke), lo, hi)?;

    let max_inc = log.windows(2).map(|w| w[1][1] - w[0][1]).fold(f64::NEG_INFINITY, f64::max);
    out.checks.push(Check::new("finite final state", true, format!("t = {:.6e}", traj.t)));
    out.checks.push(Check::new(
        "entropy non-increasing",
        max_inc <= 0.0,
        format!("largest checkpoint increase {max_inc:.6e}"),
    ));
    out.checks.push(Check::new("kinetic slope in [-4.5, -2.5]", (-4.5..=-2.5).contains(&ks), format!("{ks:.4}")));
    out.checks.push(Check::new("enstrophy slope in [-2.5, -0.5]", (-2.5..=-0.5).contains(&es), format!("{es:.4}")));
    out.add_json(
        "summary.json",
        &KhSummary {
            steps: traj.steps,
            dt,
            t_final: traj.t,
            entropy_initial: log[0][1],
            entropy_final: log[log.len() - 1][1],
            max_entropy_increase: max_inc,
            kinetic_slope: ks,
            enstrophy_slope: es,
            slope_window: config.slope_window,
        },
    )?;
    Ok(out)
}
