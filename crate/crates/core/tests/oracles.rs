//! Independent oracles for the operator, scheme and analysis layers.

use std::f64::consts::PI;

use dpsbp::burgers::{fv_fluxes, gamma_lf, gamma_opt, gamma_opt_from_derivative, BurgersScheme};
use dpsbp::diagnostics::{h_norm, kinetic_energy_spectrum};
use dpsbp::experiments::burgers_base_flow;
use dpsbp::linearization::{eigenvalues, jacobian};
use dpsbp::multiblock::{assemble_periodic, GlobalOperator, Mesh1D};
use dpsbp::operators::{build, build_dg_pair, build_fd_pair};
use dpsbp::swe::{
    entropy_variables_1d, init_kelvin_helmholtz, init_stationary_vortex, upwind_params_1d, Grid2D, KhParams, Swe1D, Swe2D,
    SweOptions,
};
use dpsbp::timeint::{integrate, ssprk54_step, TimeLoopConfig};
use dpsbp::{Dense, Dual, Family};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn periodic(family: Family, order: usize, n: usize, k: usize, length: f64, x0: f64) -> GlobalOperator {
    let pair = build(family, order, n, length / k as f64, 0.1).unwrap();
    assemble_periodic(Mesh1D::uniform(pair, k, x0)).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn inner(a: &[f64], b: &[f64], h: &[f64]) -> f64 {
    (0..a.len()).map(|i| h[i] * a[i] * b[i]).sum()
}

#[test]
fn interface_penalty_is_minus_sum_of_squared_jumps() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in [1, 2, 5] {
        let ops = periodic(Family::DgLgl, 3, 4, k, 1.0, 0.0);
        let bt = ops.b_tilde_all();
        for _ in 0..20 {
            let u = random_vec(&mut rng, ops.size(), -1.0, 1.0);
            let q: f64 = u.iter().zip(bt.matvec(&u)).map(|(a, b)| a * b).sum();
            let jumps: f64 = ops.jumps(&u).iter().map(|j| j * j).sum();
            assert!((q + jumps).abs() <= 1e-12, "k={k}: {q} vs {jumps}");
        }
        assert!(bt.sub(&bt.transpose()).max_abs() == 0.0);
    }
}

#[test]
fn continuous_samples_have_no_jumps() {
    let ops = periodic(Family::DgLgl, 4, 5, 6, 1.0, 0.0);
    let u: Vec<f64> = ops.nodes().iter().map(|x| (2.0 * PI * x).sin()).collect();
    assert!(ops.jumps(&u).iter().all(|j| j.abs() <= 1e-13));
}

#[test]
fn penalized_pair_is_skew_adjoint_for_two_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ops = periodic(Family::FdUpwind, 3, 12, 2, 1.0, 0.0);
    let h = ops.h();
    for _ in 0..100 {
        let f = random_vec(&mut rng, ops.size(), -1.0, 1.0);
        let g = random_vec(&mut rng, ops.size(), -1.0, 1.0);
        let s = inner(&ops.apply_dplus(&f), &g, h) + inner(&f, &ops.apply_dminus(&g), h);
        assert!(s.abs() <= 1e-11 * h_norm(&f, h).unwrap() * h_norm(&g, h).unwrap());
    }
}

#[test]
fn two_node_dg_element_by_hand() {
    let delta = 0.3;
    let p = build_dg_pair(1, 0.0, delta).unwrap();
    assert!((p.h[0] - delta / 2.0).abs() < 1e-15 && (p.h[1] - delta / 2.0).abs() < 1e-15);
    let d = &p.split().d;
    for i in 0..2 {
        assert!((d[(i, 0)] + 1.0 / delta).abs() < 1e-12 && (d[(i, 1)] - 1.0 / delta).abs() < 1e-12);
    }
    let hd = Dense::diag(&p.h).matmul(d);
    let r = hd.add(&hd.transpose()).sub(&p.b());
    assert!(r.max_abs() < 1e-14);
}

#[test]
fn split_form_with_alpha_one_is_the_flux_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ops = periodic(Family::FdUpwind, 4, 16, 3, 1.0, 0.0);
    let s = BurgersScheme::new(ops.clone(), 1.0, 0.0).unwrap();
    let u = random_vec(&mut rng, ops.size(), -2.0, 2.0);
    let f: Vec<f64> = u.iter().map(|v| 0.5 * v * v).collect();
    let want = ops.d_dense().matvec(&f);
    for (a, b) in s.rhs(&u).iter().zip(want) {
        assert!((a + b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}

#[test]
fn burgers_energy_rate_is_the_upwind_dissipation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (family, order, n) in [(Family::FdUpwind, 5, 16), (Family::FdDrp, 4, 16), (Family::DgLgl, 4, 5)] {
        let ops = periodic(family, order, n, 4, 1.0, 0.0);
        let h = ops.h().to_vec();
        let ds = ops.ds_dense();
        for trial in 0..50 {
            let gamma = if trial % 5 == 0 { 0.0 } else { rng.gen_range(0.0..2.0) };
            let s = BurgersScheme::new(ops.clone(), 2.0 / 3.0, gamma).unwrap();
            let u = random_vec(&mut rng, ops.size(), -2.0, 2.0);
            let rate = 2.0 * inner(&u, &s.rhs(&u), &h);
            let diss = 2.0 * gamma * inner(&u, &ds.matvec(&u), &h);
            assert!((rate - diss).abs() <= 1e-10, "{family:?} rate {rate} vs {diss}");
            assert!(diss <= 1e-12);
            let mass: f64 = s.rhs(&u).iter().zip(&h).map(|(r, h)| r * h).sum();
            assert!(mass.abs() <= 1e-12);
        }
    }
}

#[test]
fn gamma_opt_order_three_matches_the_analytic_derivative() {
    let dx = 1.0 / 96.0;
    let x: Vec<f64> = (0..96).map(|i| i as f64 * dx).collect();
    let du: Vec<f64> = x.iter().map(|x| PI * (PI * (x - 0.7)).cos()).collect();
    let g = gamma_opt_from_derivative(3, 2.0 / 3.0, &du, dx).unwrap();
    let want = (1.0 / 3.0) * 2.0 * dx * PI;
    assert!((g - want).abs() <= 1e-3 * want, "{g} vs {want}");
}

#[test]
fn gamma_opt_vanishes_on_constant_flow() {
    let ops = periodic(Family::FdUpwind, 3, 16, 6, 1.0, 0.0);
    assert!(gamma_opt(&ops, 2.0 / 3.0, &vec![2.5; ops.size()]).unwrap() <= 1e-14);
}

#[test]
fn order_one_gamma_is_below_lax_friedrichs() {
    let pair = build_fd_pair(1, 96, 1.0).unwrap();
    let ops = assemble_periodic(Mesh1D::uniform(pair, 1, 0.0)).unwrap();
    // smooth and positive, so the periodic closure adds no jump
    let base: Vec<f64> = ops.nodes().iter().map(|x| 2.0 + (2.0 * PI * x).sin()).collect();
    let go = gamma_opt(&ops, 2.0 / 3.0, &base).unwrap();
    let max_u = base.iter().cloned().fold(0.0, f64::max);
    assert!(go <= 2.0 / 3.0 * max_u && 2.0 / 3.0 * max_u < gamma_lf(&base));
}

#[test]
fn order_one_effective_upwind_parameter_is_nonnegative() {
    // γ̄_i = (1-α)(U_{i+1} - U_i) + γ with γ taken from the one-sided differences
    let n = 64;
    let dx = 1.0 / n as f64;
    let alpha = 2.0 / 3.0;
    let u: Vec<f64> = (0..n).map(|i| 2.0 + (2.0 * PI * i as f64 * dx).sin()).collect();
    let fwd: Vec<f64> = (0..n).map(|i| (u[(i + 1) % n] - u[i]) / dx).collect();
    let gamma = gamma_opt_from_derivative(1, alpha, &fwd, dx).unwrap();
    for i in 0..n {
        assert!((1.0 - alpha) * (u[(i + 1) % n] - u[i]) + gamma >= 0.0);
    }
    // the central-derivative value agrees to O(Δx²)
    let cen: Vec<f64> = (0..n).map(|i| (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2.0 * dx)).collect();
    let g2 = gamma_opt_from_derivative(1, alpha, &cen, dx).unwrap();
    assert!((gamma - g2).abs() <= 1e-2 * gamma);
}

#[test]
fn flux_form_has_only_centred_flux() {
    let pair = build_fd_pair(3, 40, 1.0).unwrap();
    let ops = assemble_periodic(Mesh1D::uniform(pair, 1, 0.0)).unwrap();
    let u: Vec<f64> = ops.nodes().iter().map(|x| 1.5 + (2.0 * PI * x).cos()).collect();
    let s = BurgersScheme::new(ops, 1.0, 0.0).unwrap();
    let f = fv_fluxes(&u, &s).unwrap();
    for c in [1, 2] {
        assert!(f.right[c].iter().chain(&f.left[c]).all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn fv_fluxes_need_a_single_fd_element() {
    let s = BurgersScheme::new(periodic(Family::DgLgl, 2, 3, 4, 1.0, 0.0), 2.0 / 3.0, 0.0).unwrap();
    assert!(fv_fluxes(&vec![1.0; 12], &s).is_err());
}

#[test]
fn swe_entropy_variable_example() {
    let (u, w) = entropy_variables_1d(&[2.0], &[6.0], 9.81).unwrap();
    assert!((u[0] - 3.0).abs() < 1e-15);
    assert!((w[0] - 15.12).abs() < 1e-12);
}

#[test]
fn swe_upwind_parameters_are_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let h = random_vec(&mut rng, 8, 0.01, 5.0);
        let hu = random_vec(&mut rng, 8, -5.0, 5.0);
        let p = upwind_params_1d(&h, &hu, rng.gen_range(0.1..20.0), 4).unwrap();
        assert!(p.params.iter().flatten().all(|v| *v >= 0.0));
    }
}

/// `Σ H ½(hu²/h + g h²)` evaluated along `q + ε r` with dual numbers.
fn entropy_directional_derivative(q: &[f64], r: &[f64], h: &[f64], g: f64) -> f64 {
    let m = h.len();
    let d = |i: usize| Dual::new(q[i], r[i]);
    (0..m)
        .map(|i| {
            let (hh, hu) = (d(i), d(m + i));
            ((hu * hu / hh + hh * hh * g) * (0.5 * h[i])).d
        })
        .sum()
}

#[test]
fn entropy_variables_contract_the_tendency_to_the_entropy_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ops = periodic(Family::DgLgl, 4, 5, 5, 1.0, 0.0);
    let m = ops.size();
    let s = Swe1D { ops: ops.clone(), opts: SweOptions::skew(9.81, 1.0) };
    for _ in 0..20 {
        let mut q = random_vec(&mut rng, m, 1.0, 2.0);
        q.extend(random_vec(&mut rng, m, -1.0, 1.0));
        let want = entropy_directional_derivative(&q, &s.rhs(&q).unwrap(), ops.h(), 9.81);
        let got = s.entropy_rate(&q).unwrap();
        assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0));
    }
}

#[test]
fn swe_without_upwinding_conserves_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for family in [Family::FdUpwind, Family::DgLgl] {
        let n = if family == Family::DgLgl { 5 } else { 16 };
        let ops = periodic(family, 4, n, 4, 1.0, 0.0);
        let m = ops.size();
        let s = Swe1D { ops: ops.clone(), opts: SweOptions::entropy_conserving(9.81) };
        let s2 = Swe2D { grid: Grid2D { ox: ops.clone(), oy: ops.clone() }, opts: SweOptions::entropy_conserving(9.81) };
        for _ in 0..10 {
            let mut q = random_vec(&mut rng, m, 1.0, 2.0);
            q.extend(random_vec(&mut rng, m, -1.0, 1.0));
            assert!(s.entropy_rate(&q).unwrap().abs() <= 1e-10);
            let mut q = random_vec(&mut rng, m * m, 1.0, 2.0);
            q.extend(random_vec(&mut rng, 2 * m * m, -1.0, 1.0));
            assert!(s2.entropy_rate(&q).unwrap().abs() <= 1e-10 * m as f64);
        }
    }
}

#[test]
fn flux_form_reports_no_entropy_identity() {
    let ops = periodic(Family::FdUpwind, 4, 16, 2, 1.0, 0.0);
    let s = Swe1D { ops: ops.clone(), opts: SweOptions::conservative(1.0) };
    let q = [vec![1.0; ops.size()], vec![0.1; ops.size()]].concat();
    assert!(s.entropy_rate_formula(&q).is_err());
}

#[test]
fn x_invariant_2d_state_reproduces_1d() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ox = periodic(Family::DgLgl, 3, 4, 3, 1.0, 0.0);
    let oy = periodic(Family::DgLgl, 4, 5, 4, 2.0, 0.0);
    let (nx, ny) = (ox.size(), oy.size());
    let grid = Grid2D { ox, oy: oy.clone() };
    let h1 = random_vec(&mut rng, ny, 1.0, 2.0);
    let hv1 = random_vec(&mut rng, ny, -0.5, 0.5);
    let s1 = Swe1D { ops: oy, opts: SweOptions::skew(9.81, 1.0) };
    let r1 = s1.rhs(&[h1.clone(), hv1.clone()].concat()).unwrap();
    let s2 = Swe2D { grid, opts: SweOptions::skew(9.81, 1.0) };
    let m = nx * ny;
    let mut q = vec![0.0; 3 * m];
    for j in 0..ny {
        for i in 0..nx {
            q[j * nx + i] = h1[j];
            q[2 * m + j * nx + i] = hv1[j];
        }
    }
    let r2 = s2.rhs(&q).unwrap();
    for j in 0..ny {
        for i in 0..nx {
            let idx = j * nx + i;
            assert!((r2[idx] - r1[j]).abs() <= 1e-11);
            assert!(r2[m + idx].abs() <= 1e-11);
            assert!((r2[2 * m + idx] - r1[ny + j]).abs() <= 1e-11);
        }
    }
}

#[test]
fn lake_at_rest_and_mass_conservation_2d() {
    let ops = periodic(Family::FdUpwind, 4, 16, 2, 1.0, 0.0);
    let grid = Grid2D { ox: ops.clone(), oy: ops };
    let m = grid.len();
    let mut opts = SweOptions::skew(9.81, 1.0);
    opts.coriolis = 1e-4;
    let s = Swe2D { grid: grid.clone(), opts };
    let still = Swe2D { grid: grid.clone(), opts: SweOptions::skew(1.0, 1.0) };
    let rest = [vec![1.0; m], vec![0.0; 2 * m]].concat();
    let worst = still.rhs(&rest).unwrap().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(worst <= 1e-12, "{worst}");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = [random_vec(&mut rng, m, 1.0, 2.0), random_vec(&mut rng, 2 * m, -1.0, 1.0)].concat();
    let r = s.rhs(&q).unwrap();
    let w = grid.weights();
    let mass: f64 = (0..m).map(|i| w[i] * r[i]).sum();
    assert!(mass.abs() <= 1e-11);
}

#[test]
fn stationary_vortex_values() {
    let o = periodic(Family::DgLgl, 4, 5, 2, 2.0 * PI, -PI);
    let grid = Grid2D { ox: o.clone(), oy: o };
    let q = init_stationary_vortex(&grid, 1.0);
    let (x, y) = grid.coords();
    let m = grid.len();
    let centre = (0..m).find(|&i| x[i].abs() < 1e-14 && y[i].abs() < 1e-14).unwrap();
    assert!((q[centre] - 13.0).abs() < 1e-13);
    assert!(q[m + centre].abs() < 1e-14 && q[2 * m + centre].abs() < 1e-14);
    let corner = (0..m).find(|&i| (x[i] + PI).abs() < 1e-14 && (y[i] + PI).abs() < 1e-14).unwrap();
    assert!((q[corner] - 12.0).abs() <= (-4.0 * PI * PI).exp());
}

#[test]
fn kelvin_helmholtz_initial_state() {
    let p = KhParams::default();
    let o = periodic(Family::DgLgl, 3, 4, 4, p.length, 0.0);
    let grid = Grid2D { ox: o.clone(), oy: o };
    let q = init_kelvin_helmholtz(&grid, &p);
    let m = grid.len();
    assert!(q[2 * m..].iter().all(|v| *v == 0.0));
    let (yp, _) = p.jets();
    assert!((p.u_profile(yp) - 50.0).abs() < 1e-6);
    assert!(q[..m].iter().all(|h| *h > 0.0));
}

#[test]
fn constant_base_flow_linearizes_to_scaled_derivative() {
    let ops = periodic(Family::FdUpwind, 5, 16, 3, 1.0, 0.0);
    let c = 1.7;
    for alpha in [0.0, 2.0 / 3.0, 1.0] {
        let s = BurgersScheme::new(ops.clone(), alpha, 0.0).unwrap();
        let q = jacobian(|u| Ok(s.rhs(u)), &vec![c; ops.size()]).unwrap();
        assert!(q.add(&ops.d_dense().scale(c)).max_abs() <= 1e-12);
    }
}

#[test]
fn dual_jacobian_matches_analytic_burgers_linearization() {
    let ops = periodic(Family::DgLgl, 5, 6, 4, 1.0, 0.0);
    let base = burgers_base_flow(&ops.nodes());
    let s = BurgersScheme::new(ops, 2.0 / 3.0, 0.4).unwrap();
    let q = jacobian(|u| Ok(s.rhs(u)), &base).unwrap();
    assert!(q.sub(&s.analytic_linearization(&base)).max_abs() <= 1e-9 * q.max_abs());
}

fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    // coefficients c_0..c_n of Π (z - r), monic
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c
}

#[test]
fn companion_matrix_eigenvalues() {
    let roots = [
        Complex64::new(-1.0, 0.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.5, 2.0),
        Complex64::new(-0.5, -2.0),
        Complex64::new(3.0, 0.0),
    ];
    let c = poly_from_roots(&roots);
    let n = roots.len();
    let comp = Dense::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j].re
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let ev = eigenvalues(&comp).unwrap();
    assert_eq!(ev[0], ev.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re)).unwrap());
    for r in roots {
        let d = ev.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
        assert!(d <= 1e-8, "root {r} missed by {d}");
    }
}

#[test]
fn one_step_of_exponential_decay() {
    let u = ssprk54_step(&mut |_, u: &[f64]| Ok(vec![-u[0]]), &[1.0], 0.0, 0.1).unwrap();
    assert!((u[0] - (-0.1f64).exp()).abs() <= 1e-7);
}

#[test]
fn zero_length_run_returns_the_initial_state() {
    let tl = TimeLoopConfig { dt: 0.1, t_final: 0.0, checkpoint_stride: 1 };
    let mut calls = 0;
    let tr = integrate(&mut |_, u: &[f64]| Ok(vec![-u[0]]), &[2.0], &tl, &mut |_, _, _| {
        calls += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(tr.u, vec![2.0]);
    assert_eq!(tr.steps, 0);
    assert!(calls <= 1);
}

#[test]
fn smooth_burgers_run_conserves_entropy() {
    let ops = periodic(Family::FdUpwind, 4, 16, 6, 1.0, 0.0);
    let s = BurgersScheme::new(ops.clone(), 2.0 / 3.0, 0.0).unwrap();
    let u0 = burgers_base_flow(&ops.nodes());
    let tl = TimeLoopConfig { dt: 1e-4, t_final: 0.1, checkpoint_stride: usize::MAX };
    let tr = integrate(&mut |_, u: &[f64]| Ok(s.rhs(u)), &u0, &tl, &mut |_, _, _| Ok(())).unwrap();
    let e = |u: &[f64]| h_norm(u, ops.h()).unwrap().powi(2);
    assert!((e(&tr.u) - e(&u0)).abs() <= 1e-8 * e(&u0));
}

#[test]
fn sine_has_half_unit_norm() {
    let ops = periodic(Family::DgLgl, 6, 7, 8, 1.0, 0.0);
    let u: Vec<f64> = ops.nodes().iter().map(|x| (2.0 * PI * x).sin()).collect();
    assert!((h_norm(&u, ops.h()).unwrap().powi(2) - 0.5).abs() < 1e-10);
}

#[test]
fn parseval_on_white_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let m = 32;
    let u = random_vec(&mut rng, m * m, -1.0, 1.0);
    let v = random_vec(&mut rng, m * m, -1.0, 1.0);
    let ke = kinetic_energy_spectrum(&u, &v, m).unwrap();
    let total: f64 = ke.e.iter().sum();
    let mean = 0.5 * u.iter().chain(&v).map(|x| x * x).sum::<f64>() / (m * m) as f64;
    assert!((total - mean).abs() <= 1e-10 * mean);
    assert!(ke.e.iter().all(|e| *e >= 0.0));
}

#[test]
fn cosine_mode_fills_shell_three() {
    let m = 16;
    let u: Vec<f64> = (0..m * m).map(|i| (2.0 * PI * 3.0 * (i % m) as f64 / m as f64).cos()).collect();
    let ke = kinetic_energy_spectrum(&u, &vec![0.0; m * m], m).unwrap();
    let total: f64 = ke.e.iter().sum();
    assert!((ke.e[3] - total).abs() <= 1e-14 && (total - 0.25).abs() <= 1e-14);
    let c = kinetic_energy_spectrum(&vec![2.0; m * m], &vec![1.0; m * m], m).unwrap();
    assert!((c.e[0] - 2.5).abs() <= 1e-14 && c.e[1..].iter().all(|e| e.abs() <= 1e-28));
}
