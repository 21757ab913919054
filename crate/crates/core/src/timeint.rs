//! Five-stage, fourth-order SSP Runge–Kutta (Spiteri–Ruuth), Shu–Osher form.

use crate::error::{Error, Result};

/// `ALPHA[i][k]` and `BETA[i][k]` give stage `i+1` as
/// `Σ_k ALPHA[i][k] u(k) + dt Σ_k BETA[i][k] L(u(k))`, with `u(0) = u^n`.
pub const ALPHA: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.444370493651235, 0.555629506348765, 0.0, 0.0, 0.0],
    [0.620101851488403, 0.0, 0.379898148511597, 0.0, 0.0],
    [0.178079954393132, 0.0, 0.0, 0.821920045606868, 0.0],
    [0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269],
];

pub const BETA: [[f64; 5]; 5] = [
    [0.391752226571890, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.368410593050371, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.251891774271694, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.544974750228521, 0.0],
    [0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906],
];

/// Stage abscissae `c_k` of `u(k)`, `k = 0..5`.
pub fn stage_times() -> [f64; 6] {
    let mut c = [0.0; 6];
    for i in 0..5 {
        c[i + 1] = (0..5).map(|k| ALPHA[i][k] * c[k] + BETA[i][k]).sum();
    }
    c
}

/// Equivalent Butcher tableau `(A, b, c)` of the five stages.
pub fn butcher_tableau() -> ([[f64; 5]; 5], [f64; 5], [f64; 5]) {
    // Express every u(i) as u^n + dt Σ_j W[i][j] L(u(j)).
    let mut w = [[0.0; 5]; 6];
    for i in 0..5 {
        for k in 0..5 {
            for j in 0..5 {
                w[i + 1][j] += ALPHA[i][k] * w[k][j];
            }
            w[i + 1][k] += BETA[i][k];
        }
    }
    let mut a = [[0.0; 5]; 5];
    a.copy_from_slice(&w[..5]);
    let c = stage_times();
    (a, w[5], [c[0], c[1], c[2], c[3], c[4]])
}

fn check_finite(u: &[f64], t: f64) -> Result<()> {
    if u.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteState { t })
    }
}

/// One SSPRK(5,4) step of `u' = rhs(t, u)`.
///
/// Evaluated in the equivalent Butcher form `u + dt Σ a_ij L_j`, so a zero
/// tendency returns `u` bit for bit.
pub fn ssprk54_step<F>(rhs: &mut F, u: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let (a, b, c) = butcher_tableau();
    let mut tend: Vec<Vec<f64>> = Vec::with_capacity(5);
    for i in 0..5 {
        let mut stage = u.to_vec();
        for (j, l) in tend.iter().enumerate() {
            let w = a[i][j] * dt;
            if w != 0.0 {
                stage.iter_mut().zip(l).for_each(|(s, l)| *s += w * l);
            }
        }
        check_finite(&stage, t + c[i] * dt)?;
        let l = rhs(t + c[i] * dt, &stage)?;
        check_finite(&l, t + c[i] * dt)?;
        tend.push(l);
    }
    let mut out = u.to_vec();
    for (j, l) in tend.iter().enumerate() {
        let w = b[j] * dt;
        out.iter_mut().zip(l).for_each(|(s, l)| *s += w * l);
    }
    check_finite(&out, t + dt)?;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct TimeLoopConfig {
    pub dt: f64,
    pub t_final: f64,
    pub checkpoint_stride: usize,
}

impl TimeLoopConfig {
    /// Number of fixed steps; the last step lands on `t_final` up to rounding.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub u: Vec<f64>,
    pub t: f64,
    pub steps: usize,
}

/// Integrate to `t_final`, calling `observe(step, t, u)` at step 0 and every
/// `checkpoint_stride` steps, so it fires `⌊steps/stride⌋ + 1` times.
pub fn integrate<F, O>(rhs: &mut F, u0: &[f64], config: &TimeLoopConfig, observe: &mut O) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    O: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    if !(config.dt > 0.0) || !(config.t_final >= 0.0) || config.checkpoint_stride == 0 {
        return Err(Error::InvalidArgument(format!("time loop {config:?}")));
    }
    let steps = config.steps();
    let mut u = u0.to_vec();
    observe(0, 0.0, &u)?;
    for s in 0..steps {
        let t = s as f64 * config.dt;
        u = ssprk54_step(rhs, &u, t, config.dt)?;
        if (s + 1) % config.checkpoint_stride == 0 {
            observe(s + 1, (s + 1) as f64 * config.dt, &u)?;
        }
    }
    Ok(Trajectory { u, t: steps as f64 * config.dt, steps })
}
