//! Nodal DG element on Legendre–Gauss–Lobatto points.
//!
//! `D` is the exact differentiation matrix for degree-`p` polynomials and `H`
//! holds the LGL weights. The dissipation is rank one,
//! `Ds = -(c (p+1)^2 / L) v v^T H / (v^T H v)` with `v` the nodal values of
//! the Legendre polynomial `P_p`. `P_p` is H-orthogonal to every polynomial of
//! lower degree, so `Ds` annihilates them and `D±` stay exact to degree `p-1`.
//! The factor `(p+1)^2/L` tracks the spectral radius of `D`, which makes `c`
//! a dimensionless strength.

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::operators::{Family, OperatorPair};

/// `P_k(x)` for `k = 0..=p`.
pub fn legendre(p: usize, x: f64) -> Vec<f64> {
    let mut out = vec![1.0; p + 1];
    if p >= 1 {
        out[1] = x;
    }
    for k in 2..=p {
        out[k] = ((2 * k - 1) as f64 * x * out[k - 1] - (k - 1) as f64 * out[k - 2]) / k as f64;
    }
    out
}

/// LGL nodes (ascending, on [-1, 1]) and weights for degree `p`.
pub fn lgl_nodes_weights(p: usize) -> (Vec<f64>, Vec<f64>) {
    let n = p + 1;
    let mut x: Vec<f64> = (0..n).map(|j| -(std::f64::consts::PI * j as f64 / p as f64).cos()).collect();
    for xi in x.iter_mut().take(n - 1).skip(1) {
        for _ in 0..100 {
            let leg = legendre(p, *xi);
            let step = (*xi * leg[p] - leg[p - 1]) / (n as f64 * leg[p]);
            *xi -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
    }
    let w = x.iter().map(|&xi| 2.0 / ((p * n) as f64 * legendre(p, xi)[p].powi(2))).collect();
    (x, w)
}

pub fn build_dg_pair(degree: usize, strength: f64, length: f64) -> Result<OperatorPair> {
    if !(1..=16).contains(&degree) {
        return Err(Error::InvalidDegree(degree));
    }
    if !(strength >= 0.0) || length <= 0.0 {
        return Err(Error::InvalidArgument(format!("strength {strength}, length {length}")));
    }
    let p = degree;
    let n = p + 1;
    let (xi, w) = lgl_nodes_weights(p);

    let bary: Vec<f64> = (0..n)
        .map(|j| 1.0 / (0..n).filter(|&k| k != j).map(|k| xi[j] - xi[k]).product::<f64>())
        .collect();
    let mut d = Dense::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = bary[j] / bary[i] / (xi[i] - xi[j]) * 2.0 / length;
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }

    let h: Vec<f64> = w.iter().map(|wi| wi * length / 2.0).collect();
    let v: Vec<f64> = xi.iter().map(|&x| legendre(p, x)[p]).collect();
    let vhv: f64 = (0..n).map(|i| v[i] * h[i] * v[i]).sum();
    let amp = strength * (n * n) as f64 / length;
    // Ds = -amp * v (Hv)^T / (v^T H v)
    let ds = Dense::from_fn(n, n, |i, j| -amp * v[i] * h[j] * v[j] / vhv);

    let exact = if strength > 0.0 { p - 1 } else { p };
    Ok(OperatorPair {
        family: Family::DgLgl,
        interior_order: p,
        nodes: xi.iter().map(|x| (x + 1.0) * length / 2.0).collect(),
        h,
        dplus: d.add(&ds),
        dminus: d.sub(&ds),
        boundary_degree: exact,
        interior_degree: exact,
        closure_rows: 0,
    })
}
