//! Finite-difference DP-SBP pairs on equidistant nodes.
//!
//! Construction: a diagonal-norm central SBP operator `D = H^{-1}(S + B/2)`,
//! `S` skew, plus a dissipation `Ds = -H^{-1} M` with `M` symmetric positive
//! semi-definite, and `D± = D ± Ds`. A.3 then holds by construction and A.4
//! reduces to `M >= 0`.
//!
//! The closure of `S` and `H` is solved from the order conditions as the
//! minimum-norm deviation from the interior Toeplitz values. The dissipation is
//! `M = c (Δ^m)^T W Δ^m` with `Δ` the undivided forward difference; `W = I`
//! reproduces the classical interior stencils and `W > 1` near the boundaries
//! strengthens the closure dissipation without touching the interior.

use crate::dense::{lstsq_min_norm, solve, Dense};
use crate::error::{Error, Result};
use crate::operators::{Family, OperatorPair};

/// Antisymmetric central stencil `a_1..a_s` of order `2s`:
/// `(Du)_i = (1/dx) sum_k a_k (u_{i+k} - u_{i-k})`.
pub fn central_stencil(s: usize) -> Vec<f64> {
    let a = Dense::from_fn(s, s, |l, k| 2.0 * ((k + 1) as f64).powi(2 * l as i32 + 1));
    let mut b = vec![0.0; s];
    b[0] = 1.0;
    solve(&a, &b)
}

/// One-point-wider stencil of order `2s` whose free coefficient minimises the
/// dispersion error `∫ (θ - 2 Σ a_k sin kθ)^2 dθ` over `0 <= θ <= π/2`.
pub fn drp_stencil(s: usize) -> Vec<f64> {
    let w = s + 1;
    // order conditions for k = 1..w leave a one-dimensional affine family
    let a = Dense::from_fn(s, w, |l, k| 2.0 * ((k + 1) as f64).powi(2 * l as i32 + 1));
    let mut b = vec![0.0; s];
    b[0] = 1.0;
    // particular solution with the extra coefficient zero, and the null
    // direction with it pinned to 1
    let sub = Dense::from_fn(s, s, |l, k| a[(l, k)]);
    let mut part = solve(&sub, &b);
    part.push(0.0);
    let rhs: Vec<f64> = (0..s).map(|l| -a[(l, w - 1)]).collect();
    let mut null = solve(&sub, &rhs);
    null.push(1.0);
    // least squares in the single parameter t over a Simpson grid
    let m = 2048;
    let dtheta = std::f64::consts::FRAC_PI_2 / m as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..=m {
        let th = j as f64 * dtheta;
        let wgt = if j == 0 || j == m { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
        let sym = |c: &[f64]| -> f64 {
            c.iter().enumerate().map(|(k, ck)| 2.0 * ck * ((k + 1) as f64 * th).sin()).sum()
        };
        let e0 = th - sym(&part);
        let e1 = sym(&null);
        num += wgt * e0 * e1;
        den += wgt * e1 * e1;
    }
    let t = num / den;
    part.iter().zip(&null).map(|(p, q)| p + t * q).collect()
}

/// Interior dissipation constant `c_m = m!(m-1)!/(2m)!`, giving the stencils
/// `1/2, 1/12, 1/60, 1/280, 1/1260` for `m = 1..5`.
pub fn dissipation_constant(m: usize) -> f64 {
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    fact(m) * fact(m - 1) / fact(2 * m)
}

/// Boundary amplification of the dissipation weights: rows of `Δ^m` within
/// `width` of either end get weight `1 + beta (width - d)/width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryWeight {
    pub beta: f64,
    pub width: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdOptions {
    pub boundary_weight: BoundaryWeight,
}

impl FdOptions {
    /// Weights tuned on the reference Burgers base flow so that
    /// gamma_opt is sufficient while half of it is not.
    pub fn default_for(order: usize) -> FdOptions {
        let (beta, width) = match order {
            1 => (0.0, 1),
            2 => (2.0, 4),
            3 => (1.0, 4),
            4 | 5 => (10.0, 6),
            6 => (500.0, 8),
            7 => (200.0, 6),
            _ => (3.0e4, 12),
        };
        FdOptions { boundary_weight: BoundaryWeight { beta, width } }
    }

    pub fn unweighted() -> FdOptions {
        FdOptions { boundary_weight: BoundaryWeight { beta: 0.0, width: 1 } }
    }
}

struct Layout {
    /// half width of the central stencil
    s: usize,
    /// closure block size
    r: usize,
    /// dissipation difference power
    m: usize,
}

fn layout(order: usize) -> Result<Layout> {
    if !(1..=9).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let (s, m) = if order % 2 == 1 { (order.div_ceil(2), order.div_ceil(2)) } else { (order / 2, order / 2 + 1) };
    let r = if s == 5 { 12 } else { 2 * s };
    Ok(Layout { s, r, m })
}

pub fn build_fd_pair(order: usize, n: usize, length: f64) -> Result<OperatorPair> {
    build_fd_pair_with(order, n, length, FdOptions::default_for(order))
}

pub fn build_fd_pair_with(order: usize, n: usize, length: f64, opts: FdOptions) -> Result<OperatorPair> {
    let lay = layout(order)?;
    let stencil = central_stencil(lay.s);
    assemble(Family::FdUpwind, order, n, length, &stencil, lay.r, lay.s, lay.m, opts)
}

/// Dispersion-relation-preserving variant: same dissipation, central part
/// widened by one point.
pub fn build_drp_pair(order: usize, n: usize, length: f64) -> Result<OperatorPair> {
    let lay = layout(order)?;
    let stencil = drp_stencil(lay.s);
    let r = (2 * (lay.s + 1)).max(lay.r);
    assemble(Family::FdDrp, order, n, length, &stencil, r, lay.s, lay.m, FdOptions::default_for(order))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    family: Family,
    order: usize,
    n: usize,
    length: f64,
    stencil: &[f64],
    r: usize,
    degree: usize,
    m: usize,
    opts: FdOptions,
) -> Result<OperatorPair> {
    let needed = (2 * r).max(2 * m + 2);
    if n < needed {
        return Err(Error::TooFewNodes { n, needed });
    }
    if length <= 0.0 {
        return Err(Error::InvalidArgument(format!("element length {length}")));
    }
    let (h_unit, s_mat) = central_closure(n, stencil, degree, r)?;
    let dx = length / (n - 1) as f64;

    let mut q = s_mat;
    q[(0, 0)] -= 0.5;
    q[(n - 1, n - 1)] += 0.5;
    let d = Dense::from_fn(n, n, |i, j| q[(i, j)] / (h_unit[i] * dx));

    let mdiss = dissipation_matrix(n, m, opts.boundary_weight);
    let ds = Dense::from_fn(n, n, |i, j| -mdiss[(i, j)] / (h_unit[i] * dx));

    let nodes: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
    let h: Vec<f64> = h_unit.iter().map(|v| v * dx).collect();
    // the dissipation annihilates degree < m near the boundary, and weighted
    // rows of Δ^m reach `width + m` rows into the element
    let boundary_degree = degree.min(m - 1);
    let bw = opts.boundary_weight;
    let closure_rows = if bw.beta > 0.0 { r.max(bw.width + m) } else { r };
    Ok(OperatorPair {
        family,
        interior_order: order,
        nodes,
        h,
        dplus: d.add(&ds),
        dminus: d.sub(&ds),
        boundary_degree,
        interior_degree: order,
        closure_rows,
    })
}

/// `c (Δ^m)^T W Δ^m` on `n` nodes.
fn dissipation_matrix(n: usize, m: usize, bw: BoundaryWeight) -> Dense {
    // Δ^m as (n-m) x n with binomial rows
    let binom = |k: usize, j: usize| -> f64 {
        (0..j).fold(1.0, |acc, t| acc * (k - t) as f64 / (t + 1) as f64)
    };
    let rows = n - m;
    let mut delta = Dense::zeros(rows, n);
    for i in 0..rows {
        for j in 0..=m {
            let sign = if (m - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            delta[(i, i + j)] = sign * binom(m, j);
        }
    }
    let w: Vec<f64> = (0..rows)
        .map(|j| {
            let dist = j.min(rows - 1 - j);
            if dist < bw.width {
                1.0 + bw.beta * (bw.width - dist) as f64 / bw.width as f64
            } else {
                1.0
            }
        })
        .collect();
    let c = dissipation_constant(m);
    delta.transpose().scale_cols(&w).matmul(&delta).scale(c)
}

/// Solve for the skew part `S` and unit-spacing norm `h` with `r` closure rows
/// at each end, so that `(S + B/2) x^k = h k x^{k-1}` holds for `k <= degree`.
fn central_closure(n: usize, stencil: &[f64], degree: usize, r: usize) -> Result<(Vec<f64>, Dense)> {
    let w = stencil.len();
    let toeplitz = |i: usize, j: usize| -> f64 {
        let k = j as i64 - i as i64;
        if k == 0 || k.unsigned_abs() as usize > w {
            0.0
        } else if k > 0 {
            stencil[k as usize - 1]
        } else {
            -stencil[(-k) as usize - 1]
        }
    };
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let nu = pairs.len() + r;
    // scaled monomials keep the system well conditioned
    let sigma = r as f64;
    let phi = |k: usize, x: f64| (x / sigma).powi(k as i32);
    let dphi = |k: usize, x: f64| if k == 0 { 0.0 } else { k as f64 / sigma * (x / sigma).powi(k as i32 - 1) };

    let neq = r * (degree + 1);
    let mut a = Dense::zeros(neq, nu);
    let mut b = vec![0.0; neq];
    for i in 0..r {
        for k in 0..=degree {
            let row = i * (degree + 1) + k;
            for (idx, &(p, q)) in pairs.iter().enumerate() {
                if p == i {
                    a[(row, idx)] += phi(k, q as f64);
                }
                if q == i {
                    a[(row, idx)] -= phi(k, p as f64);
                }
            }
            let mut c = 0.0;
            for j in r..n {
                c += toeplitz(i, j) * phi(k, j as f64);
            }
            if i == 0 {
                c -= 0.5 * phi(k, 0.0);
            }
            a[(row, pairs.len() + i)] -= dphi(k, i as f64);
            b[row] = -c;
        }
    }
    let x0: Vec<f64> = pairs.iter().map(|&(p, q)| toeplitz(p, q)).chain(std::iter::repeat(1.0).take(r)).collect();
    let ax0 = a.matvec(&x0);
    let rhs: Vec<f64> = b.iter().zip(&ax0).map(|(bi, ai)| bi - ai).collect();
    let dz = lstsq_min_norm(&a, &rhs);
    let z: Vec<f64> = x0.iter().zip(&dz).map(|(x, d)| x + d).collect();
    let resid = a.matvec(&z).iter().zip(&b).fold(0.0f64, |m, (l, r)| m.max((l - r).abs()));
    if resid > 1e-10 {
        return Err(Error::InvalidArgument(format!("closure order conditions unsolvable (residual {resid:e})")));
    }

    let mut s = Dense::from_fn(n, n, toeplitz);
    let mut h = vec![1.0; n];
    for (idx, &(p, q)) in pairs.iter().enumerate() {
        s[(p, q)] = z[idx];
        s[(q, p)] = -z[idx];
        // mirrored block at the right end
        s[(n - 1 - p, n - 1 - q)] = -z[idx];
        s[(n - 1 - q, n - 1 - p)] = z[idx];
    }
    for i in 0..r {
        h[i] = z[pairs.len() + i];
        h[n - 1 - i] = h[i];
    }
    if h.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument("closure produced a non-positive norm".into()));
    }
    Ok((h, s))
}
