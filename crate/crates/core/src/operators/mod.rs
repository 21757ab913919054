//! Single-element dual-pairing SBP operators.
//!
//! A pair `(D+, D-)` with diagonal norm `H` satisfies
//!
//! - A.1 `H > 0` and `sum(H)` equals the element length,
//! - A.2 `D±` differentiate monomials exactly up to the design degree,
//! - A.3 `H D+ + (H D-)^T = B` with `B = diag(-1, 0, .., 0, 1)`,
//! - A.4 `<f, (D+ - D-) f>_H <= 0`.
//!
//! Every constructor here returns a pair that passes [`audit_axioms`].

mod dg;
mod fd;
mod io;

pub use dg::{build_dg_pair, lgl_nodes_weights, legendre};
pub use fd::{
    build_drp_pair, build_fd_pair, build_fd_pair_with, central_stencil, dissipation_constant,
    drp_stencil, BoundaryWeight, FdOptions,
};
pub use io::{read_operator, write_matrix, write_operator};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::Dense;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    FdUpwind,
    FdDrp,
    DgLgl,
    Central,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::FdUpwind => "FD_UPWIND",
            Family::FdDrp => "FD_DRP",
            Family::DgLgl => "DG_LGL",
            Family::Central => "CENTRAL",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_uppercase().as_str() {
            "FD_UPWIND" | "FD" => Some(Family::FdUpwind),
            "FD_DRP" | "DRP" => Some(Family::FdDrp),
            "DG_LGL" | "DG" => Some(Family::DgLgl),
            "CENTRAL" => Some(Family::Central),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPair {
    pub family: Family,
    /// FD: interior order; DG: polynomial degree.
    pub interior_order: usize,
    pub nodes: Vec<f64>,
    /// Diagonal of the norm matrix.
    pub h: Vec<f64>,
    pub dplus: Dense,
    pub dminus: Dense,
    /// Degree up to which every row of `D±` is exact.
    pub boundary_degree: usize,
    /// Degree up to which the interior rows are exact.
    pub interior_degree: usize,
    /// Number of closure rows at each end (0 for DG).
    pub closure_rows: usize,
}

/// Central and dissipative parts of a pair.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSplit {
    pub d: Dense,
    pub ds: Dense,
}

impl OperatorPair {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.n() - 1] - self.nodes[0]
    }

    /// Largest node spacing.
    pub fn dx(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn b(&self) -> Dense {
        let n = self.n();
        let mut b = Dense::zeros(n, n);
        b[(0, 0)] = -1.0;
        b[(n - 1, n - 1)] = 1.0;
        b
    }

    pub fn split(&self) -> OperatorSplit {
        split(self)
    }

    /// The same element with the dissipation removed (`D+ = D- = D`).
    pub fn central(&self) -> OperatorPair {
        let d = self.split().d;
        OperatorPair {
            family: Family::Central,
            dplus: d.clone(),
            dminus: d,
            ..self.clone()
        }
    }

    /// Reconstruct a pair from central and dissipative parts.
    pub fn from_split(template: &OperatorPair, s: &OperatorSplit) -> OperatorPair {
        OperatorPair {
            dplus: s.d.add(&s.ds),
            dminus: s.d.sub(&s.ds),
            ..template.clone()
        }
    }
}

pub fn split(pair: &OperatorPair) -> OperatorSplit {
    let n = pair.n();
    let d = Dense::from_fn(n, n, |i, j| 0.5 * (pair.dplus[(i, j)] + pair.dminus[(i, j)]));
    let ds = Dense::from_fn(n, n, |i, j| 0.5 * (pair.dplus[(i, j)] - pair.dminus[(i, j)]));
    OperatorSplit { d, ds }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AxiomReport {
    pub a1_min_h: f64,
    pub a1_sum_error: f64,
    pub a1_pass: bool,
    /// Worst monomial residual (scaled by the element length) over the rows and
    /// degrees the family is designed to differentiate exactly.
    pub a2_residual: f64,
    pub a2_pass: bool,
    pub a3_residual: f64,
    pub a3_pass: bool,
    /// Largest value of `<f,(D+ - D-)f>_H / ||f||_H^2` over the random trials.
    pub a4_max_quadratic: f64,
    pub a4_pass: bool,
    pub trials: usize,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.a1_pass && self.a2_pass && self.a3_pass && self.a4_pass
    }
}

/// Monomial residual bound for A.2. High-degree monomials on closure rows lose
/// a few digits to cancellation, so this is looser than the A.3 bound.
pub const A2_TOL: f64 = 1e-9;

/// Check A.1–A.4. `tol` bounds the A.3 residual; A.4 uses `1e-12` relative.
pub fn audit_axioms(pair: &OperatorPair, trials: usize, tol: f64, seed: u64) -> AxiomReport {
    let n = pair.n();
    let len = pair.length();
    let x0 = pair.nodes[0];

    let a1_min_h = pair.h.iter().cloned().fold(f64::INFINITY, f64::min);
    let a1_sum_error = (pair.h.iter().sum::<f64>() - len).abs() / len;
    let a1_pass = a1_min_h > 0.0 && a1_sum_error <= 1e-12;

    // A.2 on the scaled coordinate xi = (x - x0)/len so residuals are O(1)
    let xi: Vec<f64> = pair.nodes.iter().map(|x| (x - x0) / len).collect();
    let mut a2_residual: f64 = 0.0;
    for (op, _) in [(&pair.dplus, 0), (&pair.dminus, 1)] {
        for k in 0..=pair.interior_degree {
            let f: Vec<f64> = xi.iter().map(|v| v.powi(k as i32)).collect();
            let df = op.matvec(&f);
            for i in 0..n {
                let in_closure = i < pair.closure_rows || i >= n - pair.closure_rows;
                if in_closure && k > pair.boundary_degree {
                    continue;
                }
                let exact = if k == 0 { 0.0 } else { k as f64 * xi[i].powi(k as i32 - 1) };
                a2_residual = a2_residual.max((df[i] * len - exact).abs());
            }
        }
    }
    let a2_pass = a2_residual <= A2_TOL;

    let hm = Dense::diag(&pair.h);
    let lhs = hm.matmul(&pair.dplus).add(&hm.matmul(&pair.dminus).transpose());
    let a3_residual = lhs.sub(&pair.b()).max_abs();
    let a3_pass = a3_residual <= tol;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diff = pair.dplus.sub(&pair.dminus);
    let mut a4_max_quadratic = f64::NEG_INFINITY;
    for _ in 0..trials {
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let df = diff.matvec(&f);
        let q: f64 = (0..n).map(|i| f[i] * pair.h[i] * df[i]).sum();
        let norm: f64 = (0..n).map(|i| f[i] * f[i] * pair.h[i]).sum();
        a4_max_quadratic = a4_max_quadratic.max(q / norm);
    }
    if trials == 0 {
        a4_max_quadratic = 0.0;
    }
    let a4_pass = a4_max_quadratic <= 1e-12;

    AxiomReport {
        a1_min_h,
        a1_sum_error,
        a1_pass,
        a2_residual,
        a2_pass,
        a3_residual,
        a3_pass,
        a4_max_quadratic,
        a4_pass,
        trials,
    }
}

/// Build any family from a uniform description.
pub fn build(family: Family, order: usize, n: usize, length: f64, dg_strength: f64) -> crate::Result<OperatorPair> {
    match family {
        Family::FdUpwind => build_fd_pair(order, n, length),
        Family::FdDrp => build_drp_pair(order, n, length),
        Family::DgLgl => build_dg_pair(order, dg_strength, length),
        Family::Central => Ok(build_fd_pair(order, n, length)?.central()),
    }
}
