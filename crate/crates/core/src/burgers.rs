//! Inviscid Burgers in split form with volume upwinding,
//!
//! `du/dt = -[α D~(u²/2) + (1-α) u ∘ D~u] + γ 𝒟ˢ u`.
//!
//! With `α = 2/3` the central part conserves `‖u‖²_H` exactly; the upwind
//! term removes `γ uᵀ H 𝒟ˢ u ≥ 0` of it.

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::multiblock::GlobalOperator;
use crate::operators::Family;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct BurgersScheme {
    pub alpha: f64,
    pub gamma: f64,
    pub ops: GlobalOperator,
}

impl BurgersScheme {
    pub fn new(ops: GlobalOperator, alpha: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !(gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("alpha {alpha}, gamma {gamma}")));
        }
        Ok(BurgersScheme { alpha, gamma, ops })
    }

    pub fn rhs<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let a = self.alpha;
        let f: Vec<T> = u.iter().map(|&v| v * v * 0.5).collect();
        let df = self.ops.apply_d(&f);
        let du = self.ops.apply_d(u);
        let mut out: Vec<T> = (0..u.len()).map(|i| -(df[i] * a + u[i] * du[i] * (1.0 - a))).collect();
        if self.gamma != 0.0 {
            for (o, d) in out.iter_mut().zip(self.ops.apply_ds(u)) {
                *o += d * self.gamma;
            }
        }
        out
    }

    /// `Q = -D~A - (1-α)(D_U + A D~ - D~A) + γ𝒟ˢ` around the base flow `U`.
    pub fn analytic_linearization(&self, base: &[f64]) -> Dense {
        let d = self.ops.d_dense();
        let du = d.matvec(base);
        let da = d.scale_cols(base);
        let ad = d.scale_rows(base);
        let bracket = Dense::diag(&du).add(&ad).sub(&da);
        da.scale(-1.0).sub(&bracket.scale(1.0 - self.alpha)).add(&self.ops.ds_dense().scale(self.gamma))
    }
}

/// Sufficiency constant `κ = (p+1)/2`, i.e. 1..5 for odd and 3/2..11/2 for even orders.
pub fn kappa(order: usize) -> Result<f64> {
    if !(1..=10).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok((order as f64 + 1.0) / 2.0)
}

/// `γ_opt = (1-α) κ max|Δx DU|` from explicit derivative samples.
pub fn gamma_opt_from_derivative(order: usize, alpha: f64, du: &[f64], dx: f64) -> Result<f64> {
    let k = kappa(order)?;
    Ok((1.0 - alpha) * k * du.iter().fold(0.0f64, |m, v| m.max((dx * v).abs())))
}

/// `γ_opt` with `DU` taken from the scheme's own penalized central operator,
/// so base-flow jumps across interfaces (or the periodic wrap) count.
pub fn gamma_opt(ops: &GlobalOperator, alpha: f64, base: &[f64]) -> Result<f64> {
    let du = ops.apply_d(base);
    gamma_opt_from_derivative(ops.mesh.elements[0].interior_order, alpha, &du, ops.dx())
}

/// Global Lax–Friedrichs parameter `max|U|`.
pub fn gamma_lf(base: &[f64]) -> f64 {
    base.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Face fluxes of the finite-volume form on one equidistant FD element.
///
/// For node `i`, `right[i]` is its `i+½` flux and `left[i]` its `i-½` flux,
/// each split into centred, residual and upwind parts.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxDecomposition {
    pub dx: f64,
    pub right: [Vec<f64>; 3],
    pub left: [Vec<f64>; 3],
}

impl FluxDecomposition {
    pub fn total_right(&self, i: usize) -> f64 {
        self.right.iter().map(|c| c[i]).sum()
    }

    pub fn total_left(&self, i: usize) -> f64 {
        self.left.iter().map(|c| c[i]).sum()
    }

    /// `(f_{i+½} - f_{i-½}) / Δx`, equal to `-rhs_i` on interior rows.
    pub fn divergence(&self, i: usize) -> f64 {
        (self.total_right(i) - self.total_left(i)) / self.dx
    }
}

pub fn fv_fluxes(u: &[f64], scheme: &BurgersScheme) -> Result<FluxDecomposition> {
    let ops = &scheme.ops;
    let el = &ops.mesh.elements[0];
    if ops.k() != 1 || !matches!(el.family, Family::FdUpwind | Family::FdDrp | Family::Central) {
        return Err(Error::NotFDGrid);
    }
    let n = el.n();
    if u.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: u.len() });
    }
    let dx = el.length() / (n - 1) as f64;
    if el.nodes.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-12 * dx) {
        return Err(Error::NotFDGrid);
    }
    let s = ops.element_split(0);
    let (a, g) = (scheme.alpha, scheme.gamma);
    let f: Vec<f64> = u.iter().map(|v| 0.5 * v * v).collect();
    let mut right = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut left = right.clone();
    for i in 0..n {
        let (mut cr, mut cl, mut rr, mut rl, mut ur, mut ul) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for j in 0..n {
            let d = s.d[(i, j)];
            let q = s.ds[(i, j)];
            let w = (u[i] - u[j]).powi(2);
            if j > i {
                cr += d * f[j];
                rr += d * w;
                ur += q * u[j];
            } else if j < i {
                cl += d * f[j];
                rl += d * w;
                ul += q * u[j];
            }
        }
        let half = 0.5 * s.ds[(i, i)] * u[i];
        right[0][i] = dx * cr + 0.5 * f[i];
        left[0][i] = -dx * cl + 0.5 * f[i];
        right[1][i] = -0.5 * (1.0 - a) * dx * rr;
        left[1][i] = 0.5 * (1.0 - a) * dx * rl;
        right[2][i] = -g * dx * (half + ur);
        left[2][i] = g * dx * (half + ul);
    }
    Ok(FluxDecomposition { dx, right, left })
}
