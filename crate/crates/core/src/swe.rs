//! Shallow water equations on periodic multi-block grids, 1D and tensor-product 2D.
//!
//! The skew form pairs each equation with its entropy variable:
//! mass with `w_h = gh - |u|²/2`, x-momentum with `u`, y-momentum with `v`.
//! Interface upwinding adds `½ H⁻¹ ῡ B~ w` with `ῡ` the average of the two
//! element parameters, and volume upwinding adds `γ 𝒟ˢ w`. Both are
//! entropy-dissipative for any non-negative parameters.
//!
//! States are stored component-major: `[h; hu]` in 1D and `[h; hu; hv]` in 2D,
//! with 2D fields indexed `j * nx + i`.

use crate::error::{Error, Result};
use crate::multiblock::GlobalOperator;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Entropy-conserving split form plus upwinding.
    Skew,
    /// `-D~ f(q)` on the flux. Carries no entropy identity.
    Conservative,
}

/// Switches shared by the 1D and 2D schemes.
#[derive(Clone, Debug)]
pub struct SweOptions {
    pub g: f64,
    pub form: Form,
    pub interface_upwind: bool,
    /// Multiplies every volume parameter; 0 gives `Γ = 0`.
    pub volume_scale: f64,
    pub coriolis: f64,
}

impl SweOptions {
    /// Split form with interface upwinding and volume parameters scaled by `volume_scale`.
    pub fn skew(g: f64, volume_scale: f64) -> Self {
        SweOptions { g, form: Form::Skew, interface_upwind: true, volume_scale, coriolis: 0.0 }
    }

    /// Split form with every upwind parameter zero: `dE_h/dt = 0`.
    pub fn entropy_conserving(g: f64) -> Self {
        SweOptions { g, form: Form::Skew, interface_upwind: false, volume_scale: 0.0, coriolis: 0.0 }
    }

    /// Flux form with interface upwinding only.
    pub fn conservative(g: f64) -> Self {
        SweOptions { g, form: Form::Conservative, interface_upwind: true, volume_scale: 0.0, coriolis: 0.0 }
    }
}

fn check_heights<T: Scalar>(h: &[T]) -> Result<()> {
    for (node, v) in h.iter().enumerate() {
        let hv = v.re();
        if !(hv > 0.0) {
            return Err(Error::NonPositiveHeight { node, h: hv });
        }
    }
    Ok(())
}

/// `(u, gh - u²/2)` for a 1D state.
pub fn entropy_variables_1d<T: Scalar>(h: &[T], hu: &[T], g: f64) -> Result<(Vec<T>, Vec<T>)> {
    check_heights(h)?;
    let u: Vec<T> = hu.iter().zip(h).map(|(&m, &h)| m / h).collect();
    let w = h.iter().zip(&u).map(|(&h, &u)| h * g - u * u * 0.5).collect();
    Ok((u, w))
}

/// `(u, v, gh - (u²+v²)/2)` for a 2D state.
pub fn entropy_variables_2d<T: Scalar>(h: &[T], hu: &[T], hv: &[T], g: f64) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    check_heights(h)?;
    let u: Vec<T> = hu.iter().zip(h).map(|(&m, &h)| m / h).collect();
    let v: Vec<T> = hv.iter().zip(h).map(|(&m, &h)| m / h).collect();
    let w = (0..h.len()).map(|i| h[i] * g - (u[i] * u[i] + v[i] * v[i]) * 0.5).collect();
    Ok((u, v, w))
}

fn abs<T: Scalar>(x: T) -> T {
    if x.re() < 0.0 {
        -x
    } else {
        x
    }
}

/// Larger by value; the derivative follows the selected argument.
fn max<T: Scalar>(a: T, b: T) -> T {
    if b.re() > a.re() {
        b
    } else {
        a
    }
}

/// Pointwise mass parameter `h(|u_n| + √(gh)) / (gh + u_n²)` for normal velocity `u_n`.
pub fn mass_param<T: Scalar>(h: T, un: T, g: f64) -> T {
    h * (abs(un) + (h * g).sqrt()) / (h * g + un * un)
}

/// Per-element parameters for the mass equation and the momentum equation(s).
///
/// They are functions of the state, so Jacobians differentiate through them.
#[derive(Clone, Debug, PartialEq)]
pub struct UpwindParams<T = f64> {
    /// `params[c][k]`, component `c` in state order, element `k`.
    pub params: Vec<Vec<T>>,
}

impl<T: Scalar> UpwindParams<T> {
    /// Averaged interface coefficient `(υᵏ + υᵏ⁺¹)/2` for each periodic interface.
    pub fn interface(&self, c: usize) -> Vec<T> {
        let p = &self.params[c];
        let k = p.len();
        (0..k).map(|i| (p[i] + p[(i + 1) % k]) * 0.5).collect()
    }
}

/// `υ₁ᵏ = max h(|u| + √(gh))/(gh + u²)`, `υ₂ᵏ = max |hu|` per element.
pub fn upwind_params_1d<T: Scalar>(h: &[T], hu: &[T], g: f64, n: usize) -> Result<UpwindParams<T>> {
    check_heights(h)?;
    let k = h.len() / n;
    let mut mass = vec![T::zero(); k];
    let mut mom = vec![T::zero(); k];
    for i in 0..h.len() {
        let e = i / n;
        mass[e] = max(mass[e], mass_param(h[i], hu[i] / h[i], g));
        mom[e] = max(mom[e], abs(hu[i]));
    }
    Ok(UpwindParams { params: vec![mass, mom] })
}

fn central_derivative<T: Scalar>(ops: &GlobalOperator, f: impl Fn(usize) -> T, len: usize) -> Vec<T> {
    let v: Vec<T> = (0..len).map(f).collect();
    ops.apply_d(&v)
}

#[derive(Clone, Debug)]
pub struct Swe1D {
    pub ops: GlobalOperator,
    pub opts: SweOptions,
}

impl Swe1D {
    pub fn size(&self) -> usize {
        2 * self.ops.size()
    }

    pub fn params<T: Scalar>(&self, q: &[T]) -> Result<UpwindParams<T>> {
        let m = self.ops.size();
        upwind_params_1d(&q[..m], &q[m..], self.opts.g, self.ops.n())
    }

    /// Semi-discrete tendency.
    pub fn rhs<T: Scalar>(&self, q: &[T]) -> Result<Vec<T>> {
        let m = self.ops.size();
        if q.len() != 2 * m {
            return Err(Error::SizeMismatch { expected: 2 * m, got: q.len() });
        }
        let g = self.opts.g;
        let (h, hu) = q.split_at(m);
        check_heights(h)?;
        let mut out = vec![T::zero(); 2 * m];
        let (u, w) = entropy_variables_1d(h, hu, g)?;
        match self.opts.form {
            Form::Conservative => {
                let dm = self.ops.apply_d(hu);
                let df = central_derivative(&self.ops, |i| hu[i] * hu[i] / h[i] + h[i] * h[i] * (0.5 * g), m);
                for i in 0..m {
                    out[i] = -dm[i];
                    out[m + i] = -df[i];
                }
            }
            Form::Skew => {
                let d_hu = self.ops.apply_d(hu);
                let d_huu = central_derivative(&self.ops, |i| hu[i] * u[i], m);
                let d_u = self.ops.apply_d(&u);
                let d_h = self.ops.apply_d(h);
                for i in 0..m {
                    out[i] = -d_hu[i];
                    out[m + i] = -((d_huu[i] + u[i] * d_hu[i] + hu[i] * d_u[i]) * 0.5 + h[i] * d_h[i] * g);
                }
            }
        }
        if self.opts.interface_upwind || self.opts.volume_scale != 0.0 {
            let p = self.params(q)?;
            for (c, wv) in [(0usize, &w), (1, &u)] {
                let slot = &mut out[c * m..(c + 1) * m];
                if self.opts.interface_upwind {
                    self.ops.add_interface_upwind(wv, &p.interface(c), slot);
                }
                if self.opts.volume_scale != 0.0 {
                    let gam: Vec<T> = p.params[c].iter().map(|&v| v * self.opts.volume_scale).collect();
                    for (o, d) in slot.iter_mut().zip(self.ops.apply_ds_scaled(wv, &gam)) {
                        *o += d;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `E_h = Σ H ½(hu² + gh²)`.
    pub fn total_entropy(&self, q: &[f64]) -> Result<f64> {
        let m = self.ops.size();
        check_heights(&q[..m])?;
        Ok((0..m)
            .map(|i| {
                let (h, hu) = (q[i], q[m + i]);
                self.ops.h()[i] * 0.5 * (hu * hu / h + self.opts.g * h * h)
            })
            .sum())
    }

    /// Right-hand side of the semi-discrete entropy identity:
    /// `-½ Σ ῡ [[w]]² + Σ γ ⟨w, 𝒟ˢ w⟩_H`. Split form only.
    pub fn entropy_rate_formula(&self, q: &[f64]) -> Result<f64> {
        no_identity_for_flux_form(self.opts.form)?;
        let m = self.ops.size();
        let (u, w) = entropy_variables_1d(&q[..m], &q[m..], self.opts.g)?;
        let p = self.params(q)?;
        let mut rate = 0.0;
        for (c, wv) in [(0usize, &w), (1, &u)] {
            rate += line_dissipation(&self.ops, wv, &p.params[c], &self.opts);
        }
        Ok(rate)
    }

    /// `Σ wᵀ H dq/dt` computed from the actual tendency.
    pub fn entropy_rate(&self, q: &[f64]) -> Result<f64> {
        let m = self.ops.size();
        let (u, w) = entropy_variables_1d(&q[..m], &q[m..], self.opts.g)?;
        let r = self.rhs(q)?;
        let h = self.ops.h();
        Ok((0..m).map(|i| h[i] * (w[i] * r[i] + u[i] * r[m + i])).sum())
    }
}

fn no_identity_for_flux_form(form: Form) -> Result<()> {
    match form {
        Form::Skew => Ok(()),
        Form::Conservative => Err(Error::InvalidArgument("the flux form has no semi-discrete entropy identity".into())),
    }
}

/// Entropy production of the upwind terms on one line of elements.
fn line_dissipation(ops: &GlobalOperator, w: &[f64], params: &[f64], opts: &SweOptions) -> f64 {
    let mut rate = 0.0;
    if opts.interface_upwind {
        let k = params.len();
        for (i, j) in ops.jumps(w).iter().enumerate() {
            rate -= 0.5 * 0.5 * (params[i] + params[(i + 1) % k]) * j * j;
        }
    }
    if opts.volume_scale != 0.0 {
        let gam: Vec<f64> = params.iter().map(|v| v * opts.volume_scale).collect();
        let d = ops.apply_ds_scaled(w, &gam);
        rate += (0..w.len()).map(|i| ops.h()[i] * w[i] * d[i]).sum::<f64>();
    }
    rate
}

/// Tensor product of two periodic multi-block operators.
#[derive(Clone, Debug)]
pub struct Grid2D {
    pub ox: GlobalOperator,
    pub oy: GlobalOperator,
}

impl Grid2D {
    pub fn nx(&self) -> usize {
        self.ox.size()
    }

    pub fn ny(&self) -> usize {
        self.oy.size()
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node coordinates `(x, y)` in storage order.
    pub fn coords(&self) -> (Vec<f64>, Vec<f64>) {
        let (xs, ys) = (self.ox.nodes(), self.oy.nodes());
        let mut x = Vec::with_capacity(self.len());
        let mut y = Vec::with_capacity(self.len());
        for yj in &ys {
            for xi in &xs {
                x.push(*xi);
                y.push(*yj);
            }
        }
        (x, y)
    }

    /// Diagonal of `H = Hx ⊗ Hy`.
    pub fn weights(&self) -> Vec<f64> {
        let (hx, hy) = (self.ox.h(), self.oy.h());
        hy.iter().flat_map(|wy| hx.iter().map(move |wx| wx * wy)).collect()
    }

    /// Apply `op(j, row)` to every x-line; `j` is the global y index.
    pub fn along_x<T: Scalar>(&self, f: &[T], op: impl Fn(usize, &[T]) -> Vec<T>) -> Vec<T> {
        let nx = self.nx();
        let mut out = Vec::with_capacity(f.len());
        for j in 0..self.ny() {
            out.extend(op(j, &f[j * nx..(j + 1) * nx]));
        }
        out
    }

    /// Apply `op(i, column)` to every y-line; `i` is the global x index.
    pub fn along_y<T: Scalar>(&self, f: &[T], op: impl Fn(usize, &[T]) -> Vec<T>) -> Vec<T> {
        let (nx, ny) = (self.nx(), self.ny());
        let mut out = vec![T::zero(); f.len()];
        let mut col = Vec::with_capacity(ny);
        for i in 0..nx {
            col.clear();
            col.extend((0..ny).map(|j| f[j * nx + i]));
            for (j, v) in op(i, &col).into_iter().enumerate() {
                out[j * nx + i] = v;
            }
        }
        out
    }

    pub fn dx<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.along_x(f, |_, r| self.ox.apply_d(r))
    }

    pub fn dy<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.along_y(f, |_, c| self.oy.apply_d(c))
    }

    /// Element `(kx, ky)` flattened as `ky * Kx + kx`.
    pub fn element_of(&self, i: usize, j: usize) -> usize {
        (j / self.oy.n()) * self.ox.k() + i / self.ox.n()
    }

    pub fn n_elements(&self) -> usize {
        self.ox.k() * self.oy.k()
    }
}

#[derive(Clone, Debug)]
pub struct Swe2D {
    pub grid: Grid2D,
    pub opts: SweOptions,
}

/// Per-element parameters for both sweep directions.
#[derive(Clone, Debug, PartialEq)]
pub struct UpwindParams2D<T = f64> {
    pub x: UpwindParams<T>,
    pub y: UpwindParams<T>,
}

impl Swe2D {
    pub fn size(&self) -> usize {
        3 * self.grid.len()
    }

    pub fn params<T: Scalar>(&self, q: &[T]) -> Result<UpwindParams2D<T>> {
        let m = self.grid.len();
        let (h, rest) = q.split_at(m);
        let (hu, hv) = rest.split_at(m);
        check_heights(h)?;
        let ne = self.grid.n_elements();
        let g = self.opts.g;
        let mut px = vec![vec![T::zero(); ne]; 3];
        let mut py = vec![vec![T::zero(); ne]; 3];
        let nx = self.grid.nx();
        for idx in 0..m {
            let e = self.grid.element_of(idx % nx, idx / nx);
            let (u, v) = (hu[idx] / h[idx], hv[idx] / h[idx]);
            px[0][e] = max(px[0][e], mass_param(h[idx], u, g));
            py[0][e] = max(py[0][e], mass_param(h[idx], v, g));
            for p in [&mut px, &mut py] {
                p[1][e] = max(p[1][e], abs(hu[idx]));
                p[2][e] = max(p[2][e], abs(hv[idx]));
            }
        }
        Ok(UpwindParams2D { x: UpwindParams { params: px }, y: UpwindParams { params: py } })
    }

    fn add_upwind<T: Scalar>(&self, w: [&[T]; 3], p: &UpwindParams2D<T>, out: &mut [T]) {
        let m = self.grid.len();
        let (kx, ky) = (self.grid.ox.k(), self.grid.oy.k());
        let (nxe, nye) = (self.grid.ox.n(), self.grid.oy.n());
        let s = self.opts.volume_scale;
        for c in 0..3 {
            // x sweeps: line j lies in element row j / nye
            let tx = self.grid.along_x(w[c], |j, row| {
                let er = j / nye;
                let pr: Vec<T> = (0..kx).map(|k| p.x.params[c][er * kx + k]).collect();
                let mut o = if s != 0.0 {
                    self.grid.ox.apply_ds_scaled(row, &pr.iter().map(|&v| v * s).collect::<Vec<_>>())
                } else {
                    vec![T::zero(); row.len()]
                };
                if self.opts.interface_upwind {
                    let coef: Vec<T> = (0..kx).map(|k| (pr[k] + pr[(k + 1) % kx]) * 0.5).collect();
                    self.grid.ox.add_interface_upwind(row, &coef, &mut o);
                }
                o
            });
            let ty = self.grid.along_y(w[c], |i, col| {
                let ec = i / nxe;
                let pc: Vec<T> = (0..ky).map(|k| p.y.params[c][k * kx + ec]).collect();
                let mut o = if s != 0.0 {
                    self.grid.oy.apply_ds_scaled(col, &pc.iter().map(|&v| v * s).collect::<Vec<_>>())
                } else {
                    vec![T::zero(); col.len()]
                };
                if self.opts.interface_upwind {
                    let coef: Vec<T> = (0..ky).map(|k| (pc[k] + pc[(k + 1) % ky]) * 0.5).collect();
                    self.grid.oy.add_interface_upwind(col, &coef, &mut o);
                }
                o
            });
            for i in 0..m {
                out[c * m + i] += tx[i] + ty[i];
            }
        }
    }

    pub fn rhs<T: Scalar>(&self, q: &[T]) -> Result<Vec<T>> {
        let m = self.grid.len();
        if q.len() != 3 * m {
            return Err(Error::SizeMismatch { expected: 3 * m, got: q.len() });
        }
        let g = self.opts.g;
        let (h, rest) = q.split_at(m);
        let (hu, hv) = rest.split_at(m);
        check_heights(h)?;
        let gd = &self.grid;
        let mut out = vec![T::zero(); 3 * m];
        let (u, v, w) = entropy_variables_2d(h, hu, hv, g)?;
        match self.opts.form {
            Form::Conservative => {
                let fx1: Vec<T> = (0..m).map(|i| hu[i] * hu[i] / h[i] + h[i] * h[i] * (0.5 * g)).collect();
                let fy2: Vec<T> = (0..m).map(|i| hv[i] * hv[i] / h[i] + h[i] * h[i] * (0.5 * g)).collect();
                let cross: Vec<T> = (0..m).map(|i| hu[i] * hv[i] / h[i]).collect();
                let (a, b) = (gd.dx(hu), gd.dy(hv));
                let (c, d) = (gd.dx(&fx1), gd.dy(&cross));
                let (e, f) = (gd.dx(&cross), gd.dy(&fy2));
                for i in 0..m {
                    out[i] = -(a[i] + b[i]);
                    out[m + i] = -(c[i] + d[i]);
                    out[2 * m + i] = -(e[i] + f[i]);
                }
            }
            Form::Skew => {
                let huu: Vec<T> = (0..m).map(|i| hu[i] * u[i]).collect();
                let hvu: Vec<T> = (0..m).map(|i| hv[i] * u[i]).collect();
                let huv: Vec<T> = (0..m).map(|i| hu[i] * v[i]).collect();
                let hvv: Vec<T> = (0..m).map(|i| hv[i] * v[i]).collect();
                let (dx_hu, dy_hv) = (gd.dx(hu), gd.dy(hv));
                let (dx_u, dy_u, dx_v, dy_v) = (gd.dx(&u), gd.dy(&u), gd.dx(&v), gd.dy(&v));
                let (dx_h, dy_h) = (gd.dx(h), gd.dy(h));
                let (dx_huu, dy_hvu, dx_huv, dy_hvv) = (gd.dx(&huu), gd.dy(&hvu), gd.dx(&huv), gd.dy(&hvv));
                for i in 0..m {
                    out[i] = -(dx_hu[i] + dy_hv[i]);
                    let fx = (dx_huu[i] + u[i] * dx_hu[i] + hu[i] * dx_u[i]) * 0.5 + h[i] * dx_h[i] * g;
                    let fy = (dy_hvu[i] + u[i] * dy_hv[i] + hv[i] * dy_u[i]) * 0.5;
                    out[m + i] = -(fx + fy);
                    let gx = (dx_huv[i] + v[i] * dx_hu[i] + hu[i] * dx_v[i]) * 0.5;
                    let gy = (dy_hvv[i] + v[i] * dy_hv[i] + hv[i] * dy_v[i]) * 0.5 + h[i] * dy_h[i] * g;
                    out[2 * m + i] = -(gx + gy);
                }
            }
        }
        if self.opts.interface_upwind || self.opts.volume_scale != 0.0 {
            let p = self.params(q)?;
            self.add_upwind([&w, &u, &v], &p, &mut out);
        }
        let f = self.opts.coriolis;
        if f != 0.0 {
            for i in 0..m {
                out[m + i] += hv[i] * f;
                out[2 * m + i] -= hu[i] * f;
            }
        }
        Ok(out)
    }

    /// `E_h = Σ H ½(hu² + hv² + gh²)`.
    pub fn total_entropy(&self, q: &[f64]) -> Result<f64> {
        let m = self.grid.len();
        check_heights(&q[..m])?;
        let w = self.grid.weights();
        Ok((0..m)
            .map(|i| {
                let (h, hu, hv) = (q[i], q[m + i], q[2 * m + i]);
                w[i] * 0.5 * ((hu * hu + hv * hv) / h + self.opts.g * h * h)
            })
            .sum())
    }

    /// Dissipation formula: each x-line weighted by `Hy_j`, each y-line by `Hx_i`.
    pub fn entropy_rate_formula(&self, q: &[f64]) -> Result<f64> {
        no_identity_for_flux_form(self.opts.form)?;
        let m = self.grid.len();
        let (u, v, w) = entropy_variables_2d(&q[..m], &q[m..2 * m], &q[2 * m..], self.opts.g)?;
        let p = self.params(q)?;
        let gd = &self.grid;
        let (nx, ny) = (gd.nx(), gd.ny());
        let (kx, ky) = (gd.ox.k(), gd.oy.k());
        let mut rate = 0.0;
        for (c, f) in [&w, &u, &v].into_iter().enumerate() {
            for j in 0..ny {
                let er = j / gd.oy.n();
                let pr: Vec<f64> = (0..kx).map(|k| p.x.params[c][er * kx + k]).collect();
                rate += gd.oy.h()[j] * line_dissipation(&gd.ox, &f[j * nx..(j + 1) * nx], &pr, &self.opts);
            }
            for i in 0..nx {
                let ec = i / gd.ox.n();
                let pc: Vec<f64> = (0..ky).map(|k| p.y.params[c][k * kx + ec]).collect();
                let col: Vec<f64> = (0..ny).map(|j| f[j * nx + i]).collect();
                rate += gd.ox.h()[i] * line_dissipation(&gd.oy, &col, &pc, &self.opts);
            }
        }
        Ok(rate)
    }

    pub fn entropy_rate(&self, q: &[f64]) -> Result<f64> {
        let m = self.grid.len();
        let (u, v, w) = entropy_variables_2d(&q[..m], &q[m..2 * m], &q[2 * m..], self.opts.g)?;
        let r = self.rhs(q)?;
        let wt = self.grid.weights();
        Ok((0..m).map(|i| wt[i] * (w[i] * r[i] + u[i] * r[m + i] + v[i] * r[2 * m + i])).sum())
    }
}

/// Relative vorticity `D~x v - D~y u`.
pub fn vorticity(grid: &Grid2D, q: &[f64]) -> Result<Vec<f64>> {
    let m = grid.len();
    check_heights(&q[..m])?;
    let u: Vec<f64> = (0..m).map(|i| q[m + i] / q[i]).collect();
    let v: Vec<f64> = (0..m).map(|i| q[2 * m + i] / q[i]).collect();
    let (a, b) = (grid.dx(&v), grid.dy(&u));
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

/// 1D base flow `h = 8 + sin(2π(x-0.7))`, `hu = 1 + sin(2π(x+0.7))`.
pub fn swe1d_base_flow(x: &[f64]) -> Vec<f64> {
    use std::f64::consts::PI;
    let h = x.iter().map(|x| 8.0 + (2.0 * PI * (x - 0.7)).sin());
    let hu = x.iter().map(|x| 1.0 + (2.0 * PI * (x + 0.7)).sin());
    h.chain(hu).collect()
}

/// Stationary vortex `ψ = e^{-r²}`: `u = 2y e^{-r²}`, `v = -2x e^{-r²}`,
/// `h = 12 + e^{-2r²}/g`.
pub fn init_stationary_vortex(grid: &Grid2D, g: f64) -> Vec<f64> {
    let (x, y) = grid.coords();
    let m = grid.len();
    let mut q = vec![0.0; 3 * m];
    for i in 0..m {
        let r2 = x[i] * x[i] + y[i] * y[i];
        let e = (-r2).exp();
        let h = 12.0 + (-2.0 * r2).exp() / g;
        q[i] = h;
        q[m + i] = h * 2.0 * y[i] * e;
        q[2 * m + i] = h * -2.0 * x[i] * e;
    }
    q
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize, PartialEq)]
pub struct KhParams {
    pub g: f64,
    pub f: f64,
    pub depth: f64,
    pub length: f64,
    pub u0: f64,
    pub jet_width: f64,
    pub bump_height: f64,
    pub bump_k: f64,
}

impl Default for KhParams {
    fn default() -> Self {
        let depth = 10_000.0;
        KhParams {
            g: 9.80616,
            f: 7.292e-5,
            depth,
            length: 2.0 * std::f64::consts::PI * 6_371_220.0,
            u0: 50.0,
            jet_width: 1.0e6,
            bump_height: 0.01 * depth,
            bump_k: 1.0e3,
        }
    }
}

impl KhParams {
    pub fn jets(&self) -> (f64, f64) {
        (0.25 * self.length, 0.75 * self.length)
    }

    pub fn u_profile(&self, y: f64) -> f64 {
        let (yp, ym) = self.jets();
        let w = self.jet_width;
        self.u0 * (1.0 / ((y - yp) / w).cosh() - 1.0 / ((y - ym) / w).cosh())
    }

    /// `∫₀^y u ds` via `∫ sech(s/w) ds = 2w atan(tanh(s/2w))`.
    pub fn u_integral(&self, y: f64) -> f64 {
        let (yp, ym) = self.jets();
        let w = self.jet_width;
        let prim = |s: f64| 2.0 * w * (s / (2.0 * w)).tanh().atan();
        self.u0 * ((prim(y - yp) - prim(-yp)) - (prim(y - ym) - prim(-ym)))
    }

    pub fn bumps(&self, x: f64, y: f64) -> f64 {
        let (yp, ym) = self.jets();
        let l = self.length;
        [(0.15 * l, yp), (0.85 * l, ym)]
            .iter()
            .map(|(xi, yi)| (-self.bump_k * ((x - xi).powi(2) + (y - yi).powi(2)) / (l * l)).exp())
            .sum::<f64>()
            * self.bump_height
    }
}

/// Balanced zonal jets plus two height bumps on `[0, L]²`.
pub fn init_kelvin_helmholtz(grid: &Grid2D, p: &KhParams) -> Vec<f64> {
    let (x, y) = grid.coords();
    let m = grid.len();
    let mut q = vec![0.0; 3 * m];
    for i in 0..m {
        let h = p.depth - p.f / p.g * p.u_integral(y[i]) + p.bumps(x[i], y[i]);
        q[i] = h;
        q[m + i] = h * p.u_profile(y[i]);
    }
    q
}
