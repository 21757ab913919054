//! Periodic multi-block operators.
//!
//! Elements are coupled weakly: `D~± = blockdiag(D±) + ½ H^{-1} B_all`, where
//! `B_all` places the jump `[[u]] = u_first(k+1) - u_last(k)` on both nodes of
//! every interface, including the periodic wrap from element `K` to element 1.
//! The penalty is identical for `D~+` and `D~-`, so `H D~` is skew and the
//! dissipation stays element-local.

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::operators::{OperatorPair, OperatorSplit};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Mesh1D {
    pub elements: Vec<OperatorPair>,
    /// Left end of the domain.
    pub x0: f64,
}

impl Mesh1D {
    pub fn uniform(pair: OperatorPair, k: usize, x0: f64) -> Mesh1D {
        Mesh1D { elements: vec![pair; k], x0 }
    }

    pub fn from_elements(elements: Vec<OperatorPair>, x0: f64) -> Result<Mesh1D> {
        let first = elements.first().ok_or_else(|| Error::InvalidArgument("no elements".into()))?;
        if elements.iter().any(|e| e.family != first.family || e.n() != first.n() || e.interior_order != first.interior_order) {
            return Err(Error::MixedOperatorFamilies);
        }
        Ok(Mesh1D { elements, x0 })
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn n(&self) -> usize {
        self.elements[0].n()
    }

    pub fn length(&self) -> f64 {
        self.elements.iter().map(|e| e.length()).sum()
    }

    /// Left end of every element.
    pub fn element_starts(&self) -> Vec<f64> {
        let mut starts = Vec::with_capacity(self.k());
        let mut x = self.x0;
        for e in &self.elements {
            starts.push(x);
            x += e.length();
        }
        starts
    }

    /// Global node coordinates, element by element (interface nodes doubled).
    pub fn nodes(&self) -> Vec<f64> {
        self.element_starts()
            .iter()
            .zip(&self.elements)
            .flat_map(|(s, e)| e.nodes.iter().map(move |x| s + x - e.nodes[0]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct GlobalOperator {
    pub mesh: Mesh1D,
    splits: Vec<OperatorSplit>,
    h: Vec<f64>,
}

pub fn assemble_periodic(mesh: Mesh1D) -> Result<GlobalOperator> {
    let mesh = Mesh1D::from_elements(mesh.elements, mesh.x0)?;
    let splits = mesh.elements.iter().map(|e| e.split()).collect();
    let h = mesh.elements.iter().flat_map(|e| e.h.iter().cloned()).collect();
    Ok(GlobalOperator { mesh, splits, h })
}

impl GlobalOperator {
    pub fn size(&self) -> usize {
        self.h.len()
    }

    pub fn k(&self) -> usize {
        self.mesh.k()
    }

    pub fn n(&self) -> usize {
        self.mesh.n()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.mesh.nodes()
    }

    /// Largest node spacing over all elements.
    pub fn dx(&self) -> f64 {
        self.mesh.elements.iter().map(|e| e.dx()).fold(0.0, f64::max)
    }

    pub fn element_split(&self, k: usize) -> &OperatorSplit {
        &self.splits[k]
    }

    /// Node indices `(last of element k, first of element k+1)` of interface `k`.
    pub fn interface_nodes(&self, k: usize) -> (usize, usize) {
        let n = self.n();
        (k * n + n - 1, ((k + 1) % self.k()) * n)
    }

    /// `[[u]]_k = u_first(k+1) - u_last(k)` for every interface, wrap included.
    pub fn jumps<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        (0..self.k())
            .map(|k| {
                let (l, r) = self.interface_nodes(k);
                u[r] - u[l]
            })
            .collect()
    }

    fn block_apply<T: Scalar>(&self, u: &[T], out: &mut [T], pick: impl Fn(&OperatorSplit) -> &Dense) {
        let n = self.n();
        for (k, s) in self.splits.iter().enumerate() {
            let r = k * n..(k + 1) * n;
            pick(s).matvec_add(&u[r.clone()], &mut out[r]);
        }
    }

    /// `out += ½ H^{-1} B_all u`.
    fn add_penalty<T: Scalar>(&self, u: &[T], out: &mut [T]) {
        for k in 0..self.k() {
            let (l, r) = self.interface_nodes(k);
            let j = u[r] - u[l];
            out[l] += j * (0.5 / self.h[l]);
            out[r] += j * (0.5 / self.h[r]);
        }
    }

    /// Central penalized derivative `D~ u`.
    pub fn apply_d<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); u.len()];
        self.block_apply(u, &mut out, |s| &s.d);
        self.add_penalty(u, &mut out);
        out
    }

    /// Dissipative part `𝒟ˢ u = ½(D~+ - D~-) u` (element-local).
    pub fn apply_ds<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); u.len()];
        self.block_apply(u, &mut out, |s| &s.ds);
        out
    }

    /// Same as [`apply_ds`](Self::apply_ds) with a per-element multiplier.
    /// The multipliers may themselves depend on the state being differentiated.
    pub fn apply_ds_scaled<T: Scalar>(&self, u: &[T], gamma: &[T]) -> Vec<T> {
        let n = self.n();
        let mut out = vec![T::zero(); u.len()];
        for (k, s) in self.splits.iter().enumerate() {
            let r = k * n..(k + 1) * n;
            let mut tmp = vec![T::zero(); n];
            s.ds.matvec_add(&u[r.clone()], &mut tmp);
            for (o, t) in out[r].iter_mut().zip(tmp) {
                *o += t * gamma[k];
            }
        }
        out
    }

    pub fn apply_dplus<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let mut out = self.apply_d(u);
        self.block_apply(u, &mut out, |s| &s.ds);
        out
    }

    pub fn apply_dminus<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let mut out = self.apply_d(u);
        let ds = self.apply_ds(u);
        for (o, d) in out.iter_mut().zip(ds) {
            *o -= d;
        }
        out
    }

    /// `out += ½ H^{-1} Σ_k c_k B~_k u`, the sign-definite interface upwind term.
    pub fn add_interface_upwind<T: Scalar>(&self, u: &[T], coeff: &[T], out: &mut [T]) {
        for (k, &c) in coeff.iter().enumerate() {
            let (l, r) = self.interface_nodes(k);
            let j = (u[r] - u[l]) * c;
            out[l] += j * (0.5 / self.h[l]);
            out[r] -= j * (0.5 / self.h[r]);
        }
    }

    fn dense_block(&self, pick: impl Fn(&OperatorSplit) -> &Dense) -> Dense {
        let n = self.n();
        let mut m = Dense::zeros(self.size(), self.size());
        for (k, s) in self.splits.iter().enumerate() {
            let b = pick(s);
            for i in 0..n {
                for j in 0..n {
                    m[(k * n + i, k * n + j)] = b[(i, j)];
                }
            }
        }
        m
    }

    /// `B_all = B_I + B_N` (all interfaces including the wrap).
    pub fn b_all(&self) -> Dense {
        let mut b = Dense::zeros(self.size(), self.size());
        for k in 0..self.k() {
            let (l, r) = self.interface_nodes(k);
            b[(l, r)] += 1.0;
            b[(l, l)] -= 1.0;
            b[(r, r)] += 1.0;
            b[(r, l)] -= 1.0;
        }
        b
    }

    /// `B~_all`, symmetric negative semi-definite with `u^T B~ u = -Σ [[u]]^2`.
    pub fn b_tilde_all(&self) -> Dense {
        let mut b = Dense::zeros(self.size(), self.size());
        for k in 0..self.k() {
            let (l, r) = self.interface_nodes(k);
            b[(l, r)] += 1.0;
            b[(l, l)] -= 1.0;
            b[(r, r)] -= 1.0;
            b[(r, l)] += 1.0;
        }
        b
    }

    fn penalty_dense(&self) -> Dense {
        let inv: Vec<f64> = self.h.iter().map(|v| 0.5 / v).collect();
        self.b_all().scale_rows(&inv)
    }

    pub fn d_dense(&self) -> Dense {
        self.dense_block(|s| &s.d).add(&self.penalty_dense())
    }

    pub fn ds_dense(&self) -> Dense {
        self.dense_block(|s| &s.ds)
    }

    pub fn dplus_dense(&self) -> Dense {
        self.d_dense().add(&self.ds_dense())
    }

    pub fn dminus_dense(&self) -> Dense {
        self.d_dense().sub(&self.ds_dense())
    }
}
