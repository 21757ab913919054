//! Small row-major dense matrix used for element operators and assembled
//! global operators. Heavy linear algebra (SVD, eigen) goes through faer.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Dense { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Dense { rows, cols, data }
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows);
        let mut out = Dense::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `y += A x` for any scalar type; used by the generic right-hand sides.
    pub fn matvec_add<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.rows) {
            let mut acc = T::zero();
            for (a, &xj) in self.row(i).iter().zip(x) {
                if *a != 0.0 {
                    acc += xj * *a;
                }
            }
            *yi += acc;
        }
    }

    pub fn add(&self, other: &Dense) -> Dense {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Dense) -> Dense {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Dense {
        Dense { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    fn zip_with(&self, other: &Dense, f: impl Fn(f64, f64) -> f64) -> Dense {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Dense {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Scale row `i` by `s[i]`, i.e. `diag(s) * A`.
    pub fn scale_rows(&self, s: &[f64]) -> Dense {
        Self::from_fn(self.rows, self.cols, |i, j| s[i] * self[(i, j)])
    }

    /// Scale column `j` by `s[j]`, i.e. `A * diag(s)`.
    pub fn scale_cols(&self, s: &[f64]) -> Dense {
        Self::from_fn(self.rows, self.cols, |i, j| s[j] * self[(i, j)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub fn from_faer(m: faer::MatRef<'_, f64>) -> Dense {
        Dense::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for Dense {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Dense {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Minimum-norm least-squares solution of `A x = b` from the thin SVD,
/// dropping singular values below `1e-13 σ_max`.
///
/// faer's own `pseudoinverse` mis-sizes its work buffers in 0.22, so the
/// product `V Σ⁺ Uᵀ b` is formed here directly.
pub fn lstsq_min_norm(a: &Dense, b: &[f64]) -> Vec<f64> {
    let svd = a.to_faer().thin_svd().expect("svd failed");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = s.nrows();
    let smax = (0..k).fold(0.0f64, |m, i| m.max(s[i].abs()));
    let mut x = vec![0.0; a.cols()];
    for c in 0..k {
        if s[c].abs() <= 1e-13 * smax {
            continue;
        }
        let coef = (0..a.rows()).map(|i| u[(i, c)] * b[i]).sum::<f64>() / s[c];
        for (r, xr) in x.iter_mut().enumerate() {
            *xr += v[(r, c)] * coef;
        }
    }
    x
}

/// Solve a small square system by partial-pivot LU.
pub fn solve(a: &Dense, b: &[f64]) -> Vec<f64> {
    use faer::linalg::solvers::Solve;
    let fa = a.to_faer();
    let lu = fa.partial_piv_lu();
    let rhs = faer::Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_against_hand_product() {
        let a = Dense::from_row_major(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let b = Dense::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(a.matmul(&b).data(), &[2.0, 1.0, 4.0, 3.0]);
    }

    #[test]
    fn lstsq_picks_min_norm_solution() {
        // x + y = 2 has min-norm solution (1, 1)
        let a = Dense::from_row_major(1, 2, vec![1.0, 1.0]);
        let x = lstsq_min_norm(&a, &[2.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lu_solve_recovers_rhs() {
        let a = Dense::from_row_major(3, 3, vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let x = solve(&a, &[1.0, 2.0, 3.0]);
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((ri - bi).abs() < 1e-14);
        }
    }
}
