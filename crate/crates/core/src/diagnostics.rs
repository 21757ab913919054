//! Norms, entropy functionals, resampling and shell-integrated spectra.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linearization::linear_slope;
use crate::multiblock::GlobalOperator;
use crate::operators::Family;
use crate::swe::Grid2D;

/// `√(uᵀ H u)`.
pub fn h_norm(u: &[f64], h: &[f64]) -> Result<f64> {
    if u.len() != h.len() {
        return Err(Error::SizeMismatch { expected: h.len(), got: u.len() });
    }
    Ok(u.iter().zip(h).map(|(u, h)| h * u * u).sum::<f64>().sqrt())
}

/// Weighted norm `√(Σ w_i u_i²)` over a state made of blocks of `h`
/// (one block per component).
pub fn block_h_norm(u: &[f64], h: &[f64]) -> f64 {
    u.iter().enumerate().map(|(i, v)| h[i % h.len()] * v * v).sum::<f64>().sqrt()
}

/// Burgers entropy `Σ H u²`.
pub fn burgers_entropy(u: &[f64], h: &[f64]) -> f64 {
    u.iter().zip(h).map(|(u, h)| h * u * u).sum()
}

/// Values of `f` at `m` uniform periodic points `x0 + i L / m`.
///
/// DG elements are interpolated with their nodal polynomial; FD elements
/// piecewise-linearly between adjacent nodes.
pub fn resample_1d(ops: &GlobalOperator, f: &[f64], m: usize) -> Result<Vec<f64>> {
    if f.len() != ops.size() {
        return Err(Error::SizeMismatch { expected: ops.size(), got: f.len() });
    }
    let mesh = &ops.mesh;
    let starts = mesh.element_starts();
    let len = mesh.length();
    let n = ops.n();
    let mut out = Vec::with_capacity(m);
    let mut e = 0;
    for i in 0..m {
        let x = mesh.x0 + len * i as f64 / m as f64;
        while e + 1 < starts.len() && x >= starts[e + 1] {
            e += 1;
        }
        let el = &mesh.elements[e];
        let xl = x - starts[e] + el.nodes[0];
        let vals = &f[e * n..(e + 1) * n];
        let v = match el.family {
            Family::DgLgl => lagrange_eval(&el.nodes, vals, xl),
            _ => {
                let j = el.nodes.partition_point(|&p| p <= xl).clamp(1, n - 1);
                let (a, b) = (el.nodes[j - 1], el.nodes[j]);
                let t = (xl - a) / (b - a);
                vals[j - 1] * (1.0 - t) + vals[j] * t
            }
        };
        if !v.is_finite() {
            return Err(Error::ResampleFailure(format!("non-finite value at x = {x}")));
        }
        out.push(v);
    }
    Ok(out)
}

/// Barycentric Lagrange interpolation through `(nodes, vals)`.
pub fn lagrange_eval(nodes: &[f64], vals: &[f64], x: f64) -> f64 {
    let n = nodes.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let d = x - nodes[j];
        if d == 0.0 {
            return vals[j];
        }
        let w = 1.0 / (0..n).filter(|&k| k != j).map(|k| nodes[j] - nodes[k]).product::<f64>();
        num += w / d * vals[j];
        den += w / d;
    }
    num / den
}

/// Uniform `m × m` resample (index `j*m + i`) of a 2D nodal field.
pub fn resample_2d(grid: &Grid2D, f: &[f64], m: usize) -> Result<Vec<f64>> {
    if !m.is_power_of_two() {
        return Err(Error::ResampleFailure(format!("grid size {m} is not a power of two")));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    // rows first: ny × m
    let mut tmp = vec![0.0; ny * m];
    for j in 0..ny {
        let r = resample_1d(&grid.ox, &f[j * nx..(j + 1) * nx], m)?;
        tmp[j * m..(j + 1) * m].copy_from_slice(&r);
    }
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        let col: Vec<f64> = (0..ny).map(|j| tmp[j * m + i]).collect();
        for (j, v) in resample_1d(&grid.oy, &col, m)?.into_iter().enumerate() {
            out[j * m + i] = v;
        }
    }
    Ok(out)
}

/// Shell spectrum `E_n`, `n = 0..len`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumCurve {
    pub e: Vec<f64>,
}

fn fft2(f: &[f64], m: usize) -> Vec<Complex<f64>> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    let scale = 1.0 / (m * m) as f64;
    let mut data: Vec<Complex<f64>> = f.iter().map(|&v| Complex::new(v * scale, 0.0)).collect();
    for row in data.chunks_mut(m) {
        fft.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); m];
    for i in 0..m {
        for j in 0..m {
            col[j] = data[j * m + i];
        }
        fft.process(&mut col);
        for j in 0..m {
            data[j * m + i] = col[j];
        }
    }
    data
}

fn signed(k: usize, m: usize) -> f64 {
    if k < m.div_ceil(2) {
        k as f64
    } else {
        k as f64 - m as f64
    }
}

/// `E_n = Σ_{n ≤ |k| < n+1} ½(|û_k|² + |v̂_k|²)` with DFT coefficients scaled by `1/M²`,
/// so `Σ E_n = ½ mean(u² + v²)`.
pub fn kinetic_energy_spectrum(u: &[f64], v: &[f64], m: usize) -> Result<SpectrumCurve> {
    if !m.is_power_of_two() || u.len() != m * m || v.len() != m * m {
        return Err(Error::ResampleFailure(format!("expected two {m}×{m} power-of-two grids")));
    }
    let (uh, vh) = (fft2(u, m), fft2(v, m));
    let nmax = ((2.0f64).sqrt() * (m / 2) as f64).floor() as usize + 1;
    let mut e = vec![0.0; nmax + 1];
    for j in 0..m {
        for i in 0..m {
            let k = (signed(i, m).powi(2) + signed(j, m).powi(2)).sqrt();
            let idx = j * m + i;
            e[k.floor() as usize] += 0.5 * (uh[idx].norm_sqr() + vh[idx].norm_sqr());
        }
    }
    Ok(SpectrumCurve { e })
}

/// `E_ω,n = n² E_n`.
pub fn enstrophy_spectrum(c: &SpectrumCurve) -> SpectrumCurve {
    SpectrumCurve { e: c.e.iter().enumerate().map(|(n, v)| (n * n) as f64 * v).collect() }
}

/// Least-squares slope of `ln E_n` against `ln n` for `n_lo ≤ n ≤ n_hi`.
pub fn slope_fit(c: &SpectrumCurve, n_lo: usize, n_hi: usize) -> Result<f64> {
    if n_lo < 1 || n_hi <= n_lo {
        return Err(Error::EmptyWindow);
    }
    let (x, y): (Vec<f64>, Vec<f64>) = (n_lo..=n_hi.min(c.e.len().saturating_sub(1)))
        .filter(|&n| c.e[n] > 0.0)
        .map(|n| ((n as f64).ln(), c.e[n].ln()))
        .unzip();
    if x.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    Ok(linear_slope(&x, &y))
}

/// CSV with columns `n,E_n,E_omega_n`.
pub fn spectra_csv(ke: &SpectrumCurve) -> String {
    let en = enstrophy_spectrum(ke);
    let mut out = String::from("n,E_n,E_omega_n\n");
    for n in 0..ke.e.len() {
        out.push_str(&format!("{n},{:.12e},{:.12e}\n", ke.e[n], en.e[n]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_lands_in_its_shell() {
        let m = 32;
        let u: Vec<f64> = (0..m * m).map(|idx| (2.0 * std::f64::consts::PI * 3.0 * (idx % m) as f64 / m as f64).cos()).collect();
        let c = kinetic_energy_spectrum(&u, &vec![0.0; m * m], m).unwrap();
        let total: f64 = c.e.iter().sum();
        assert!((c.e[3] - 0.25).abs() < 1e-12);
        assert!((total - c.e[3]).abs() < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let c = SpectrumCurve { e: (0..40).map(|n| if n == 0 { 0.0 } else { (n as f64).powf(-3.5) }).collect() };
        assert!((slope_fit(&c, 2, 30).unwrap() + 3.5).abs() < 1e-10);
        assert!((slope_fit(&enstrophy_spectrum(&c), 2, 30).unwrap() + 1.5).abs() < 1e-10);
        assert!(matches!(slope_fit(&c, 5, 5), Err(Error::EmptyWindow)));
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let nodes = [0.0f64, 0.2, 0.5, 0.9, 1.0];
        let vals: Vec<f64> = nodes.iter().map(|x| 1.0 - 2.0 * x + x.powi(4)).collect();
        for x in [0.1, 0.33, 0.77] {
            assert!((lagrange_eval(&nodes, &vals, x) - (1.0 - 2.0 * x + x.powi(4))).abs() < 1e-13);
        }
    }
}
