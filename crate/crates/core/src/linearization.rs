//! Jacobians of semi-discrete right-hand sides, dense eigen-spectra and
//! stability verdicts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::scalar::Dual;

/// A Jacobian `Q = ∂rhs/∂u` at a base flow.
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    pub q: Dense,
    pub baseflow: Vec<f64>,
    pub rhs_id: String,
}

/// Forward-mode Jacobian, one dual-number sweep per column.
pub fn jacobian<F>(rhs: F, base: &[f64]) -> Result<Dense>
where
    F: Fn(&[Dual]) -> Result<Vec<Dual>>,
{
    let m = base.len();
    let mut q = Dense::zeros(m, m);
    let mut x: Vec<Dual> = base.iter().map(|&v| Dual::new(v, 0.0)).collect();
    for j in 0..m {
        x[j].d = 1.0;
        let col = rhs(&x)?;
        if col.len() != m {
            return Err(Error::SizeMismatch { expected: m, got: col.len() });
        }
        x[j].d = 0.0;
        for (i, c) in col.iter().enumerate() {
            q[(i, j)] = c.d;
        }
    }
    Ok(q)
}

/// Central-difference Jacobian with step `eps` per column.
pub fn fd_jacobian<F>(rhs: F, base: &[f64], eps: f64) -> Result<Dense>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let m = base.len();
    let mut q = Dense::zeros(m, m);
    let mut x = base.to_vec();
    for j in 0..m {
        x[j] = base[j] + eps;
        let p = rhs(&x)?;
        x[j] = base[j] - eps;
        let n = rhs(&x)?;
        x[j] = base[j];
        for i in 0..m {
            q[(i, j)] = (p[i] - n[i]) / (2.0 * eps);
        }
    }
    Ok(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    LocallyStable,
    Marginal,
    Unstable,
}

/// Thresholds for [`Verdict`]:
/// stable if `max Re λ ≤ stable_tol`, marginal if `≤ eta_c + band`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictOptions {
    pub stable_tol: f64,
    pub eta_c: f64,
    pub band: f64,
}

impl VerdictOptions {
    /// `stable_tol = 1e-8 ‖Q‖∞`, `band = 1e-6 ‖Q‖∞ Δx`.
    pub fn standard(q: &Dense, dx: f64, eta_c: f64) -> Self {
        let nq = q.norm_inf();
        VerdictOptions { stable_tol: 1e-8 * nq, eta_c, band: 1e-6 * nq * dx }
    }

    pub fn classify(&self, lambda_max_re: f64) -> Verdict {
        if lambda_max_re <= self.stable_tol {
            Verdict::LocallyStable
        } else if lambda_max_re <= self.eta_c + self.band {
            Verdict::Marginal
        } else {
            Verdict::Unstable
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumAnalysis {
    /// Sorted by decreasing real part, then decreasing `|Im|`.
    pub eigenvalues: Vec<(f64, f64)>,
    pub lambda_max_re: f64,
    pub lambda_max_im: f64,
    pub norm_q: f64,
    pub options: VerdictOptions,
    pub verdict: Verdict,
}

fn cmp_eig(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re)
        .then(b.im.abs().total_cmp(&a.im.abs()))
        .then(b.im.total_cmp(&a.im))
}

pub fn eigenvalues(q: &Dense) -> Result<Vec<Complex64>> {
    let ev = q.to_faer().eigenvalues().map_err(|_| Error::NoConvergence)?;
    let mut out: Vec<Complex64> = ev.into_iter().map(|c| Complex64::new(c.re, c.im)).collect();
    out.sort_by(cmp_eig);
    Ok(out)
}

pub fn eigen_spectrum(q: &Dense, options: VerdictOptions) -> Result<SpectrumAnalysis> {
    let ev = eigenvalues(q)?;
    let top = ev.first().copied().ok_or(Error::NoConvergence)?;
    Ok(SpectrumAnalysis {
        eigenvalues: ev.iter().map(|c| (c.re, c.im)).collect(),
        lambda_max_re: top.re,
        lambda_max_im: top.im,
        norm_q: q.norm_inf(),
        options,
        verdict: options.classify(top.re),
    })
}

/// Full eigendecomposition, pairs sorted like [`eigenvalues`].
pub fn eigenpairs(q: &Dense) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let e = q.to_faer().eigen().map_err(|_| Error::NoConvergence)?;
    let s = e.S().column_vector();
    let u = e.U();
    let m = q.rows();
    let mut pairs: Vec<(Complex64, Vec<Complex64>)> = (0..m)
        .map(|j| {
            let lam = s[j];
            let v = (0..m).map(|i| Complex64::new(u[(i, j)].re, u[(i, j)].im)).collect();
            (Complex64::new(lam.re, lam.im), v)
        })
        .collect();
    pairs.sort_by(|a, b| cmp_eig(&a.0, &b.0));
    Ok(pairs)
}

/// `‖Qv - λv‖∞ / (‖Q‖∞ ‖v‖∞)`.
pub fn eigen_residual(q: &Dense, lam: Complex64, v: &[Complex64]) -> f64 {
    let re: Vec<f64> = v.iter().map(|c| c.re).collect();
    let im: Vec<f64> = v.iter().map(|c| c.im).collect();
    let (qr, qi) = (q.matvec(&re), q.matvec(&im));
    let vmax = v.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let r = (0..v.len()).fold(0.0f64, |m, i| m.max((Complex64::new(qr[i], qi[i]) - lam * v[i]).norm()));
    r / (q.norm_inf() * vmax)
}

/// Fastest-growing eigenpair. The eigenvector is rotated so its largest entry
/// is real and positive, and the real part is returned scaled to max-abs `amplitude`.
pub fn fastest_mode(q: &Dense, amplitude: f64) -> Result<(Complex64, Vec<f64>)> {
    let pairs = eigenpairs(q)?;
    let (lam, v) = pairs.into_iter().next().ok_or(Error::NoConvergence)?;
    Ok((lam, real_seed(&v, amplitude)))
}

/// Real perturbation seed from a complex eigenvector.
pub fn real_seed(v: &[Complex64], amplitude: f64) -> Vec<f64> {
    let pivot = v.iter().copied().fold(Complex64::new(0.0, 0.0), |m, c| if c.norm() > m.norm() { c } else { m });
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
    let re: Vec<f64> = v.iter().map(|c| (c * phase).re).collect();
    let max = re.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    re.iter().map(|x| x * amplitude / max).collect()
}

/// Least-squares slope of `ln ‖δu‖` over the leading samples that stay
/// below `0.1 * base_norm`.
pub fn growth_rate_fit(t: &[f64], norms: &[f64], base_norm: f64) -> Result<f64> {
    let k = norms.iter().take_while(|&&n| n < 0.1 * base_norm && n > 0.0).count();
    if k < 10 {
        return Err(Error::WindowTooShort(k));
    }
    let y: Vec<f64> = norms[..k].iter().map(|n| n.ln()).collect();
    Ok(linear_slope(&t[..k], &y))
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `η_c = max(0, -min ∂ₓa)` from samples of the advection-speed derivative.
pub fn eta_c_from_derivative(dadx: &[f64]) -> f64 {
    dadx.iter().fold(0.0f64, |m, v| m.max(-v))
}

/// Spectra as CSV with columns `re,im`.
pub fn spectrum_csv(s: &SpectrumAnalysis) -> String {
    let mut out = String::from("re,im\n");
    for (re, im) in &s.eigenvalues {
        out.push_str(&format!("{re:.12e},{im:.12e}\n"));
    }
    out
}
